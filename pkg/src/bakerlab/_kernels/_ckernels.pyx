# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched centered DFT, qubit shift, single-qubit
gates and the fused perturbed map step.

Same contracts as ``_pure``; rows are complex128 state vectors with qubit 1
as the most significant index bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport M_PI, sqrt, cos, sin
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx


cdef struct DftPlan:
    Py_ssize_t M
    Py_ssize_t* rev
    cplx* tw
    cplx* pre
    cplx* post
    cplx* tmp


cdef inline cplx _expi(double a) noexcept nogil:
    return cos(a) + 1j * sin(a)


cdef int _plan_init(DftPlan* p, int m, bint inverse) except -1:
    cdef Py_ssize_t M = (<Py_ssize_t> 1) << m
    cdef Py_ssize_t i, r, b
    cdef double sign = -1.0 if inverse else 1.0
    cdef double norm = 1.0 / sqrt(<double> M)
    p.M = M
    p.rev = <Py_ssize_t*> malloc(M * sizeof(Py_ssize_t))
    p.tw = <cplx*> malloc((M // 2 + 1) * sizeof(cplx))
    p.pre = <cplx*> malloc(M * sizeof(cplx))
    p.post = <cplx*> malloc(M * sizeof(cplx))
    p.tmp = <cplx*> malloc(M * sizeof(cplx))
    if not (p.rev and p.tw and p.pre and p.post and p.tmp):
        raise MemoryError()
    for i in range(M):
        r = 0
        for b in range(m):
            if i & ((<Py_ssize_t> 1) << b):
                r |= (<Py_ssize_t> 1) << (m - 1 - b)
        p.rev[i] = r
        p.pre[i] = _expi(sign * M_PI * i / M)
        p.post[i] = _expi(sign * M_PI * (i + 0.5) / M) * norm
    for i in range(M // 2 + 1):
        p.tw[i] = _expi(sign * 2.0 * M_PI * i / M)
    return 0


cdef void _plan_free(DftPlan* p) noexcept:
    free(p.rev)
    free(p.tw)
    free(p.pre)
    free(p.post)
    free(p.tmp)


cdef void _dft_block(DftPlan* p, cplx* x) noexcept nogil:
    # iterative radix-2 DIT on a bit-reversed copy
    cdef Py_ssize_t M = p.M
    cdef Py_ssize_t i, size, half, step, start, k
    cdef cplx a, b
    cdef cplx* t = p.tmp
    for i in range(M):
        t[p.rev[i]] = x[i] * p.pre[i]
    size = 2
    while size <= M:
        half = size >> 1
        step = M // size
        start = 0
        while start < M:
            for k in range(half):
                a = t[start + k]
                b = t[start + k + half] * p.tw[k * step]
                t[start + k] = a + b
                t[start + k + half] = a - b
            start += size
        size <<= 1
    for i in range(M):
        x[i] = t[i] * p.post[i]


cdef void _dft_row(DftPlan* p, cplx* row, Py_ssize_t D) noexcept nogil:
    cdef Py_ssize_t off = 0
    while off < D:
        _dft_block(p, row + off)
        off += p.M


cdef void _shift_row(const cplx* src, cplx* dst, int N, int n) noexcept nogil:
    cdef Py_ssize_t D = (<Py_ssize_t> 1) << N
    cdef int rest_bits = N - n
    cdef Py_ssize_t rest_mask = ((<Py_ssize_t> 1) << rest_bits) - 1
    cdef Py_ssize_t top_mask = ((<Py_ssize_t> 1) << n) - 1
    cdef Py_ssize_t i, top
    for i in range(D):
        top = i >> rest_bits
        top = ((top << 1) & top_mask) | (top >> (n - 1))
        dst[(top << rest_bits) | (i & rest_mask)] = src[i]


cdef void _gate_row(const cplx* src, cplx* dst, int N, int q,
                    cplx g00, cplx g01, cplx g10, cplx g11) noexcept nogil:
    cdef Py_ssize_t D = (<Py_ssize_t> 1) << N
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << (N - q)
    cdef Py_ssize_t base, j, i0, i1
    cdef cplx a, b
    base = 0
    while base < D:
        for j in range(stride):
            i0 = base + j
            i1 = i0 + stride
            a = src[i0]
            b = src[i1]
            dst[i0] = g00 * a + g01 * b
            dst[i1] = g10 * a + g11 * b
        base += 2 * stride


def centered_dft(const cplx[:, ::1] rows, int m, bint inverse=False):
    cdef Py_ssize_t K = rows.shape[0], D = rows.shape[1], k
    out = np.array(rows, dtype=np.complex128, copy=True)
    cdef cplx[:, ::1] o = out
    cdef DftPlan plan
    _plan_init(&plan, m, inverse)
    try:
        with nogil:
            for k in range(K):
                _dft_row(&plan, &o[k, 0], D)
    finally:
        _plan_free(&plan)
    return out


def shift(const cplx[:, ::1] rows, int N, int n):
    cdef Py_ssize_t K = rows.shape[0], k
    out = np.empty_like(np.asarray(rows))
    cdef cplx[:, ::1] o = out
    with nogil:
        for k in range(K):
            _shift_row(&rows[k, 0], &o[k, 0], N, n)
    return out


def apply_1q(const cplx[:, ::1] rows, int N, int q, gate):
    cdef const cplx[:, ::1] g = np.ascontiguousarray(gate, dtype=np.complex128)
    cdef Py_ssize_t K = rows.shape[0], k
    out = np.empty_like(np.asarray(rows))
    cdef cplx[:, ::1] o = out
    with nogil:
        for k in range(K):
            _gate_row(&rows[k, 0], &o[k, 0], N, q, g[0, 0], g[0, 1], g[1, 0], g[1, 1])
    return out


cdef int _baker_rows(const cplx[:, ::1] rows, cplx[:, ::1] out, int N, int n) except -1:
    cdef Py_ssize_t K = rows.shape[0], D = rows.shape[1], k, i
    cdef DftPlan inv_plan, fwd_plan
    cdef cplx* buf = <cplx*> malloc(D * sizeof(cplx))
    if not buf:
        raise MemoryError()
    _plan_init(&inv_plan, N - n, True)
    _plan_init(&fwd_plan, N - n + 1, False)
    try:
        with nogil:
            for k in range(K):
                for i in range(D):
                    buf[i] = rows[k, i]
                _dft_row(&inv_plan, buf, D)
                _shift_row(buf, &out[k, 0], N, n)
                _dft_row(&fwd_plan, &out[k, 0], D)
    finally:
        _plan_free(&inv_plan)
        _plan_free(&fwd_plan)
        free(buf)
    return 0


def baker(const cplx[:, ::1] rows, int N, int n):
    out = np.empty_like(np.asarray(rows))
    _baker_rows(rows, out, N, n)
    return out


def perturbed_step(const cplx[:, ::1] rows, int N, int n, u0, u1, int q):
    cdef Py_ssize_t K = rows.shape[0], D = rows.shape[1], k
    mapped_arr = np.empty_like(np.asarray(rows))
    cdef cplx[:, ::1] mapped = mapped_arr
    _baker_rows(rows, mapped, N, n)
    out = np.empty((2 * K, D), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef const cplx[:, ::1] a = np.ascontiguousarray(u0, dtype=np.complex128)
    cdef const cplx[:, ::1] b = np.ascontiguousarray(u1, dtype=np.complex128)
    with nogil:
        for k in range(K):
            _gate_row(&mapped[k, 0], &o[2 * k, 0], N, q, a[0, 0], a[0, 1], a[1, 0], a[1, 1])
            _gate_row(&mapped[k, 0], &o[2 * k + 1, 0], N, q, b[0, 0], b[0, 1], b[1, 0], b[1, 1])
    return out
