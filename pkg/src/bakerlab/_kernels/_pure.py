"""Reference numpy implementations of the hot kernels.

Every function takes a C-contiguous complex128 array of shape (K, 2**N)
whose rows are state vectors and returns a new array. Qubit 1 is the most
significant bit of the row index.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _dft_phases(m, inverse):
    M = 1 << m
    j = np.arange(M)
    sign = -1.0 if inverse else 1.0
    pre = np.exp(sign * 1j * np.pi * j / M)
    post = np.exp(sign * 1j * np.pi * (j + 0.5) / M) / np.sqrt(M)
    return pre, post


@lru_cache(maxsize=64)
def shift_permutation(N, n):
    """Destination index of every basis index under the n-qubit cyclic shift."""
    idx = np.arange(1 << N)
    rest_bits = N - n
    top = idx >> rest_bits
    rest = idx & ((1 << rest_bits) - 1)
    mask = (1 << n) - 1
    top = ((top << 1) & mask) | (top >> (n - 1))
    return (top << rest_bits) | rest


def centered_dft(rows, m, inverse=False):
    K, D = rows.shape
    M = 1 << m
    pre, post = _dft_phases(m, bool(inverse))
    blk = rows.reshape(K, D // M, M) * pre
    if inverse:
        out = np.fft.fft(blk, axis=-1)
    else:
        out = np.fft.ifft(blk, axis=-1) * M
    out *= post
    return np.ascontiguousarray(out.reshape(K, D))


def shift(rows, N, n):
    out = np.empty_like(rows)
    out[:, shift_permutation(N, n)] = rows
    return out


def apply_1q(rows, N, q, gate):
    K = rows.shape[0]
    view = rows.reshape(K, 1 << (q - 1), 2, 1 << (N - q))
    out = np.einsum("ab,kxby->kxay", gate, view, optimize=False)
    return np.ascontiguousarray(out.reshape(K, 1 << N))


def baker(rows, N, n):
    m = N - n
    tmp = centered_dft(rows, m, inverse=True)
    tmp = shift(tmp, N, n)
    return centered_dft(tmp, m + 1, inverse=False)


def perturbed_step(rows, N, n, u0, u1, q):
    """One map iteration followed by both perturbation branches.

    Output row 2*k + b holds U_b B rows[k].
    """
    mapped = baker(rows, N, n)
    out = np.empty((2 * rows.shape[0], rows.shape[1]), dtype=np.complex128)
    out[0::2] = apply_1q(mapped, N, q, u0)
    out[1::2] = apply_1q(mapped, N, q, u1)
    return out
