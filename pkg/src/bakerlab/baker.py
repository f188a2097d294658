"""Quantum baker's maps B_{N,n} on N qubits.

B_{N,n} = G_{n-1} o S_n o G_n^{-1}, where G_n is the identity on the first n
qubits tensored with the centered Fourier transform on the remaining N - n,
and S_n cyclically shifts the first n qubits one place to the left.
Circuit application goes through the kernels in ``bakerlab._kernels``;
dense matrices are built only as cross-check oracles and for matrix powers.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .qcore import DimensionMismatchError, PureState

DENSE_LIMIT = 12
UNITARY_TOL = 1e-10

# -i F_2: rotation by 90 degrees about x, up to the global phase e^{-i pi/4}
C_GATE = np.array(
    [[np.exp(-0.25j * np.pi), np.exp(0.25j * np.pi)],
     [np.exp(0.25j * np.pi), np.exp(-0.25j * np.pi)]],
) / np.sqrt(2)


@dataclass(frozen=True)
class BakerMap:
    N: int
    n: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 1 <= self.n <= self.N:
            raise ValueError(f"shift parameter n={self.n} outside 1..{self.N}")

    @property
    def dim(self):
        return 1 << self.N

    @property
    def is_extremal(self):
        return self.n == self.N


@dataclass(frozen=True, eq=False)
class DenseUnitary:
    entries: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.entries, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("unitary must be square")
        err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max deviation {err:.3e})")
        object.__setattr__(self, "entries", u)

    @property
    def dim(self):
        return self.entries.shape[0]

    def power(self, k):
        return np.linalg.matrix_power(self.entries, k)

    def apply(self, state):
        return PureState(state.n_qubits, self.entries @ state.amplitudes)


def _check_register(state, N):
    if state.n_qubits != N:
        raise DimensionMismatchError(f"state has {state.n_qubits} qubits, map acts on {N}")


def centered_fourier_apply(state, block_qubits, inverse=False):
    """Apply F_{2^m} (or its inverse) to the m least significant qubits.

    m = 0 multiplies by the scalar F_1 = i.
    """
    m = int(block_qubits)
    if not 0 <= m <= state.n_qubits:
        raise ValueError(f"block of {m} qubits on a {state.n_qubits}-qubit register")
    out = _kernels.centered_dft(state.amplitudes[None, :], m, inverse)[0]
    return PureState(state.n_qubits, out)


def shift_apply(state, n):
    """|x1 x2 ... xn> (x) rest -> |x2 ... xn x1> (x) rest."""
    N = state.n_qubits
    if not 1 <= n <= N:
        raise ValueError(f"shift length {n} outside 1..{N}")
    return PureState(N, _kernels.shift(state.amplitudes[None, :], N, n)[0])


def apply_rows(rows, bmap):
    """Apply B_{N,n} to every row of a (K, 2**N) array."""
    rows = np.atleast_2d(rows)
    if rows.shape[1] != bmap.dim:
        raise DimensionMismatchError(f"rows of length {rows.shape[1]} for a {bmap.N}-qubit map")
    return _kernels.baker(rows, bmap.N, bmap.n)


def baker_apply(state, bmap):
    _check_register(state, bmap.N)
    return PureState(bmap.N, apply_rows(state.amplitudes, bmap)[0])


# -- dense oracles -----------------------------------------------------------

def fourier_matrix(m, inverse=False):
    """F_{2^m} by direct kernel summation: e^{2 pi i (j+1/2)(k+1/2)/M} / sqrt(M)."""
    M = 1 << m
    j = np.arange(M) + 0.5
    F = np.exp(2j * np.pi * np.outer(j, j) / M) / np.sqrt(M)
    return F.conj().T if inverse else F


def shift_matrix(N, n):
    D = 1 << N
    S = np.zeros((D, D))
    S[_kernels._pure.shift_permutation(N, n), np.arange(D)] = 1.0
    return S


def _check_dense(N, limit):
    if N > limit:
        raise ValueError(f"dense construction limited to N <= {limit}, got N={N}")


@lru_cache(maxsize=32)
def _dense_entries(N, n):
    cols = apply_rows(np.eye(1 << N, dtype=np.complex128), BakerMap(N, n))
    out = np.ascontiguousarray(cols.T)
    out.setflags(write=False)
    return out


def baker_dense(bmap, limit=DENSE_LIMIT):
    """Explicit 2^N x 2^N matrix of B_{N,n}, built column by column."""
    _check_dense(bmap.N, limit)
    return DenseUnitary(_dense_entries(bmap.N, bmap.n))


def bvs_dense(N, limit=DENSE_LIMIT):
    """F_D o (1_2 (x) F_{D/2}^{-1}) assembled from explicit Fourier matrices."""
    _check_dense(N, limit)
    return fourier_matrix(N) @ np.kron(np.eye(2), fourier_matrix(N - 1, inverse=True))


def factorized_dense(bmap, limit=DENSE_LIMIT):
    """1_{2^{n-1}} (x) B_{N-n+1,1} o S_n built from the BVS construction."""
    N, n = bmap.N, bmap.n
    _check_dense(N, limit)
    return np.kron(np.eye(1 << (n - 1)), bvs_dense(N - n + 1, limit)) @ shift_matrix(N, n)


def partial_fourier_dense(N, n, inverse=False):
    """G_n = 1_{2^n} (x) F_{2^{N-n}}."""
    return np.kron(np.eye(1 << n), fourier_matrix(N - n, inverse))


# -- partially Fourier-transformed basis -------------------------------------

def _binary_fraction(bits):
    """0.b_1 b_2 ... b_k 1 as a float."""
    value = 0.0
    scale = 0.5
    for b in bits:
        value += scale * int(b)
        scale /= 2
    return value + scale


def pft_state(N, n, a_bits, x_bits):
    """|a_{N-n} ... a_1 . x_1 ... x_n> from its product-state form.

    ``a_bits`` is (a_1, ..., a_{N-n}) and ``x_bits`` is (x_1, ..., x_n), the
    bit strings fed to G_n as |x_1 ... x_n> (x) |a_1 ... a_{N-n}>.
    """
    a_bits, x_bits = tuple(a_bits), tuple(x_bits)
    if not 0 <= n <= N or len(x_bits) != n or len(a_bits) != N - n:
        raise ValueError(
            f"need {n} position bits and {N - n} momentum bits, got {len(x_bits)} and {len(a_bits)}"
        )
    m = N - n
    qubits = [np.eye(2)[x] for x in x_bits]
    for k in range(n + 1, N + 1):
        frac = _binary_fraction(a_bits[N - k:m])
        qubits.append(np.array([1.0, np.exp(2j * np.pi * frac)]) / np.sqrt(2))
    state = PureState.product(qubits)
    phase = np.exp(1j * np.pi * _binary_fraction(a_bits))
    return PureState(N, phase * state.amplitudes)


def pft_state_via_transform(N, n, a_bits, x_bits):
    """Same state as ``pft_state`` obtained by applying G_n to a basis state."""
    a_bits, x_bits = tuple(a_bits), tuple(x_bits)
    if not 0 <= n <= N or len(x_bits) != n or len(a_bits) != N - n:
        raise ValueError("bit-vector lengths do not match N and n")
    basis = PureState.from_bits(x_bits + a_bits)
    return centered_fourier_apply(basis, N - n)


def pft_image_labels(n, a_bits, x_bits):
    """Labels (n - 1, a', x') of the state that B_{N,n} maps |a . x> onto.

    The leading position bit x_1 moves across the dot and becomes a'_1.
    """
    x_bits = tuple(x_bits)
    return n - 1, (x_bits[0],) + tuple(a_bits), x_bits[1:]


def all_bit_strings(k):
    return [tuple((i >> (k - 1 - b)) & 1 for b in range(k)) for i in range(1 << k)]
