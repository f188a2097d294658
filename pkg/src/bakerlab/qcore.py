"""State and operator types, ensemble-to-density reduction, entropy and
overlap primitives.

Basis index j of an N-qubit register encodes qubit values as
j = sum_l x_l 2**(N - l), so qubit 1 is the most significant bit.
Entropies are in bits.
"""
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10


class InvalidStateError(ValueError):
    pass


class InvalidDensityError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


def _freeze(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidStateError("n_qubits must be >= 1")
        amps = _freeze(self.amplitudes).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise InvalidStateError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state not normalized: |psi|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self):
        return 1 << self.n_qubits

    @classmethod
    def basis(cls, n_qubits, index):
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_bits(cls, bits):
        """Product basis state |x_1 x_2 ... x_N>."""
        index = 0
        for b in bits:
            index = (index << 1) | int(b)
        return cls.basis(len(bits), index)

    @classmethod
    def zeros(cls, n_qubits):
        return cls.basis(n_qubits, 0)

    @classmethod
    def product(cls, qubit_states):
        """Tensor product of single-qubit vectors, qubit 1 first."""
        amps = np.ones(1, dtype=np.complex128)
        for q in qubit_states:
            amps = np.kron(amps, np.asarray(q, dtype=np.complex128))
        return cls(len(qubit_states), amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    entries: np.ndarray

    def __post_init__(self):
        rho = _freeze(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDensityError("density matrix must be square")
        scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
        if np.abs(rho - rho.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
            raise InvalidDensityError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidDensityError(f"trace {tr!r} deviates from 1")
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self):
        return self.entries.shape[0]

    def spectrum(self):
        return Spectrum.from_hermitian(self.entries)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order, clamped to [0, 1]."""

    eigenvalues: np.ndarray

    @classmethod
    def from_hermitian(cls, matrix):
        return cls(clamp_eigenvalues(np.linalg.eigvalsh(matrix))[::-1].copy())

    @property
    def total(self):
        return float(self.eigenvalues.sum())


def clamp_eigenvalues(vals, tol=NEGATIVE_EIG_TOL):
    """Clamp tiny negative eigenvalues to zero; reject larger negatives."""
    vals = np.asarray(vals, dtype=float)
    if vals.size and vals.min() < -tol:
        raise InvalidDensityError(f"negative eigenvalue {vals.min()!r}")
    return np.clip(vals, 0.0, 1.0)


def shannon_bits(p):
    """-sum p log2 p over the trailing axis, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def entropy_from_eigenvalues(vals):
    return float(shannon_bits(clamp_eigenvalues(vals)))


def von_neumann_entropy(rho):
    """Entropy of a density matrix in bits."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    ent = entropy_from_eigenvalues(np.linalg.eigvalsh(rho.entries))
    return min(max(ent, 0.0), np.log2(rho.dim) + 1e-9)


def state_rows(states):
    """Stack states (PureState objects or raw vectors) into a (K, D) array."""
    if isinstance(states, np.ndarray):
        rows = np.atleast_2d(states)
    else:
        states = list(states)
        if not states:
            raise ValueError("empty state list")
        dims = {s.dim if isinstance(s, PureState) else len(s) for s in states}
        if len(dims) != 1:
            raise DimensionMismatchError(f"states have differing dimensions {sorted(dims)}")
        rows = np.stack(
            [s.amplitudes if isinstance(s, PureState) else np.asarray(s) for s in states]
        )
    if rows.shape[0] == 0:
        raise ValueError("empty state list")
    return rows


def mixture_matrix(rows, weights=None):
    """sum_k w_k |psi_k><psi_k| as a raw (D, D) array; uniform weights by default."""
    rows = np.asarray(rows)
    if weights is None:
        return (rows.T @ rows.conj()) / rows.shape[0]
    w = np.asarray(weights, dtype=float)
    return (rows.T * w) @ rows.conj()


def density_from_states(states, weights=None):
    """Weighted mixture of pure states."""
    rows = state_rows(states)
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (rows.shape[0],):
            raise ValueError("one weight per state required")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
    rho = mixture_matrix(rows.astype(np.complex128), weights)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def overlap(a, b):
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError("overlap of states on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
