"""Binary stochastic perturbations and the ensemble of all 2^t histories.

History index k encodes the perturbation choices of a trajectory: the
choice made at step 1 is the most significant of the t bits of k, so the
state at index k is U_{k_t} B ... U_{k_1} B psi_0 with k = k_1 k_2 ... k_t.
"""
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .baker import BakerMap, apply_rows
from .qcore import DensityMatrix, DimensionMismatchError, PureState, mixture_matrix

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)

KINDS = ("y-rotation-middle", "x-flip-rightmost", "custom-single-qubit")
DEFAULT_MEMORY_BUDGET = 2 * 1024**3
CHUNK_ROWS = 1 << 14
NORM_DRIFT_TOL = {"double": 1e-10, "single": 1e-5}
_DTYPES = {"double": np.complex128, "single": np.complex64}


class MemoryBudgetError(MemoryError):
    pass


class NormDriftError(RuntimeError):
    pass


def pauli_rotation(pauli, angle):
    """exp(i angle pauli) = cos(angle) 1 + i sin(angle) pauli."""
    return np.cos(angle) * np.eye(2) + 1j * np.sin(angle) * pauli


@dataclass(frozen=True)
class PerturbationSpec:
    """Single-qubit binary perturbation {U_0, U_1}.

    ``target_qubit`` is 1-based with qubit 1 most significant; ``None`` lets
    the kind pick it (middle or rightmost qubit). ``gates`` holds (U_0, U_1)
    for the custom kind.
    """

    kind: str
    alpha: float = 0.0
    target_qubit: int | None = None
    gates: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "custom-single-qubit":
            if self.gates is None or len(self.gates) != 2:
                raise ValueError("custom perturbation needs gates=(U0, U1)")
            for g in self.gates:
                g = np.asarray(g, dtype=np.complex128)
                if g.shape != (2, 2) or np.abs(g.conj().T @ g - np.eye(2)).max() > 1e-12:
                    raise ValueError("custom perturbation gates must be 2x2 unitaries")

    @classmethod
    def y_rotation_middle(cls, alpha):
        return cls("y-rotation-middle", alpha)

    @classmethod
    def x_flip_rightmost(cls):
        return cls("x-flip-rightmost")

    @classmethod
    def custom(cls, target_qubit, u0, u1):
        return cls("custom-single-qubit", 0.0, target_qubit, (np.asarray(u0), np.asarray(u1)))

    def target(self, N):
        if self.kind == "y-rotation-middle":
            if N % 2 == 0:
                raise ValueError(f"middle-qubit perturbation needs odd N, got N={N}")
            middle = (N + 1) // 2
            if self.target_qubit not in (None, middle):
                raise ValueError(f"middle-qubit perturbation must target qubit {middle}")
            return middle
        q = N if self.target_qubit is None else int(self.target_qubit)
        if self.kind == "x-flip-rightmost" and q != N:
            raise ValueError("x-flip-rightmost must target the last qubit")
        if not 1 <= q <= N:
            raise ValueError(f"target qubit {q} outside 1..{N}")
        return q

    def gate(self, k):
        """2x2 unitary applied for perturbation choice k in {0, 1}."""
        if k not in (0, 1):
            raise ValueError("binary perturbation index must be 0 or 1")
        if self.kind == "y-rotation-middle":
            return pauli_rotation(PAULI_Y, np.pi * (-1) ** k * self.alpha)
        if self.kind == "x-flip-rightmost":
            return PAULI_X.copy() if k else np.eye(2, dtype=np.complex128)
        return np.asarray(self.gates[k], dtype=np.complex128)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha, "target_qubit": self.target_qubit}


def embed_single_qubit(gate, N, q):
    return np.kron(np.kron(np.eye(1 << (q - 1)), gate), np.eye(1 << (N - q)))


def perturbation_unitary(spec, k, N):
    """Dense 2^N x 2^N embedding of U_k at the perturbation's target qubit."""
    return embed_single_qubit(spec.gate(k), N, spec.target(N))


def apply_gate(state, gate, q):
    return PureState(state.n_qubits, _kernels.apply_1q(state.amplitudes[None, :], state.n_qubits, q, gate)[0])


@dataclass(frozen=True, eq=False)
class HistoryEnsemble:
    """All 2^t trajectory endpoints, uniformly weighted."""

    N: int
    t: int
    states: np.ndarray
    precision: str = "double"

    def __post_init__(self):
        states = np.asarray(self.states)
        if states.shape != (1 << self.t, 1 << self.N):
            raise ValueError(
                f"expected states of shape {(1 << self.t, 1 << self.N)}, got {states.shape}"
            )
        if states.flags.writeable:
            states = states.copy()
            states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return self.states.shape[0]

    @property
    def dim(self):
        return 1 << self.N

    @property
    def weight(self):
        return 2.0 ** -self.t

    def state(self, k):
        return PureState(self.N, self.states[k].astype(np.complex128))

    def rows(self):
        return self.states.astype(np.complex128, copy=False)

    def history_bits(self, k):
        return tuple((k >> (self.t - 1 - i)) & 1 for i in range(self.t))


def required_bytes(N, t, precision="double"):
    return (1 << t) * (1 << N) * np.dtype(_DTYPES[precision]).itemsize


def check_budget(N, t, precision="double", memory_budget=DEFAULT_MEMORY_BUDGET):
    need = required_bytes(N, t, precision)
    if need > memory_budget:
        raise MemoryBudgetError(
            f"2^{t} histories x 2^{N} amplitudes = {(1 << t) * (1 << N)} complex values "
            f"({need} bytes) exceeds the memory budget of {memory_budget} bytes"
        )


def _thread_count(threads):
    if threads is None:
        threads = int(os.environ.get("BAKERLAB_THREADS", 0)) or os.cpu_count() or 1
    return max(1, int(threads))


def _step(rows, bmap, u0, u1, q, dtype, threads):
    chunks = [rows[i:i + CHUNK_ROWS] for i in range(0, rows.shape[0], CHUNK_ROWS)]

    def work(chunk):
        return _kernels.perturbed_step(chunk, bmap.N, bmap.n, u0, u1, q).astype(dtype, copy=False)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def evolve_rows(rows, bmap, spec, steps, precision="double", threads=None):
    """Advance every row through ``steps`` perturbed iterations.

    The result has 2^steps times as many rows; row (k << steps) | h holds
    history h applied after input row k.
    """
    dtype = _DTYPES[precision]
    q = spec.target(bmap.N)
    u0, u1 = spec.gate(0), spec.gate(1)
    threads = _thread_count(threads)
    rows = np.asarray(rows)
    for _ in range(steps):
        rows = _step(rows, bmap, u0, u1, q, dtype, threads)
    return rows.astype(dtype, copy=False)


def _check_norms(rows, precision):
    norms = np.sqrt(np.einsum("ij,ij->i", rows.real, rows.real) + np.einsum("ij,ij->i", rows.imag, rows.imag))
    drift = float(np.abs(norms - 1.0).max(initial=0.0))
    if drift > NORM_DRIFT_TOL[precision]:
        raise NormDriftError(f"history norm drifted by {drift:.3e}")


def evolve_histories(psi0, bmap, spec, t, precision="double",
                     memory_budget=DEFAULT_MEMORY_BUDGET, threads=None):
    """Ensemble of U_{k_t} B ... U_{k_1} B psi0 over all binary histories k."""
    if t < 0:
        raise ValueError("number of steps must be >= 0")
    if psi0.n_qubits != bmap.N:
        raise DimensionMismatchError(f"initial state has {psi0.n_qubits} qubits, map has {bmap.N}")
    if precision not in _DTYPES:
        raise ValueError(f"precision must be 'double' or 'single', got {precision!r}")
    spec.target(bmap.N)
    check_budget(bmap.N, t, precision, memory_budget)
    rows = evolve_rows(psi0.amplitudes[None, :], bmap, spec, t, precision, threads)
    _check_norms(rows, precision)
    return HistoryEnsemble(bmap.N, t, rows, precision)


def extend_histories(ensemble, bmap, spec, steps=1,
                     memory_budget=DEFAULT_MEMORY_BUDGET, threads=None):
    """Evolve an existing ensemble ``steps`` more iterations."""
    check_budget(ensemble.N, ensemble.t + steps, ensemble.precision, memory_budget)
    rows = evolve_rows(ensemble.states, bmap, spec, steps, ensemble.precision, threads)
    _check_norms(rows, ensemble.precision)
    return HistoryEnsemble(ensemble.N, ensemble.t + steps, rows, ensemble.precision)


def reduced_state(ensemble):
    """Uniform mixture of the ensemble, the system state with the environment traced out."""
    rows = ensemble.rows()
    rho = mixture_matrix(rows)
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def unperturbed_orbit(psi0, bmap, t):
    rows = [psi0.amplitudes]
    for _ in range(t):
        rows.append(apply_rows(rows[-1], bmap)[0])
    return np.array(rows)


# -- BKE1 snapshot format ----------------------------------------------------

_MAGIC = b"BKE1"
_HEADER = struct.Struct("<III")


def save_ensemble(path, ensemble):
    """Write magic "BKE1", little-endian u32 N, t, precision flag, then amplitudes."""
    flag = 0 if ensemble.precision == "double" else 1
    dtype = "<c16" if flag == 0 else "<c8"
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_HEADER.pack(ensemble.N, ensemble.t, flag))
        fh.write(np.ascontiguousarray(ensemble.states, dtype=dtype).tobytes())


def load_ensemble(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a BKE1 ensemble snapshot")
        N, t, flag = _HEADER.unpack(fh.read(_HEADER.size))
        if flag not in (0, 1):
            raise ValueError(f"{path}: unknown precision flag {flag}")
        dtype = "<c16" if flag == 0 else "<c8"
        count = (1 << t) * (1 << N)
        data = np.frombuffer(fh.read(), dtype=dtype)
    if data.size != count:
        raise ValueError(f"{path}: expected {count} amplitudes, found {data.size}")
    precision = "double" if flag == 0 else "single"
    states = data.astype(_DTYPES[precision]).reshape(1 << t, 1 << N)
    return HistoryEnsemble(N, t, states, precision)
