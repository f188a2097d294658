"""Entropy growth under stochastic perturbation and fidelity decay under a
fixed modified map."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .baker import apply_rows
from .perturb import (
    DEFAULT_MEMORY_BUDGET,
    check_budget,
    evolve_rows,
    reduced_state,
    HistoryEnsemble,
)
from .qcore import DimensionMismatchError, von_neumann_entropy


@dataclass(frozen=True)
class SignalSeries:
    label: str
    points: tuple

    def __post_init__(self):
        pts = tuple((int(t), float(v)) for t, v in self.points)
        ts = [t for t, _ in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("series steps must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def steps(self):
        return np.array([t for t, _ in self.points])

    @property
    def values(self):
        return np.array([v for _, v in self.points])

    def __len__(self):
        return len(self.points)


def entropy_growth(psi0, bmap, spec, t_max, precision="double",
                   memory_budget=DEFAULT_MEMORY_BUDGET, threads=None, label=None):
    """System entropy H_S(t) of the traced-out ensemble for t = 0 .. t_max."""
    if psi0.n_qubits != bmap.N:
        raise DimensionMismatchError("initial state and map act on different registers")
    spec.target(bmap.N)
    check_budget(bmap.N, t_max, precision, memory_budget)
    rows = psi0.amplitudes[None, :].astype(np.complex128)
    points = []
    for t in range(t_max + 1):
        if t:
            rows = evolve_rows(rows, bmap, spec, 1, precision, threads)
        ens = HistoryEnsemble(bmap.N, t, rows, precision)
        points.append((t, von_neumann_entropy(reduced_state(ens))))
    return SignalSeries(label or f"entropy N={bmap.N} n={bmap.n}", tuple(points))


def fidelity_decay(psi0, bmap, spec=None, t_max=0, fixed_gate=None, label=None):
    """F(t) = |<psi0| (B^dag U^dag)^t B^t |psi0>|^2 for t = 0 .. t_max.

    By default U is the perturbation U_1 of ``spec`` (the all-ones history).
    ``fixed_gate=(gate, qubit)`` substitutes an arbitrary single-qubit U.
    """
    if psi0.n_qubits != bmap.N:
        raise DimensionMismatchError("initial state and map act on different registers")
    if fixed_gate is not None:
        gate, q = fixed_gate
        gate = np.asarray(gate, dtype=np.complex128)
        if not 1 <= q <= bmap.N:
            raise ValueError(f"target qubit {q} outside 1..{bmap.N}")
    elif spec is not None:
        gate, q = spec.gate(1), spec.target(bmap.N)
    else:
        raise ValueError("need a perturbation spec or a fixed gate")
    plain = psi0.amplitudes[None, :].astype(np.complex128)
    modified = plain.copy()
    points = [(0, 1.0)]
    for t in range(1, t_max + 1):
        plain = apply_rows(plain, bmap)
        modified = _kernels.apply_1q(apply_rows(modified, bmap), bmap.N, q, gate)
        amp = np.vdot(modified[0], plain[0])
        points.append((t, min(float(abs(amp) ** 2), 1.0)))
    return SignalSeries(label or f"fidelity N={bmap.N} n={bmap.n}", tuple(points))


def loglinear_fit(series, t_max=None):
    """Least-squares fit of log F(t) against t; returns (slope, r_squared)."""
    t = series.steps.astype(float)
    v = series.values
    keep = t <= (t.max() if t_max is None else t_max)
    t, y = t[keep], np.log(v[keep])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    total = ((y - y.mean()) ** 2).sum()
    r2 = 1.0 - (resid ** 2).sum() / total if total > 0 else 1.0
    return float(slope), float(r2)
