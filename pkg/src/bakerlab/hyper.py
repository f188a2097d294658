"""Hypersensitivity to perturbation: grouping measurements on the
perturbation record, the information-entropy trade-off and the parameter s.

A grouping partitions the uniformly weighted states psi_k into sets K_r.
Outcome r has probability p_r = |K_r| / count and leaves the system in the
uniform mixture of its group. Every reported information value is an upper
bound on the true minimum, since only grouping measurements are searched.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .qcore import clamp_eigenvalues, mixture_matrix, shannon_bits

EXHAUSTIVE_CAP = 24
ONE_BIT_BAND = (0.99, 1.01)
_EIG_FLOOR = 1e-12


class UndefinedSError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    """Uniformly weighted collection of state vectors (rows)."""

    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states))
        if states.shape[0] == 0:
            raise ValueError("empty ensemble")
        object.__setattr__(self, "states", states)

    def __len__(self):
        return self.states.shape[0]

    @property
    def dim(self):
        return self.states.shape[1]

    def rows(self):
        return self.states.astype(np.complex128, copy=False)


def _rows(ensemble):
    if isinstance(ensemble, np.ndarray):
        return np.atleast_2d(ensemble).astype(np.complex128, copy=False)
    return ensemble.rows()


def _spectrum_entropy(mats):
    """Entropies in bits of a stack of Hermitian unit-trace matrices."""
    mats = np.asarray(mats)
    mats = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    vals = np.linalg.eigvalsh(mats)
    return shannon_bits(clamp_eigenvalues(vals, tol=1e-9))


def mixture_entropy(rows):
    """Entropy of the uniform mixture of ``rows``, diagonalizing the smaller of
    the Gram matrix and the density matrix (same nonzero spectrum)."""
    rows = np.asarray(rows)
    K, D = rows.shape
    if K < D:
        return float(_spectrum_entropy(rows.conj() @ rows.T / K))
    return float(_spectrum_entropy(mixture_matrix(rows)))


def system_entropy(ensemble):
    return mixture_entropy(_rows(ensemble))


def _equal_group_entropies(grouped):
    """Entropies of G equal-size groups given as an array (G, s, D)."""
    G, s, D = grouped.shape
    if s < D:
        mats = grouped.conj() @ np.swapaxes(grouped, 1, 2) / s
    else:
        mats = np.swapaxes(grouped, 1, 2) @ grouped.conj() / s
    return _spectrum_entropy(mats)


def group_entropies(rows, labels):
    """Probabilities and entropies of the groups induced by integer labels."""
    labels = np.asarray(labels)
    ids, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    probs = counts / labels.size
    if counts.min() == counts.max():
        order = np.argsort(inverse, kind="stable")
        grouped = rows[order].reshape(ids.size, counts[0], rows.shape[1])
        ents = _equal_group_entropies(grouped)
    else:
        ents = np.array([mixture_entropy(rows[inverse == g]) for g in range(ids.size)])
    return probs, np.asarray(ents, dtype=float)


@dataclass(frozen=True, eq=False)
class GroupingReport:
    assignment: np.ndarray
    group_probs: np.ndarray
    group_entropies: np.ndarray
    avg_entropy: float
    info: float
    system_entropy: float | None = None
    method: str = "explicit"
    # searches cover grouping measurements only, so info is an upper bound on I_min
    bound: str = "upper"

    @property
    def n_groups(self):
        return len(self.group_probs)

    @property
    def entropy_reduction(self):
        if self.system_entropy is None:
            return None
        return self.system_entropy - self.avg_entropy


def _labels_from_assignment(assignment, count):
    items = list(assignment) if not isinstance(assignment, np.ndarray) else None
    if items is not None and items and not np.isscalar(items[0]):
        labels = np.full(count, -1, dtype=np.int64)
        for r, group in enumerate(items):
            for k in group:
                if not 0 <= k < count:
                    raise ValueError(f"history {k} outside 0..{count - 1}")
                if labels[k] != -1:
                    raise ValueError(f"history {k} assigned to more than one group")
                labels[k] = r
    else:
        labels = np.asarray(assignment, dtype=np.int64).reshape(-1)
        if labels.size != count:
            raise ValueError(f"assignment covers {labels.size} histories, ensemble has {count}")
    if (labels < 0).any():
        raise ValueError(f"history {int(np.argmax(labels < 0))} is not assigned to any group")
    return labels


def grouping_stats(ensemble, assignment, method="explicit"):
    """p_r, H_r, average entropy and information of a grouping.

    ``assignment`` is either one group id per history or a sequence of
    disjoint index collections covering every history.
    """
    rows = _rows(ensemble)
    labels = _labels_from_assignment(assignment, rows.shape[0])
    probs, ents = group_entropies(rows, labels)
    return GroupingReport(
        assignment=labels,
        group_probs=probs,
        group_entropies=ents,
        avg_entropy=float(probs @ ents),
        info=float(shannon_bits(probs)),
        system_entropy=mixture_entropy(rows),
        method=method,
    )


# -- temporal grouping -------------------------------------------------------

class TemporalResult(NamedTuple):
    best_H: float
    chosen_steps: tuple


def temporal_labels(t, steps):
    """Group id of every history when the perturbations at ``steps`` (1-based) are recorded."""
    k = np.arange(1 << t)
    labels = np.zeros(1 << t, dtype=np.int64)
    for s in steps:
        labels = (labels << 1) | ((k >> (t - s)) & 1)
    return labels


def _temporal_avg_entropy(tensor, t, steps):
    l = len(steps)
    D = tensor.shape[-1]
    if l == 0:
        return mixture_entropy(tensor.reshape(-1, D))
    rest = [a for a in range(t) if a + 1 not in steps]
    axes = [s - 1 for s in steps] + rest + [t]
    grouped = tensor.transpose(axes).reshape(1 << l, 1 << (t - l), D)
    return float(_equal_group_entropies(grouped).mean())


def temporal_scan(ensemble, l):
    """Average entropy for every choice of l recorded steps, in lexicographic order."""
    t = ensemble.t
    if not 0 <= l <= t:
        raise ValueError(f"number of recorded steps l={l} outside 0..{t}")
    rows = ensemble.rows()
    tensor = rows.reshape((2,) * t + (rows.shape[1],))
    for steps in combinations(range(1, t + 1), l):
        yield steps, _temporal_avg_entropy(tensor, t, steps)


def temporal_grouping(ensemble, l):
    """Minimum average entropy over all C(t, l) choices of recorded steps.

    Ties go to the lexicographically smallest step tuple.
    """
    best = None
    for steps, h in temporal_scan(ensemble, l):
        if best is None or h < best[0] - 1e-12:
            best = (h, steps)
    return TemporalResult(best[0], best[1])


# -- bipartition search ------------------------------------------------------

@dataclass(frozen=True)
class GAConfig:
    population: int = 64
    tournament: int = 3
    crossover_p: float = 0.5
    mutation_rate: float | None = None  # None: 1 / count
    elitism: int = 2
    generations: int = 500
    stagnation: int = 50
    polish: bool = True
    polish_iters: int = 25
    halfspace_seeds: int = 8


class _BipartitionFitness:
    """Average entropy of (mask, ~mask) splits, evaluated in batches."""

    def __init__(self, rows):
        self.rows = rows
        self.count, self.dim = rows.shape
        self.total = rows.T @ rows.conj()
        self.use_table = self.count * self.dim ** 2 <= (1 << 23)
        if self.use_table:
            self.table = np.einsum("ki,kj->kij", rows, rows.conj()).reshape(self.count, -1)

    def _sums(self, masks):
        if self.use_table:
            return (masks.astype(np.complex128) @ self.table).reshape(-1, self.dim, self.dim)
        return np.stack([self.rows[m].T @ self.rows[m].conj() for m in masks])

    def __call__(self, masks):
        masks = np.atleast_2d(masks).astype(bool)
        n1 = masks.sum(axis=1)
        n0 = self.count - n1
        m1 = self._sums(masks)
        m0 = self.total[None] - m1
        out = np.empty(masks.shape[0])
        for i in range(masks.shape[0]):
            h = 0.0
            for mat, n in ((m0[i], n0[i]), (m1[i], n1[i])):
                if n:
                    h += n * float(_spectrum_entropy(mat / n))
            out[i] = h / self.count
        return out

    def group_logs(self, mask):
        """log2 of both group densities, with eigenvalues floored."""
        logs = []
        for sel in (~mask, mask):
            n = int(sel.sum())
            if n == 0:
                logs.append(None)
                continue
            rho = self.rows[sel].T @ self.rows[sel].conj() / n
            vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
            logs.append((vecs * np.log2(np.maximum(vals, _EIG_FLOOR))) @ vecs.conj().T)
        return logs

    def polish(self, mask, fitness, iters):
        """Alternate reassignment: each state joins the group whose density
        gives it the smaller cross-entropy -<psi|log rho_r|psi>."""
        best_mask, best_fit = mask, fitness
        for _ in range(iters):
            logs = self.group_logs(best_mask)
            if logs[0] is None or logs[1] is None:
                break
            costs = [-np.einsum("ki,ij,kj->k", self.rows.conj(), L, self.rows).real for L in logs]
            new = costs[1] < costs[0]
            if new.all() or not new.any() or np.array_equal(new, best_mask):
                break
            fit = float(self(new[None])[0])
            if fit >= best_fit - 1e-15:
                break
            best_mask, best_fit = new, fit
        return best_mask, best_fit


def _canonical(mask):
    return ~mask if mask[0] else mask


def halfspace_masks(rows, n_seeds, rng):
    """Splits by closeness to one of two orthogonal half-dimensional subspaces:
    the top/bottom eigenspaces of the mixture, then random bases."""
    D = rows.shape[1]
    half = D // 2
    if half == 0:
        return []
    bases = []
    vals, vecs = np.linalg.eigh(mixture_matrix(rows))
    bases.append(vecs[:, ::-1])
    for _ in range(max(0, n_seeds - 1)):
        z = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
        q, r = np.linalg.qr(z)
        bases.append(q * (np.diag(r) / np.abs(np.diag(r))))
    masks = []
    for basis in bases:
        amp = np.abs(rows.conj() @ basis) ** 2
        masks.append(amp[:, :half].sum(axis=1) > amp[:, half:].sum(axis=1))
    return masks


def _report_from_mask(rows, mask, method, h_s=None):
    labels = mask.astype(np.int64)
    probs, ents = group_entropies(rows, labels)
    return GroupingReport(
        assignment=labels,
        group_probs=probs,
        group_entropies=ents,
        avg_entropy=float(probs @ ents),
        info=float(shannon_bits(probs)),
        system_entropy=mixture_entropy(rows) if h_s is None else h_s,
        method=method,
    )


def genetic_bipartition(ensemble, config=None, seed=0, extra_seeds=()):
    """Two-group split minimizing the average entropy, by a genetic search.

    Initial population: random masks, every temporal one-step split when the
    ensemble carries a history length ``t``, half-space splits, and any
    caller-provided masks. Group sizes are unconstrained.
    """
    config = config or GAConfig()
    rows = _rows(ensemble)
    count = rows.shape[0]
    if count < 2:
        raise ValueError("need at least two states to bipartition")
    h_s = mixture_entropy(rows)
    if h_s < 1e-12:
        mask = np.zeros(count, dtype=bool)
        mask[count // 2:] = True
        return _report_from_mask(rows, mask, "genetic", h_s)

    fitness = _BipartitionFitness(rows)
    init_rng = np.random.default_rng([seed, 0xFFFF])
    seeds = [np.asarray(m, dtype=bool) for m in extra_seeds]
    t = getattr(ensemble, "t", None)
    if t is not None and (1 << t) == count:
        seeds += [temporal_labels(t, (s,)).astype(bool) for s in range(1, t + 1)]
    seeds += halfspace_masks(rows, config.halfspace_seeds, init_rng)
    seeds = [_canonical(m) for m in seeds if 0 < m.sum() < count]

    pop_size = max(config.population, config.elitism + 1)
    pop = np.zeros((pop_size, count), dtype=bool)
    n_seed = min(len(seeds), pop_size)
    pop[:n_seed] = seeds[:n_seed]
    pop[n_seed:] = init_rng.random((pop_size - n_seed, count)) < 0.5
    pop[:, 0] = False
    fit = fitness(pop)
    if config.polish:
        for i in np.argsort(fit, kind="stable")[: max(config.elitism, 1)]:
            m, f = fitness.polish(pop[i], fit[i], config.polish_iters)
            pop[i], fit[i] = _canonical(m), f

    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / count
    best_fit = float(fit.min())
    stagnant = 0
    for gen in range(1, config.generations + 1):
        order = np.argsort(fit, kind="stable")
        children = [pop[i].copy() for i in order[: config.elitism]]
        child_fit = [fit[i] for i in order[: config.elitism]]
        for idx in range(config.elitism, pop_size):
            rng = np.random.default_rng([seed, gen, idx])
            parents = []
            for _ in range(2):
                entrants = rng.integers(0, pop_size, size=config.tournament)
                parents.append(pop[entrants[np.argmin(fit[entrants])]])
            take = rng.random(count) < config.crossover_p
            child = np.where(take, parents[0], parents[1])
            child ^= rng.random(count) < rate
            children.append(_canonical(child))
        pop = np.array(children)
        new_fit = np.empty(pop_size)
        new_fit[: config.elitism] = child_fit
        new_fit[config.elitism:] = fitness(pop[config.elitism:])
        fit = new_fit
        if config.polish:
            i = int(np.argmin(fit))
            m, f = fitness.polish(pop[i], fit[i], config.polish_iters)
            pop[i], fit[i] = _canonical(m), f
        current = float(fit.min())
        if current < best_fit - 1e-13:
            best_fit, stagnant = current, 0
        else:
            stagnant += 1
            if stagnant >= config.stagnation:
                break
    best = pop[int(np.argmin(fit))]
    return _report_from_mask(rows, best, "genetic", h_s)


def exhaustive_bipartition(ensemble, chunk=4096):
    """Global minimum of the average entropy over all two-group splits."""
    rows = _rows(ensemble)
    count = rows.shape[0]
    if count > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive search capped at {EXHAUSTIVE_CAP} states, got {count}")
    if count < 2:
        raise ValueError("need at least two states to bipartition")
    fitness = _BipartitionFitness(rows)
    # history 0 stays in group 0; codes 1 .. 2^(count-1) - 1
    n_codes = (1 << (count - 1)) - 1
    shifts = np.arange(count - 1, dtype=np.int64)
    best_fit, best_code = np.inf, None
    for start in range(1, n_codes + 1, chunk):
        codes = np.arange(start, min(start + chunk, n_codes + 1), dtype=np.int64)
        masks = np.zeros((codes.size, count), dtype=bool)
        masks[:, 1:] = (codes[:, None] >> shifts) & 1
        fit = fitness(masks)
        i = int(np.argmin(fit))
        if fit[i] < best_fit - 1e-13:
            best_fit, best_code = float(fit[i]), int(codes[i])
    mask = np.zeros(count, dtype=bool)
    mask[1:] = (best_code >> shifts) & 1
    return _report_from_mask(rows, mask, "exhaustive")


# -- trade-off curve and s ---------------------------------------------------

def s_parameter(h_s, h_at_one_bit):
    """1 / (H_S - H(I=1)): inverse entropy reduction bought by one bit."""
    gap = h_s - h_at_one_bit
    if not gap > 0:
        raise UndefinedSError(
            f"s undefined: one bit of information buys no entropy reduction (H_S - H = {gap!r})"
        )
    return 1.0 / gap


@dataclass(frozen=True)
class TradeoffPoint:
    I: float
    H: float
    method: str
    flagged: bool = False


@dataclass
class TradeoffCurve:
    H_S: float
    points: list
    s: float | None = None
    s_method: str | None = None
    ensemble_meta: dict = field(default_factory=dict)

    def by_method(self, method):
        return sorted((p for p in self.points if p.method == method), key=lambda p: p.I)

    def to_dict(self):
        return {
            "H_S": self.H_S,
            "points": [
                {"I": p.I, "H": p.H, "method": p.method, **({"flagged": True} if p.flagged else {})}
                for p in self.points
            ],
            "s": self.s,
            "s_method": self.s_method,
            "bound": "upper",
            "ensemble_meta": dict(self.ensemble_meta),
        }

    @classmethod
    def from_dict(cls, data):
        points = [
            TradeoffPoint(float(p["I"]), float(p["H"]), p["method"], bool(p.get("flagged", False)))
            for p in data["points"]
        ]
        return cls(data["H_S"], points, data.get("s"), data.get("s_method"),
                   dict(data.get("ensemble_meta", {})))


def _in_one_bit_band(info):
    return ONE_BIT_BAND[0] <= info <= ONE_BIT_BAND[1]


def tradeoff_curve(ensemble, methods=("temporal", "genetic"), ga_config=None, seed=0,
                   levels=None, meta=None):
    """Trade-off points (I, H) from the requested grouping methods, and s.

    Temporal points cover l = 0 .. t (or ``levels``); the genetic and
    exhaustive methods add one two-group point each. s uses the genetic
    point when its information is within 0.01 bit of 1, else temporal l = 1.
    """
    rows = _rows(ensemble)
    h_s = mixture_entropy(rows)
    points = []
    one_bit = {}
    if "temporal" in methods:
        t = ensemble.t
        for l in (range(t + 1) if levels is None else levels):
            res = temporal_grouping(ensemble, l)
            points.append(TradeoffPoint(float(l), res.best_H, "temporal"))
            if l == 1:
                one_bit["temporal"] = res.best_H
    searches = {
        "genetic": lambda: genetic_bipartition(ensemble, ga_config, seed),
        "exhaustive": lambda: exhaustive_bipartition(ensemble),
    }
    for name, search in searches.items():
        if name not in methods:
            continue
        rep = search()
        ok = _in_one_bit_band(rep.info)
        points.append(TradeoffPoint(rep.info, rep.avg_entropy, name, flagged=not ok))
        if ok:
            one_bit[name] = rep.avg_entropy
    s = s_method = None
    for name in ("exhaustive", "genetic", "temporal"):
        if name in one_bit:
            try:
                s = s_parameter(h_s, one_bit[name])
            except UndefinedSError:
                continue
            s_method = name
            break
    return TradeoffCurve(h_s, points, s, s_method, dict(meta or {}))


def haar_random_ensemble(D, count, seed=0):
    """``count`` i.i.d. Haar-random states in dimension D (normalized complex Gaussians)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(count, D)) + 1j * rng.normal(size=(count, D))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return StateEnsemble(z, {"D": D, "count": count, "seed": seed})


def info_of_sizes(sizes):
    total = sum(sizes)
    return -sum(s / total * math.log2(s / total) for s in sizes if s)
