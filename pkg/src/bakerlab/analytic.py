"""Closed-form baselines for random vectors: the sphere-grouping trade-off,
entropies of equal half-space partitions, product-state bounds on s, and a
Monte Carlo check of the half-space eigenvalues."""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hyper import TradeoffCurve, TradeoffPoint

LN2 = math.log(2.0)
LOG2_3 = math.log2(3.0)


class SparseValidityWarning(UserWarning):
    pass


def _h2(p):
    """Binary entropy in bits, with 0 log 0 = 0."""
    return -sum(x * math.log2(x) for x in (p, 1.0 - p) if x > 0)


@dataclass(frozen=True)
class SphereModelParams:
    D: int
    N_vec: float
    phi: float | None = None

    def __post_init__(self):
        if self.D < 2:
            raise ValueError("dimension D must be >= 2")
        if self.N_vec < self.D:
            raise ValueError(f"need at least D={self.D} vectors, got {self.N_vec}")
        if self.phi is not None and not 0 <= self.phi <= math.pi / 2:
            raise ValueError("phi must lie in [0, pi/2]")

    @property
    def log_n(self):
        return math.log2(self.N_vec)

    @property
    def knee(self):
        return self.log_n - math.log2(self.D)


@dataclass(frozen=True)
class HalfspaceParams:
    n: int
    D: int

    def __post_init__(self):
        if self.n < 1 or 2 * self.n > self.D:
            raise ValueError(f"half-space dimension n={self.n} needs 1 <= n and 2n <= D={self.D}")


def sphere_count_log2(D, phi):
    """log2 of the sphere count, finite wherever the count itself may overflow."""
    if not 0 < phi <= math.pi / 2:
        raise ValueError("phi must lie in (0, pi/2]")
    return -2.0 * (D - 1) * math.log2(math.sin(phi))


def sphere_count(D, phi):
    """Number of spheres of radius phi covering projective space: (sin^2 phi)^-(D-1).

    Returns inf beyond the float range; use ``sphere_count_log2`` there.
    """
    bits = sphere_count_log2(D, phi)
    return 2.0 ** bits if bits < 1024 else math.inf


def sphere_lambda0(D, phi):
    return 1.0 - (D - 1) / D * math.sin(phi) ** 2


def sphere_entropy(D, phi):
    """Entropy of vectors spread uniformly inside a sphere of radius phi."""
    if not 0 <= phi <= math.pi / 2:
        raise ValueError("phi must lie in [0, pi/2]")
    lam0 = sphere_lambda0(D, phi)
    return _h2(lam0) + (1.0 - lam0) * math.log2(D - 1)


def _exact_upper(params, I):
    # groups below D vectors: entropy of N_V = N 2^-I vectors in a sphere
    nv = params.N_vec * 2.0 ** -I
    lam = 1.0 - 2.0 ** (-I / (params.D - 1)) * (1.0 - 2.0 ** I / params.N_vec)
    lam = min(max(lam, 0.0), 1.0)
    extra = (1.0 - lam) * math.log2(nv - 1.0) if nv > 1.0 + 1e-12 else 0.0
    return _h2(lam) + extra


def _exact_lower(params, I):
    D = params.D
    lam0 = 1.0 - (D - 1) / D * 2.0 ** (-I / (D - 1))
    return _h2(lam0) + (1.0 - lam0) * math.log2(D - 1)


def _sparse_lower(params, I):
    x = 1.0 + I * LN2
    return math.log2(params.D) - (x * math.log2(x) - I) / params.D


def sphere_tradeoff(params, I, mode="sparse"):
    """Entropy left after I bits of sphere-grouping information.

    Two branches meet at the knee I = log N - log D (groups of D vectors);
    the knee itself is evaluated on the lower-I branch, which carries the
    dimension-limited behavior.
    """
    if mode not in ("exact", "sparse"):
        raise ValueError(f"mode must be 'exact' or 'sparse', got {mode!r}")
    if not 1.0 <= I <= params.log_n + 1e-12:
        raise ValueError(f"I={I} outside [1, log2 N = {params.log_n}]")
    if mode == "sparse" and params.log_n > params.D / 4:
        warnings.warn(
            f"sparse approximation assumes log2 N << D (log2 N = {params.log_n:g}, D = {params.D})",
            SparseValidityWarning,
            stacklevel=2,
        )
    if I > params.knee:
        return _exact_upper(params, I) if mode == "exact" else params.log_n - I
    return _exact_lower(params, I) if mode == "exact" else _sparse_lower(params, I)


def halfspace_eigenvalues(params):
    """(lambda_plus, lambda_minus, lambda_zero) of the mixture over one half-space.

    The central binomial ratio (2n)!/(4^n (n!)^2) is exact up to n = 1000
    and taken from log-gamma beyond.
    """
    n, D = params.n, params.D
    if n <= 1000:
        c = math.comb(2 * n, n) / 4.0 ** n
    else:
        c = math.exp(math.lgamma(2 * n + 1) - 2 * math.lgamma(n + 1) - 2 * n * LN2)
    lam_p, lam_m, lam_0 = (1.0 + c) / D, (1.0 - c) / D, 1.0 / D
    total = n * lam_p + n * lam_m + (D - 2 * n) * lam_0
    if abs(total - 1.0) > 1e-14:
        raise ArithmeticError(f"half-space eigenvalues sum to {total!r}")
    return lam_p, lam_m, lam_0


def partition_entropy(n, D, mode="exact"):
    """Entropy of one half of an equal partition by closeness to two
    orthogonal n-dimensional subspaces."""
    if mode == "approx":
        if D < 2:
            raise ValueError("D must be >= 2")
        return math.log2(D) - 1.0 / (math.pi * D * LN2)
    if mode != "exact":
        raise ValueError(f"mode must be 'exact' or 'approx', got {mode!r}")
    lam_p, lam_m, lam_0 = halfspace_eigenvalues(HalfspaceParams(n, D))
    h = -n * (lam_p * math.log2(lam_p) + (lam_m * math.log2(lam_m) if lam_m > 0 else 0.0))
    return h - (D - 2 * n) * lam_0 * math.log2(lam_0)


def product_slope():
    return 0.75 * LOG2_3 - 1.0


def product_tradeoff(N, I):
    """Linear trade-off near maximal entropy for N qubits grouped one qubit at a time."""
    if not 0 <= I <= N:
        raise ValueError(f"I={I} outside [0, {N}]")
    return N - product_slope() * I


def s_bounds(D):
    """(s_spheres, s_halfspace, s_product) for random vectors in dimension D."""
    if D < 2:
        raise ValueError("D must be >= 2")
    x = 1.0 + LN2
    return (
        D / (x * math.log2(x) - 1.0),
        math.pi * D * LN2,
        4.0 / (3.0 * LOG2_3 - 4.0),
    )


# -- Monte Carlo oracle ------------------------------------------------------

@dataclass(frozen=True)
class HalfspaceEstimate:
    lambdas: tuple
    stderr: tuple
    accepted: int
    eigenvalues: np.ndarray


def halfspace_monte_carlo(params, samples=100_000, seed=0, shards=8):
    """Haar-sample states, keep those closer to S+ than to S- (theta <= pi/4)
    and average the diagonal blocks of the kept mixture.

    S+ spans the first n basis vectors, S- the next n, S0 the rest. Each
    shard draws from its own seeded stream, so results do not depend on
    how shards are scheduled.
    """
    n, D = params.n, params.D
    seqs = np.random.SeedSequence(seed).spawn(shards)
    sizes = [samples // shards + (i < samples % shards) for i in range(shards)]
    kept = []
    for seq, size in zip(seqs, sizes):
        rng = np.random.default_rng(seq)
        z = rng.normal(size=(size, D)) + 1j * rng.normal(size=(size, D))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        plus = np.linalg.norm(z[:, :n], axis=1)
        minus = np.linalg.norm(z[:, n:2 * n], axis=1)
        kept.append(z[np.arctan2(minus, plus) <= math.pi / 4])
    z = np.concatenate(kept)
    w = np.abs(z) ** 2
    blocks = [w[:, :n].mean(axis=1), w[:, n:2 * n].mean(axis=1)]
    if D > 2 * n:
        blocks.append(w[:, 2 * n:].mean(axis=1))
    count = z.shape[0]
    means = tuple(float(b.mean()) for b in blocks)
    errs = tuple(float(b.std(ddof=1) / math.sqrt(count)) for b in blocks)
    if D == 2 * n:
        means, errs = means + (None,), errs + (None,)
    rho = z.T @ z.conj() / count
    return HalfspaceEstimate(means, errs, count, np.linalg.eigvalsh(rho)[::-1])


# -- baseline curves in trade-off form --------------------------------------

def sphere_curve(D, N_vec, mode="sparse", samples=101):
    params = SphereModelParams(D, N_vec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SparseValidityWarning)
        grid = np.unique(np.append(np.linspace(1.0, params.log_n, samples), params.knee))
        grid = grid[grid >= 1.0]
        pts = [TradeoffPoint(float(I), sphere_tradeoff(params, float(I), mode), f"sphere-{mode}")
               for I in grid]
    return TradeoffCurve(math.log2(D), pts, s_bounds(D)[0], "sphere",
                         {"D": D, "N_vec": N_vec, "mode": mode})


def product_curve(N, samples=None):
    levels = range(N + 1) if samples is None else np.linspace(0, N, samples)
    pts = [TradeoffPoint(float(I), product_tradeoff(N, float(I)), "product") for I in levels]
    return TradeoffCurve(float(N), pts, s_bounds(2)[2], "product", {"N": N})


def halfspace_curve(D):
    """Single point I = 1 from the best equal half-space partition."""
    h = partition_entropy(D // 2, D)
    pts = [TradeoffPoint(0.0, math.log2(D), "halfspace"), TradeoffPoint(1.0, h, "halfspace")]
    return TradeoffCurve(math.log2(D), pts, 1.0 / (math.log2(D) - h), "halfspace", {"D": D})
