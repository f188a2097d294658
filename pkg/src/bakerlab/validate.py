"""Fast oracle checks run by ``bakerlab validate``."""
import math

import numpy as np

from . import _kernels, analytic, hyper
from .baker import (
    BakerMap,
    all_bit_strings,
    baker_dense,
    baker_apply,
    bvs_dense,
    factorized_dense,
    fourier_matrix,
    pft_image_labels,
    pft_state,
)
from .perturb import PAULI_X, PerturbationSpec, evolve_histories, pauli_rotation
from .qcore import PureState, overlap
from .signatures import entropy_growth, fidelity_decay


def check_kernels():
    err = 0.0
    rng = np.random.default_rng(7)
    for m in range(5):
        rows = rng.normal(size=(3, 1 << m)) + 1j * rng.normal(size=(3, 1 << m))
        for inverse in (False, True):
            ref = rows @ fourier_matrix(m, inverse).T
            for name in _kernels.available_backends():
                got = _kernels.get_backend(name).centered_dft(np.ascontiguousarray(rows), m, inverse)
                err = max(err, np.abs(got - ref).max())
    return err < 1e-12, f"max DFT deviation {err:.2e} over backends {_kernels.available_backends()}"


def check_periodicity():
    err = 0.0
    for N in (3, 5):
        U = baker_dense(BakerMap(N, N)).power(4 * N)
        err = max(err, np.abs(U - np.eye(1 << N)).max())
    return err < 1e-10, f"max |B^(4N) - 1| = {err:.2e}"


def check_equivalences():
    err = 0.0
    for N in (3, 4, 5):
        err = max(err, np.abs(baker_dense(BakerMap(N, 1)).entries - bvs_dense(N)).max())
        for n in range(1, N + 1):
            bmap = BakerMap(N, n)
            err = max(err, np.abs(baker_dense(bmap).entries - factorized_dense(bmap)).max())
    return err < 1e-11, f"max deviation {err:.2e}"


def check_bijection():
    worst = 0.0
    N = 3
    for n in range(1, N + 1):
        for a in all_bit_strings(N - n):
            for x in all_bit_strings(n):
                img = baker_apply(pft_state(N, n, a, x), BakerMap(N, n))
                n2, a2, x2 = pft_image_labels(n, a, x)
                worst = max(worst, abs(abs(overlap(pft_state(N, n2, a2, x2), img)) - 1.0))
    return worst < 1e-12, f"max ||overlap| - 1| = {worst:.2e}"


def check_extremal_entropy():
    series = entropy_growth(PureState.zeros(5), BakerMap(5, 5), PerturbationSpec.x_flip_rightmost(), 10)
    err = max(abs(h - min(t, 5)) for t, h in series.points)
    return err < 1e-9, f"max |H(t) - min(t, 5)| = {err:.2e}"


def check_extremal_fidelity():
    lam = -2.0 * math.log(math.cos(0.2 * math.pi))
    gate = pauli_rotation(PAULI_X, 0.2 * math.pi)
    series = fidelity_decay(PureState.zeros(5), BakerMap(5, 5), t_max=5, fixed_gate=(gate, 5))
    err = max(abs(f - math.exp(-lam * t)) for t, f in series.points)
    return err < 1e-9, f"max |F(t) - exp(-lambda t)| = {err:.2e}"


def check_halfspace():
    got = [analytic.halfspace_eigenvalues(analytic.HalfspaceParams(n, 8))[:2] for n in (1, 2)]
    want = [(3 / 16, 1 / 16), (11 / 64, 5 / 64)]
    err = max(abs(g - w) for gs, ws in zip(got, want) for g, w in zip(gs, ws))
    h12 = analytic.partition_entropy(1, 2)
    err = max(err, abs(h12 - (2 - 0.75 * math.log2(3))))
    return err < 1e-14, f"max deviation {err:.2e}"


def check_genetic_small():
    ens = evolve_histories(PureState.zeros(5), BakerMap(5, 1), PerturbationSpec.y_rotation_middle(0.2), 3)
    ga = hyper.genetic_bipartition(ens, seed=0)
    ex = hyper.exhaustive_bipartition(ens)
    gap = abs(ga.avg_entropy - ex.avg_entropy)
    return gap < 1e-9, f"|genetic - exhaustive| = {gap:.2e}"


CHECKS = [
    ("kernels match direct DFT", check_kernels),
    ("extremal periodicity", check_periodicity),
    ("map factorizations", check_equivalences),
    ("pft basis bijection", check_bijection),
    ("extremal entropy law", check_extremal_entropy),
    ("extremal fidelity law", check_extremal_fidelity),
    ("half-space closed forms", check_halfspace),
    ("genetic vs exhaustive", check_genetic_small),
]


def run_all(report=print):
    ok_all = True
    for name, fn in CHECKS:
        ok, detail = fn()
        ok_all &= ok
        report(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
