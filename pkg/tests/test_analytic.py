import math
import warnings

import numpy as np
import pytest

from bakerlab import analytic as A


def quiet(fn, *args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", A.SparseValidityWarning)
        return fn(*args)


def test_sphere_count_examples():
    assert A.sphere_count(7, math.pi / 2) == 1
    D = 9
    phi_d = math.asin(math.sqrt(0.5 ** (1 / (D - 1))))
    assert A.sphere_count(D, phi_d) == pytest.approx(2)
    assert A.sphere_count(2, math.pi / 4) == pytest.approx(2)
    with pytest.raises(ValueError):
        A.sphere_count(4, 0.0)


def test_sphere_entropy_examples():
    assert A.sphere_entropy(32, 0.0) == 0
    assert A.sphere_entropy(32, math.pi / 2) == pytest.approx(5.0, abs=1e-12)
    lam0 = 1 - (31 / 32) * 0.75
    want = -lam0 * math.log2(lam0) - (1 - lam0) * math.log2((1 - lam0) / 31)
    assert A.sphere_entropy(32, math.pi / 3) == pytest.approx(want, abs=1e-12)
    with pytest.raises(ValueError):
        A.sphere_entropy(4, 2.0)


def test_sphere_params_validation():
    with pytest.raises(ValueError):
        A.SphereModelParams(32, 16)
    with pytest.raises(ValueError):
        A.SphereModelParams(1, 16)


def test_sparse_tradeoff_fig3_baseline():
    p = A.SphereModelParams(32, 2 ** 16)
    assert p.knee == 11
    assert quiet(A.sphere_tradeoff, p, 16.0) == 0
    with pytest.warns(A.SparseValidityWarning):
        A.sphere_tradeoff(p, 5.0)
    with pytest.raises(ValueError):
        quiet(A.sphere_tradeoff, p, 0.5)
    with pytest.raises(ValueError):
        A.sphere_tradeoff(p, 2.0, "dense")


def test_no_warning_when_sparse_is_valid():
    p = A.SphereModelParams(256, 2 ** 16)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        A.sphere_tradeoff(p, 3.0)


def test_branches_nonincreasing():
    for D, logn in ((32, 16), (256, 16), (64, 10)):
        p = A.SphereModelParams(D, 2 ** logn)
        for mode in ("exact", "sparse"):
            lower = [quiet(A.sphere_tradeoff, p, I, mode) for I in np.linspace(1, p.knee, 200)]
            upper = [quiet(A.sphere_tradeoff, p, I, mode) for I in np.linspace(p.knee + 1e-9, logn, 200)]
            assert np.all(np.diff(lower) <= 1e-12) and np.all(np.diff(upper) <= 1e-12)


def test_exact_continuous_at_knee():
    for D in (32, 64, 256):
        p = A.SphereModelParams(D, 2 ** 16)
        gap = abs(A.sphere_tradeoff(p, p.knee, "exact") - A.sphere_tradeoff(p, p.knee + 1e-9, "exact"))
        assert gap < 0.2


def test_exact_vs_sparse_at_256():
    p = A.SphereModelParams(256, 2 ** 16)
    gap = max(abs(A.sphere_tradeoff(p, I) - A.sphere_tradeoff(p, I, "exact")) for I in np.linspace(1, p.knee, 300))
    assert gap < 0.1


def test_halfspace_eigenvalues_quoted_fractions():
    for D in (2, 4, 8, 16):
        lp, lm, l0 = A.halfspace_eigenvalues(A.HalfspaceParams(1, D))
        assert lp == pytest.approx(3 / (2 * D), abs=1e-15) and lm == pytest.approx(1 / (2 * D), abs=1e-15)
    for D in (4, 8):
        lp, lm, l0 = A.halfspace_eigenvalues(A.HalfspaceParams(2, D))
        assert lp == pytest.approx(11 / (8 * D), abs=1e-15) and lm == pytest.approx(5 / (8 * D), abs=1e-15)
        assert l0 == 1 / D


def test_halfspace_normalization_and_large_n():
    for D in (2, 8, 64, 1000, 5000):
        for n in sorted({1, min(2, D // 2), D // 4 or 1, D // 2}):
            lp, lm, l0 = A.halfspace_eigenvalues(A.HalfspaceParams(n, D))
            assert abs(n * lp + n * lm + (D - 2 * n) * l0 - 1) < 1e-14
    lp, _, _ = A.halfspace_eigenvalues(A.HalfspaceParams(2000, 4000))
    assert lp == pytest.approx((1 + 1 / math.sqrt(math.pi * 2000)) / 4000, rel=1e-4)
    with pytest.raises(ValueError):
        A.HalfspaceParams(3, 4)


@pytest.mark.parametrize("D,n", [(4, 1), (8, 2), (8, 4)])
def test_monte_carlo_within_three_standard_errors(D, n):
    params = A.HalfspaceParams(n, D)
    est = A.halfspace_monte_carlo(params, 100_000, seed=1)
    for got, err, want in zip(est.lambdas, est.stderr, A.halfspace_eigenvalues(params)):
        if got is not None:
            assert abs(got - want) <= 3 * err


def test_monte_carlo_reproducible():
    p = A.HalfspaceParams(1, 4)
    assert A.halfspace_monte_carlo(p, 5000, 3).lambdas == A.halfspace_monte_carlo(p, 5000, 3).lambdas


def test_partition_entropy_examples():
    assert A.partition_entropy(1, 2) == pytest.approx(2 - 0.75 * math.log2(3), abs=1e-12)
    assert abs(A.partition_entropy(32, 64) - A.partition_entropy(32, 64, "approx")) < 0.005
    vals = [A.partition_entropy(n, 16) for n in range(1, 9)]
    assert np.all(np.diff(vals) < 0)
    for D, tol in ((64, 0.01), (256, 0.002)):
        assert abs(A.partition_entropy(D // 2, D) + 1 / (math.pi * D * math.log(2)) - math.log2(D)) < tol
    with pytest.raises(ValueError):
        A.partition_entropy(1, 4, "rough")


def test_partition_entropy_closed_form_identity():
    # log D - (2n/D)(1 - H2(D lambda_+ / 2))
    for D, n in ((8, 2), (16, 5), (64, 32)):
        lp = A.halfspace_eigenvalues(A.HalfspaceParams(n, D))[0]
        x = D * lp / 2
        h2 = -x * math.log2(x) - (1 - x) * math.log2(1 - x)
        assert A.partition_entropy(n, D) == pytest.approx(math.log2(D) - 2 * n / D * (1 - h2), abs=1e-12)


def test_product_tradeoff():
    assert A.product_tradeoff(5, 0) == 5
    slope = 0.75 * math.log2(3) - 1
    assert A.product_tradeoff(5, 5) == pytest.approx(5 - 5 * slope)
    assert slope == pytest.approx(1 / A.s_bounds(8)[2], rel=1e-12)
    with pytest.raises(ValueError):
        A.product_tradeoff(5, 6)


def test_s_bounds():
    sp, sh, sq = A.s_bounds(32)
    assert sh == pytest.approx(32 * math.pi * math.log(2)) and sh == pytest.approx(69.7, abs=0.05)
    assert sp / 32 == pytest.approx(3.5, abs=0.05) and sq == pytest.approx(5.3, abs=0.01)
    assert A.s_bounds(2)[2] == A.s_bounds(1024)[2]
    for D in range(2, 200):
        s = A.s_bounds(D)
        assert s[1] < s[0]
    with pytest.raises(ValueError):
        A.s_bounds(1)


def test_formulas_finite_over_grids():
    for D in (2, 3, 8, 33):
        for phi in np.linspace(1e-6, math.pi / 2, 50):
            assert math.isfinite(A.sphere_count_log2(D, phi)) and math.isfinite(A.sphere_entropy(D, phi))
            assert A.sphere_count(D, phi) >= 1
        for n in range(1, D // 2 + 1):
            assert math.isfinite(A.partition_entropy(n, D))
    for D, logn in ((4, 3), (32, 16), (256, 40)):
        p = A.SphereModelParams(D, 2 ** logn)
        for I in np.linspace(1, logn, 60):
            for mode in ("exact", "sparse"):
                assert math.isfinite(quiet(A.sphere_tradeoff, p, I, mode))


def test_baseline_curves_share_schema():
    c = A.sphere_curve(32, 2 ** 16)
    d = c.to_dict()
    assert set(d) >= {"H_S", "points", "s", "s_method"}
    assert any(p.I == 11 for p in c.points)
    prod = A.product_curve(5)
    assert [p.I for p in prod.points] == [0, 1, 2, 3, 4, 5]
