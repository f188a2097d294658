import numpy as np
import pytest

from bakerlab import perturb
from bakerlab.baker import BakerMap, apply_rows
from bakerlab.perturb import (
    MemoryBudgetError,
    PerturbationSpec,
    evolve_histories,
    extend_histories,
    load_ensemble,
    perturbation_unitary,
    reduced_state,
    save_ensemble,
)
from bakerlab.qcore import DimensionMismatchError, PureState, von_neumann_entropy

from conftest import random_state


def test_spec_validation():
    with pytest.raises(ValueError):
        PerturbationSpec("z-kick")
    with pytest.raises(ValueError):
        PerturbationSpec.y_rotation_middle(0.1).target(4)
    with pytest.raises(ValueError):
        PerturbationSpec.custom(7, np.eye(2), np.eye(2)).target(5)
    with pytest.raises(ValueError):
        PerturbationSpec.custom(1, np.ones((2, 2)), np.eye(2))
    assert PerturbationSpec.y_rotation_middle(0.1).target(5) == 3
    assert PerturbationSpec.x_flip_rightmost().target(5) == 5


def test_perturbation_unitary_examples():
    spec = PerturbationSpec.y_rotation_middle(0.0)
    np.testing.assert_allclose(perturbation_unitary(spec, 0, 3), np.eye(8))
    spec = PerturbationSpec.y_rotation_middle(0.37)
    prod = perturbation_unitary(spec, 0, 5) @ perturbation_unitary(spec, 1, 5)
    assert np.abs(prod - np.eye(32)).max() < 1e-12
    u = spec.gate(1)
    assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-12
    g = PerturbationSpec.y_rotation_middle(0.25).gate(0)
    np.testing.assert_allclose(g @ [1, 0], [np.cos(np.pi / 4), -np.sin(np.pi / 4)], atol=1e-15)


def test_t0_and_history_order(y_spec):
    psi = PureState.zeros(5)
    bmap = BakerMap(5, 2)
    ens0 = evolve_histories(psi, bmap, y_spec, 0)
    np.testing.assert_array_equal(ens0.states[0], psi.amplitudes)
    ens = evolve_histories(psi, bmap, y_spec, 3)
    U = [perturbation_unitary(y_spec, k, 5) for k in (0, 1)]
    for k in range(8):
        v = psi.amplitudes
        for bit in ens.history_bits(k):
            v = U[bit] @ apply_rows(v, bmap)[0]
        np.testing.assert_allclose(ens.states[k], v, atol=1e-13)
    assert ens.history_bits(4) == (1, 0, 0)


def test_extremal_sigma_x_ensemble_orthonormal(x_spec):
    for t in range(6):
        ens = evolve_histories(PureState.zeros(5), BakerMap(5, 5), x_spec, t)
        gram = ens.states.conj() @ ens.states.T
        np.testing.assert_allclose(gram, np.eye(1 << t), atol=1e-12)
        assert von_neumann_entropy(reduced_state(ens)) == pytest.approx(t, abs=1e-9)
    np.testing.assert_allclose(reduced_state(ens).entries, np.eye(32) / 32, atol=1e-12)


def test_reduced_state_two_state_oracle(y_spec):
    psi = PureState.zeros(5)
    ens = evolve_histories(psi, BakerMap(5, 1), y_spec, 1)
    c = abs(np.vdot(ens.states[0], ens.states[1]))
    ev = np.sort(np.linalg.eigvalsh(reduced_state(ens).entries))[::-1][:2]
    np.testing.assert_allclose(ev, [(1 + c) / 2, (1 - c) / 2], atol=1e-12)
    assert von_neumann_entropy(reduced_state(evolve_histories(psi, BakerMap(5, 1), y_spec, 0))) == pytest.approx(0)


def test_prefix_consistency(y_spec, rng):
    psi = random_state(5, rng)
    bmap = BakerMap(5, 3)
    ens4 = evolve_histories(psi, bmap, y_spec, 4)
    ens5 = evolve_histories(psi, bmap, y_spec, 5)
    np.testing.assert_allclose(extend_histories(ens4, bmap, y_spec).states, ens5.states, atol=1e-12)


def test_thread_count_does_not_change_result(y_spec, monkeypatch):
    monkeypatch.setattr(perturb, "CHUNK_ROWS", 16)
    psi = PureState.zeros(5)
    a = evolve_histories(psi, BakerMap(5, 1), y_spec, 9, threads=1)
    b = evolve_histories(psi, BakerMap(5, 1), y_spec, 9, threads=3)
    np.testing.assert_array_equal(a.states, b.states)


def test_norm_drift_long_run(y_spec):
    ens = evolve_histories(PureState.zeros(5), BakerMap(5, 1), y_spec, 18)
    norms = np.linalg.norm(ens.states, axis=1)
    assert np.abs(norms - 1).max() <= 1e-10


def test_norm_drift_is_reported(y_spec):
    rows = np.full((2, 4), 0.6, dtype=complex)
    with pytest.raises(perturb.NormDriftError):
        perturb._check_norms(rows, "double")


def test_budget_and_dimension_errors(y_spec):
    with pytest.raises(MemoryBudgetError, match=r"2\^20 histories x 2\^5"):
        evolve_histories(PureState.zeros(5), BakerMap(5, 1), y_spec, 20, memory_budget=1 << 20)
    with pytest.raises(DimensionMismatchError):
        evolve_histories(PureState.zeros(3), BakerMap(5, 1), y_spec, 2)
    with pytest.raises(ValueError):
        evolve_histories(PureState.zeros(5), BakerMap(5, 1), y_spec, -1)


def test_single_precision_mode(y_spec):
    psi = PureState.zeros(5)
    a = evolve_histories(psi, BakerMap(5, 2), y_spec, 6, precision="single")
    b = evolve_histories(psi, BakerMap(5, 2), y_spec, 6)
    assert a.states.dtype == np.complex64
    np.testing.assert_allclose(a.states, b.states, atol=1e-5)


@pytest.mark.parametrize("precision", ["double", "single"])
def test_snapshot_roundtrip(tmp_path, y_spec, precision):
    ens = evolve_histories(PureState.zeros(5), BakerMap(5, 1), y_spec, 4, precision=precision)
    path = tmp_path / "ens.bke"
    save_ensemble(path, ens)
    raw = path.read_bytes()
    assert raw[:4] == b"BKE1"
    assert np.frombuffer(raw[4:16], "<u4").tolist() == [5, 4, 0 if precision == "double" else 1]
    back = load_ensemble(path)
    assert (back.N, back.t, back.precision) == (5, 4, precision)
    np.testing.assert_array_equal(back.states, ens.states)


def test_snapshot_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.bke"
    bad.write_bytes(b"NOPE" + bytes(12))
    with pytest.raises(ValueError):
        load_ensemble(bad)
    short = tmp_path / "short.bke"
    short.write_bytes(b"BKE1" + np.array([2, 1, 0], "<u4").tobytes() + bytes(16))
    with pytest.raises(ValueError):
        load_ensemble(short)


def test_ensemble_is_readonly(y_spec):
    ens = evolve_histories(PureState.zeros(5), BakerMap(5, 1), y_spec, 2)
    with pytest.raises(ValueError):
        ens.states[0, 0] = 0
