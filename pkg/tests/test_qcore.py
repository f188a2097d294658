import math

import numpy as np
import pytest

from bakerlab.qcore import (
    DensityMatrix,
    DimensionMismatchError,
    InvalidDensityError,
    InvalidStateError,
    PureState,
    clamp_eigenvalues,
    density_from_states,
    overlap,
    von_neumann_entropy,
)

from conftest import random_state


def test_state_normalization_enforced():
    with pytest.raises(InvalidStateError):
        PureState(1, [1.0, 1.0])
    with pytest.raises(InvalidStateError):
        PureState(2, [1.0, 0.0])


def test_state_is_immutable():
    psi = PureState.zeros(2)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0.0


def test_basis_index_msb_first():
    psi = PureState.from_bits((1, 0, 0))
    assert np.argmax(np.abs(psi.amplitudes)) == 4


def test_entropy_examples():
    assert von_neumann_entropy(np.eye(32) / 32) == pytest.approx(5.0, abs=1e-12)
    v = np.array([1, 1j]) / np.sqrt(2)
    assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(2 - 0.75 * math.log2(3), abs=1e-12)


def test_density_validation():
    with pytest.raises(InvalidDensityError):
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(InvalidDensityError):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidDensityError):
        von_neumann_entropy(np.diag([1.2, -0.2]))


def test_clamp_small_negative_eigenvalues():
    np.testing.assert_array_equal(clamp_eigenvalues(np.array([1.0, -5e-11])), [1.0, 0.0])
    with pytest.raises(InvalidDensityError):
        clamp_eigenvalues(np.array([1.0, -1e-6]))


def test_spectrum_descending_and_normalized(rng):
    states = [random_state(3, rng) for _ in range(5)]
    spec = density_from_states(states).spectrum()
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert spec.eigenvalues.sum() == pytest.approx(1.0, abs=1e-9)


def test_density_from_states_examples():
    a, b = PureState.basis(1, 0), PureState.basis(1, 1)
    assert von_neumann_entropy(density_from_states([a], [1.0])) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(density_from_states([a, b], [0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)
    basis = [PureState.basis(3, j) for j in range(8)]
    np.testing.assert_allclose(density_from_states(basis).entries, np.eye(8) / 8, atol=1e-12)


def test_density_from_states_errors():
    with pytest.raises(ValueError):
        density_from_states([])
    with pytest.raises(DimensionMismatchError):
        density_from_states([PureState.zeros(1), PureState.zeros(2)])
    with pytest.raises(ValueError):
        density_from_states([PureState.zeros(1)], [0.5])


def test_overlap_examples():
    psi = PureState.product([np.array([1, 1j]) / np.sqrt(2), np.array([0.6, 0.8])])
    assert overlap(psi, psi) == pytest.approx(1.0)
    assert overlap(PureState.basis(2, 0), PureState.basis(2, 3)) == 0
    # position/momentum kernel at D = 2, j = k = 0
    p0 = PureState(1, np.exp(2j * np.pi * 0.5 * np.array([0.5, 1.5]) / 2) / np.sqrt(2))
    assert overlap(PureState.basis(1, 0), p0) == pytest.approx(np.exp(0.25j * np.pi) / np.sqrt(2), abs=1e-15)
    with pytest.raises(DimensionMismatchError):
        overlap(PureState.zeros(1), PureState.zeros(2))


def test_entropy_unitarily_invariant(rng):
    states = [random_state(3, rng) for _ in range(4)]
    rho = density_from_states(states).entries
    U = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))[0]
    assert von_neumann_entropy(U @ rho @ U.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def test_grouping_concavity(rng):
    states = [random_state(3, rng) for _ in range(12)]
    h_s = von_neumann_entropy(density_from_states(states))
    for _ in range(10):
        mask = rng.random(12) < 0.5
        groups = [[s for s, m in zip(states, mask) if m == v] for v in (True, False)]
        avg = sum(len(g) / 12 * von_neumann_entropy(density_from_states(g)) for g in groups if g)
        assert avg <= h_s + 1e-9
