import numpy as np
import pytest

from bakerlab import _kernels
from bakerlab._kernels import _pure
from bakerlab.baker import fourier_matrix, shift_matrix

BACKENDS = _kernels.available_backends()


def _rows(rng, K, N):
    return np.ascontiguousarray(rng.normal(size=(K, 1 << N)) + 1j * rng.normal(size=(K, 1 << N)))


def test_compiled_backend_present():
    # the build ships the extension; the fallback still has to work without it
    assert "python" in BACKENDS
    assert _kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("m", range(5))
@pytest.mark.parametrize("inverse", [False, True])
def test_dft_matches_direct_summation(backend, m, inverse, rng):
    impl = _kernels.get_backend(backend)
    rows = _rows(rng, 4, m)
    got = impl.centered_dft(rows, m, inverse)
    np.testing.assert_allclose(got, rows @ fourier_matrix(m, inverse).T, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_dft_acts_blockwise_on_low_qubits(backend, rng):
    impl = _kernels.get_backend(backend)
    N, m = 5, 3
    rows = _rows(rng, 3, N)
    want = rows @ np.kron(np.eye(1 << (N - m)), fourier_matrix(m)).T
    np.testing.assert_allclose(impl.centered_dft(rows, m, False), want, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("N,n", [(1, 1), (3, 2), (4, 4), (6, 3)])
def test_shift_is_the_permutation(backend, N, n, rng):
    impl = _kernels.get_backend(backend)
    rows = _rows(rng, 3, N)
    np.testing.assert_array_equal(impl.shift(rows, N, n), rows @ shift_matrix(N, n).T)


@pytest.mark.parametrize("backend", BACKENDS)
def test_single_qubit_gate(backend, rng):
    impl = _kernels.get_backend(backend)
    N = 4
    gate = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    rows = _rows(rng, 2, N)
    for q in range(1, N + 1):
        full = np.kron(np.kron(np.eye(1 << (q - 1)), gate), np.eye(1 << (N - q)))
        np.testing.assert_allclose(impl.apply_1q(rows, N, q, gate), rows @ full.T, atol=1e-13)


def test_backends_agree_on_perturbed_step(rng):
    if "cython" not in BACKENDS:
        pytest.skip("compiled kernels not built")
    py, cy = _kernels.get_backend("python"), _kernels.get_backend("cython")
    u0 = np.array([[0.6, -0.8], [0.8, 0.6]], dtype=complex)
    u1 = u0.T.copy()
    for N in range(1, 8):
        for n in range(1, N + 1):
            rows = _rows(rng, 3, N)
            q = (N + 1) // 2
            np.testing.assert_allclose(
                cy.perturbed_step(rows, N, n, u0, u1, q), py.perturbed_step(rows, N, n, u0, u1, q), atol=1e-12
            )
            np.testing.assert_allclose(cy.baker(rows, N, n), py.baker(rows, N, n), atol=1e-12)


def test_wrappers_accept_readonly_input(rng):
    rows = _rows(rng, 2, 3)
    rows.setflags(write=False)
    out = _kernels.baker(rows, 3, 2)
    assert out.shape == rows.shape


def test_pure_perturbed_step_interleaves_histories(rng):
    rows = _rows(rng, 2, 3)
    u0, u1 = np.eye(2, dtype=complex), np.array([[0, 1], [1, 0]], dtype=complex)
    out = _pure.perturbed_step(rows, 3, 1, u0, u1, 3)
    mapped = _pure.baker(rows, 3, 1)
    np.testing.assert_allclose(out[0::2], mapped)
    np.testing.assert_allclose(out[1::2], _pure.apply_1q(mapped, 3, 3, u1))
