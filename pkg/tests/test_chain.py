import numpy as np
import pytest

from chain_equilibrium.chain import (
    ChainParams,
    Propagator,
    build_coupling_matrix,
    commutation_matrix,
    dense_propagator,
    mode_frequencies,
    mode_spectrum,
    propagator,
    verify_symplectic,
)
from chain_equilibrium.exceptions import ParameterError


@pytest.fixture
def small_chain():
    """A three-site chain with ε = 0.1."""
    return ChainParams(N=3, epsilon=0.1)


def test_chain_params_derived_quantities():
    """
    Test the derived coupling γ and frequency Ω.

    Assertions
    ----------
    - γ = ε/(1+2ε) to 1e-14 and stays below 1/2.
    - Ω = ω√(1+2ε).
    - ``from_gamma`` inverts the γ map.
    """
    for eps in (0.0, 0.1, 1.0, 5.0, 1e6):
        params = ChainParams(N=4, epsilon=eps, omega=2.0)
        assert abs(params.gamma - eps / (1 + 2 * eps)) < 1e-14
        assert 0.0 <= params.gamma < 0.5
        assert params.Omega == pytest.approx(2.0 * np.sqrt(1 + 2 * eps))
    params = ChainParams.from_gamma(10, 0.05)
    assert params.gamma == pytest.approx(0.05, abs=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"N": 0, "epsilon": 0.1},
        {"N": 3, "epsilon": -0.1},
        {"N": 3, "epsilon": 0.1, "omega": 0.0},
        {"N": 2.5, "epsilon": 0.1},
    ],
)
def test_chain_params_rejects_invalid(kwargs):
    """
    Test parameter validation.

    Assertions
    ----------
    - N = 0, non-integer N, negative ε and non-positive ω raise
      ParameterError.
    """
    with pytest.raises(ParameterError):
        ChainParams(**kwargs)


def test_build_coupling_matrix(small_chain):
    """
    Test the tridiagonal coupling matrix.

    Assertions
    ----------
    - (N=3, ε=0.1) gives the expected matrix.
    - Its eigenvalues are {1.058579, 1.2, 1.341421}.
    - ε = 0 gives the identity.
    """
    A = build_coupling_matrix(small_chain)
    expected = np.array(
        [[1.2, -0.1, 0.0], [-0.1, 1.2, -0.1], [0.0, -0.1, 1.2]]
    )
    np.testing.assert_allclose(A, expected, atol=1e-15)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(A), [1.058579, 1.2, 1.341421], atol=1e-6
    )
    np.testing.assert_array_equal(
        build_coupling_matrix(ChainParams(N=2, epsilon=0.0)), np.eye(2)
    )


def test_mode_spectrum_diagonalizes(small_chain):
    """
    Test the analytic normal modes.

    This test ensures that the sine basis and the eigenvalues
    1 + 2ε(1 − cos φ_l) diagonalize the coupling matrix of a fixed-end
    chain.

    Assertions
    ----------
    - σσᵀ = I and σAσᵀ = diag(λ) to 1e-12.
    - The λ agree with a dense eigensolver.
    - All λ lie in [1, 1+4ε].
    """
    spectrum = mode_spectrum(small_chain)
    sigma = spectrum.sigma
    A = build_coupling_matrix(small_chain)
    np.testing.assert_allclose(sigma @ sigma.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(
        sigma @ A @ sigma.T, np.diag(spectrum.lambdas), atol=1e-12
    )
    np.testing.assert_allclose(
        np.sort(spectrum.lambdas), np.linalg.eigvalsh(A), atol=1e-12
    )
    assert np.all(spectrum.lambdas >= 1.0)
    assert np.all(spectrum.lambdas <= 1.0 + 4 * small_chain.epsilon)


def test_mode_spectrum_single_site():
    """
    Test a one-oscillator chain.

    Assertions
    ----------
    - φ₁ = π/2, λ₁ = 1+2ε and σ = [1].
    """
    spectrum = mode_spectrum(ChainParams(N=1, epsilon=0.7))
    assert spectrum.phis[0] == pytest.approx(np.pi / 2)
    assert spectrum.lambdas[0] == pytest.approx(2.4)
    np.testing.assert_allclose(spectrum.sigma, [[1.0]], atol=1e-15)


def test_sigma_orthogonal_n4():
    """
    Test orthogonality of the sine matrix at N = 4.

    Assertions
    ----------
    - σσᵀ = I within 1e-13.
    """
    sigma = mode_spectrum(ChainParams(N=4, epsilon=2.3)).sigma
    np.testing.assert_allclose(sigma @ sigma.T, np.eye(4), atol=1e-13)


def test_normal_mode_transform_decouples():
    """
    Test the decoupling transform.

    Assertions
    ----------
    - The transform is symplectic.
    - It maps the Hamiltonian matrix A ⊕ I to diag(√λ) ⊕ diag(√λ).
    """
    params = ChainParams(N=6, epsilon=0.4)
    spectrum = mode_spectrum(params)
    T = spectrum.normal_mode_transform()
    assert verify_symplectic(T) < 1e-12
    H = np.block(
        [
            [build_coupling_matrix(params), np.zeros((6, 6))],
            [np.zeros((6, 6)), np.eye(6)],
        ]
    )
    T_inv = np.linalg.inv(T)
    root = np.sqrt(spectrum.lambdas)
    np.testing.assert_allclose(
        T_inv.T @ H @ T_inv, np.diag(np.concatenate([root, root])), atol=1e-12
    )
    np.testing.assert_allclose(
        mode_frequencies(params, spectrum), root, atol=1e-15
    )


def test_propagator_identity_and_rotation():
    """
    Test two closed-form propagators.

    Assertions
    ----------
    - S(0) is the identity.
    - A free oscillator rotates phase space by ωt.
    """
    params = ChainParams(N=5, epsilon=0.3)
    S0 = propagator(params, mode_spectrum(params), 0.0)
    np.testing.assert_allclose(S0.matrix, np.eye(10), atol=1e-14)

    free = ChainParams(N=1, epsilon=0.0, omega=1.5)
    t = 0.8
    S = propagator(free, mode_spectrum(free), t).matrix
    wt = 1.5 * t
    expected = [[np.cos(wt), np.sin(wt)], [-np.sin(wt), np.cos(wt)]]
    np.testing.assert_allclose(S, expected, atol=1e-14)


def test_propagator_symplectic_and_group_law():
    """
    Test symplecticity, the group law and time reversal.

    This test ensures that the closed-form propagator preserves the
    commutation matrix and composes over consecutive time steps.

    Assertions
    ----------
    - max|SΓSᵀ − Γ| < 1e-10 at (N=8, ε=0.3, t=2.7) and t=5.
    - S(t₁)S(t₂) = S(t₁+t₂) and S(−t)S(t) = I to 1e-9.
    """
    params = ChainParams(N=8, epsilon=0.3)
    spectrum = mode_spectrum(params)
    for t in (2.7, 5.0):
        assert verify_symplectic(propagator(params, spectrum, t)) < 1e-10
    rng = np.random.default_rng(7)
    for t1, t2 in rng.uniform(0.0, 10.0, size=(10, 2)):
        S1 = propagator(params, spectrum, t1).matrix
        S2 = propagator(params, spectrum, t2).matrix
        S12 = propagator(params, spectrum, t1 + t2).matrix
        back = propagator(params, spectrum, -t1).matrix
        np.testing.assert_allclose(S1 @ S2, S12, atol=1e-9)
        np.testing.assert_allclose(back @ S1, np.eye(16), atol=1e-9)


def test_symplectic_closure_random():
    """
    Test symplectic closure on random parameters.

    Assertions
    ----------
    - For 100 random (N ≤ 32, ε ∈ [0,5], t ∈ [−10,10]) the residual is
      below 1e-9.
    """
    rng = np.random.default_rng(2024)
    for _ in range(100):
        params = ChainParams(
            N=int(rng.integers(1, 33)), epsilon=float(rng.uniform(0, 5))
        )
        t = float(rng.uniform(-10, 10))
        S = propagator(params, mode_spectrum(params), t)
        assert verify_symplectic(S) < 1e-9


def test_spectral_consistency():
    """
    Test the analytic spectrum against a numerical eigendecomposition.

    Assertions
    ----------
    - Both propagators agree to 1e-10.
    """
    params = ChainParams(N=12, epsilon=0.8)
    t = 3.3
    analytic = propagator(params, mode_spectrum(params), t).matrix
    dense = dense_propagator(params, t).matrix
    np.testing.assert_allclose(analytic, dense, atol=1e-10)


def test_propagator_blocks():
    """
    Test the block view of a propagator.

    Assertions
    ----------
    - The diagonal blocks are equal and the blocks tile the matrix.
    """
    params = ChainParams(N=4, epsilon=0.2)
    S = propagator(params, mode_spectrum(params), 1.1)
    qq, qp, pq, pp = S.blocks
    np.testing.assert_array_equal(qq, pp)
    np.testing.assert_array_equal(
        np.block([[qq, qp], [pq, pp]]), S.matrix
    )
    assert S.N == 4


def test_propagator_rejects_non_finite_time():
    """
    Test time validation.

    Assertions
    ----------
    - A non-finite time raises ParameterError.
    """
    params = ChainParams(N=2, epsilon=0.1)
    with pytest.raises(ParameterError):
        propagator(params, mode_spectrum(params), float("nan"))


def test_verify_symplectic_examples():
    """
    Test the residual on known matrices.

    Assertions
    ----------
    - The identity gives 0.
    - diag(2, 2) gives 3.
    - Odd and non-square inputs raise ParameterError.
    """
    assert verify_symplectic(np.eye(6)) == 0.0
    assert verify_symplectic(np.diag([2.0, 2.0])) == pytest.approx(3.0)
    assert verify_symplectic(
        Propagator(time=0.0, matrix=commutation_matrix(3))
    ) == pytest.approx(0.0)
    with pytest.raises(ParameterError):
        verify_symplectic(np.eye(3))
    with pytest.raises(ParameterError):
        verify_symplectic(np.ones((2, 4)))
