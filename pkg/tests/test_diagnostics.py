import logging
import math

import numpy as np
import pytest

from chain_equilibrium.chain import ChainParams
from chain_equilibrium.continuum import steady_state_covariance
from chain_equilibrium.diagnostics import (
    boltzmann_covariance,
    effective_beta,
    entanglement_threshold,
    equilibration_distance,
    equilibrium_report,
    fit_power_law,
    mean_occupation,
    partial_transpose_symplectic_eigenvalues,
    ppt_simon_value,
    rms_envelope,
    simon_criterion,
    two_mode_purity,
)
from chain_equilibrium.exceptions import InfiniteBetaError, ParameterError
from chain_equilibrium.gaussian import PrepSpec, evolve_reduced


def test_effective_beta_examples():
    """
    Test the inverse temperature.

    Assertions
    ----------
    - cosh η = 2 gives β = ln 3.
    - β decreases strictly in |η| and is even in η.
    - η = 0 raises InfiniteBetaError.
    - Far in the tail β follows 4e^{-|η|} and underflows to zero
      instead of overflowing.
    """
    assert effective_beta(math.acosh(2.0)) == pytest.approx(
        math.log(3.0), abs=1e-14
    )
    etas = np.linspace(0.05, 6.0, 120)
    betas = [effective_beta(e) for e in etas]
    assert all(a > b for a, b in zip(betas, betas[1:]))
    assert effective_beta(-0.7) == effective_beta(0.7)
    with pytest.raises(InfiniteBetaError):
        effective_beta(0.0)
    assert effective_beta(30.0) == pytest.approx(
        4.0 * math.exp(-30.0), rel=1e-12
    )
    for eta in (800.0, -800.0):
        assert 0.0 <= effective_beta(eta) < 1e-300


def test_beta_round_trip():
    """
    Test cosh η = coth(β/2) over η ∈ [0.01, 5].

    Assertions
    ----------
    - The round trip holds to 1e-12.
    """
    for eta in np.linspace(0.01, 5.0, 300):
        beta = effective_beta(eta)
        assert abs(math.cosh(eta) - 1.0 / math.tanh(beta / 2)) < 1e-12


def test_boltzmann_covariance():
    """
    Test the thermal covariance.

    Assertions
    ----------
    - β = ln 3 gives the identity, β = inf the ground state.
    - β ≤ 0 raises ParameterError.
    """
    np.testing.assert_allclose(
        boltzmann_covariance(math.log(3.0)), np.eye(2), atol=1e-15
    )
    np.testing.assert_array_equal(
        boltzmann_covariance(math.inf), np.eye(2) / 2
    )
    for beta in (0.0, -1.0):
        with pytest.raises(ParameterError):
            boltzmann_covariance(beta)


@pytest.mark.parametrize("eta", [0.1, 0.5, 1.0, 2.0])
def test_boltzmann_identification(eta):
    """
    Test that the relaxed single-mode state is thermal.

    This test ensures that the stationary single-site covariance is the
    thermal state of the oscillator at the effective inverse temperature.

    Assertions
    ----------
    - boltzmann_covariance(effective_beta(η)) equals the stationary
      single-mode covariance to 1e-14 for any γ.
    """
    thermal = boltzmann_covariance(effective_beta(eta))
    for gamma in (0.0, 0.05, 0.2):
        steady = steady_state_covariance(1, eta, gamma)
        assert np.max(np.abs(thermal - steady)) <= 1e-14


def test_mean_occupation():
    """
    Test n̄ = (cosh η − 1)/2.

    Assertions
    ----------
    - cosh η = 3 gives n̄ = 1.
    """
    assert mean_occupation(math.acosh(3.0)) == pytest.approx(1.0)


def test_simon_criterion_examples():
    """
    Test the printed separability inequality.

    Assertions
    ----------
    - γ = 0 gives cosh⁴η − cosh 2η ≥ 0, zero at η = 0.
    - η = 0, γ = 0.1 gives (1 − 0.0025)² − 1 and entanglement.
    - γ outside [0, 1/2) raises ParameterError.
    """
    value, entangled = simon_criterion(0.0, 0.0)
    assert value == pytest.approx(0.0, abs=1e-15)
    assert not entangled
    value, entangled = simon_criterion(0.8, 0.0)
    assert value == pytest.approx(math.cosh(0.8) ** 4 - math.cosh(1.6))
    assert not entangled

    value, entangled = simon_criterion(0.0, 0.1)
    assert value == pytest.approx((1 - 0.0025) ** 2 - 1, abs=1e-15)
    assert entangled
    with pytest.raises(ParameterError):
        simon_criterion(0.1, 0.5)


def test_ppt_value_relation_to_printed():
    """
    Test the generic PPT polynomial on the stationary matrix.

    Assertions
    ----------
    - It equals the printed value minus γ²/2.
    - It equals (4d̃₊² − 1)(4d̃₋² − 1) for the partial-transpose
      symplectic eigenvalues d̃.
    """
    for eta, gamma in ((0.05, 0.1), (0.3, 0.05), (1.2, 0.2)):
        V = steady_state_covariance(2, eta, gamma)
        generic = ppt_simon_value(V)
        printed, _ = simon_criterion(eta, gamma)
        assert generic == pytest.approx(printed - gamma**2 / 2, abs=1e-12)
        d_minus, d_plus = partial_transpose_symplectic_eigenvalues(V)
        assert generic == pytest.approx(
            (4 * d_plus**2 - 1) * (4 * d_minus**2 - 1), abs=1e-12
        )


def test_ppt_product_state_separable():
    """
    Test the generic criterion on product states.

    Assertions
    ----------
    - The vacuum gives 0 and a thermal product state a positive value.
    - A non-4×4 input raises ParameterError.
    """
    assert ppt_simon_value(np.eye(4) / 2) == pytest.approx(0.0, abs=1e-15)
    assert ppt_simon_value(np.eye(4)) > 0
    with pytest.raises(ParameterError):
        ppt_simon_value(np.eye(2))


def test_simon_sign_agreement_grid(caplog):
    """
    Test sign agreement between the printed and generic criteria on a
    50×50 (η, γ) grid.

    Assertions
    ----------
    - Signs agree everywhere outside the band 0 < printed < γ²/2.
    - Inside the band a warning is logged.
    """
    band_points = 0
    with caplog.at_level(logging.WARNING, logger="chain_equilibrium"):
        for eta in np.linspace(0.0, 2.0, 50):
            for gamma in np.linspace(0.0, 0.3, 50):
                printed, entangled = simon_criterion(eta, gamma)
                generic = ppt_simon_value(
                    steady_state_covariance(2, eta, gamma)
                )
                if 0 < printed < gamma**2 / 2:
                    band_points += 1
                    continue
                assert entangled == (generic < 0)
    if band_points:
        assert "disagree" in caplog.text


@pytest.mark.parametrize("gamma", [0.01, 0.05, 0.1])
def test_entanglement_threshold(gamma):
    """
    Test the entangled→separable transition.

    This test ensures that bisection locates the squeezing at which the
    separability criterion changes sign.

    Assertions
    ----------
    - The printed value vanishes at η* to within bisection accuracy and
      changes sign across it.
    - η* is close to (γ²/2)^{1/4}.
    - The generic criterion keeps entanglement to a larger η.
    """
    eta_star = entanglement_threshold(gamma)
    assert simon_criterion(eta_star - 1e-6, gamma)[1]
    assert not simon_criterion(eta_star + 1e-6, gamma)[1]
    assert eta_star == pytest.approx((gamma**2 / 2) ** 0.25, rel=0.2)
    assert entanglement_threshold(gamma, kind="ppt") > eta_star
    assert entanglement_threshold(0.0) == 0.0
    with pytest.raises(ParameterError):
        entanglement_threshold(gamma, kind="other")


@pytest.mark.parametrize("gamma", [0.01, 0.05, 0.1])
def test_purity_entanglement_tradeoff(gamma):
    """
    Test that entanglement survives only at nearly vanishing mixedness.

    Assertions
    ----------
    - Wherever the printed criterion reports entanglement, ν⁽²⁾ > 1 − γ,
      and ν⁽²⁾ > 0.99 when γ ≤ 0.01.
    """
    eta_star = entanglement_threshold(gamma)
    for eta in np.linspace(0.0, eta_star, 40, endpoint=False):
        assert simon_criterion(eta, gamma)[1]
        nu2 = two_mode_purity(eta, gamma)
        assert nu2 > 1 - gamma
        if gamma <= 0.01:
            assert nu2 > 0.99


def test_two_mode_purity_examples(caplog):
    """
    Test the two-mode purity.

    Assertions
    ----------
    - γ = 0 gives 1/cosh²η and η = γ = 0 gives 1.
    - η = 0, γ = 0.1 gives 1/(1 − 0.0025) > 1, reported by a warning.
    """
    assert two_mode_purity(0.9, 0.0) == pytest.approx(math.cosh(0.9) ** -2)
    assert two_mode_purity(0.0, 0.0) == pytest.approx(1.0)
    with caplog.at_level(logging.WARNING, logger="chain_equilibrium"):
        value = two_mode_purity(0.0, 0.1)
    assert value == pytest.approx(1 / (1 - 0.0025))
    assert "> 1" in caplog.text


def test_equilibrium_report():
    """
    Test the collected report.

    Assertions
    ----------
    - ν₁ = 1/cosh η to 1e-12 and the entropy matches it.
    - η = 0 records β = inf.
    - The record keeps the field order.
    """
    report = equilibrium_report(1.0, 0.05)
    assert report.nu1 == pytest.approx(1 / math.cosh(1.0), abs=1e-12)
    assert report.beta == pytest.approx(effective_beta(1.0))
    assert report.entangled == (report.simon_value < 0)
    record = report.to_record()
    assert list(record)[:3] == ["eta", "gamma", "beta"]
    assert list(record)[-1] == "entangled"
    assert math.isinf(equilibrium_report(0.0, 0.05).beta)


def test_equilibration_distance():
    """
    Test the distance series.

    This test ensures that the distance of a covariance series to its
    target is the largest elementwise deviation at each time.

    Assertions
    ----------
    - A series equal to the target gives zeros.
    - A dimension mismatch raises ParameterError.
    """
    target = steady_state_covariance(1, 0.5, 0.0)
    series = [(t, target.copy()) for t in (0.0, 1.0, 2.0)]
    assert equilibration_distance(series, target) == [
        (0.0, 0.0),
        (1.0, 0.0),
        (2.0, 0.0),
    ]
    with pytest.raises(ParameterError):
        equilibration_distance([(0.0, np.eye(4))], target)


def test_uncoupled_distance_does_not_decay():
    """
    Test the distance for an uncoupled chain.

    Assertions
    ----------
    - Without coupling the distance returns to its initial value after
      each period π/ω.
    """
    params = ChainParams(N=7, epsilon=0.0)
    prep = PrepSpec(1.0, 1.0, (4,))
    target = steady_state_covariance(1, 1.0, 0.0)
    series = [
        (t, evolve_reduced(params, prep, t)[0].V_sub)
        for t in (0.0, math.pi, 10 * math.pi)
    ]
    distances = [d for _, d in equilibration_distance(series, target)]
    assert distances[0] > 0.1
    np.testing.assert_allclose(distances, distances[0], atol=1e-10)


def test_fit_power_law_and_envelope():
    """
    Test the fit helpers.

    Assertions
    ----------
    - y = 3x^{-1/2} is recovered.
    - The RMS of a sampled sine over a period is 1/√2.
    - Non-positive data raise ParameterError.
    """
    x = np.array([1.0, 4.0, 16.0, 64.0])
    exponent, prefactor = fit_power_law(x, 3.0 * x**-0.5)
    assert exponent == pytest.approx(-0.5)
    assert prefactor == pytest.approx(3.0)
    samples = np.sin(np.linspace(0, 2 * math.pi, 400, endpoint=False))
    assert rms_envelope(samples) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ParameterError):
        fit_power_law([1.0, 2.0], [1.0, -1.0])
    with pytest.raises(ParameterError):
        rms_envelope([])
