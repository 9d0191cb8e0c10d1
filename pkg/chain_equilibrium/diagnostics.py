"""
Diagnostics Module
==================

Physics diagnostics on reduced states: the effective temperature of a
relaxed oscillator, its Boltzmann form, two-mode separability and the
distance of a time series from its stationary state.

β is measured in units of 1/(ħω) with ħω = 1.

Classes
-------
EquilibriumReport:
    Diagnostics of the stationary state at one (η, γ) point.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from chain_equilibrium.continuum import steady_state_covariance
from chain_equilibrium.exceptions import InfiniteBetaError, ParameterError
from chain_equilibrium.gaussian import (
    purity,
    single_mode_entropy,
    symplectic_eigenvalues,
)
from chain_equilibrium.logger_config import logger

SIMON_KINDS = ("printed", "ppt")

# Mode ordering (q1, p1, q2, p2) from (Q1, Q2, P1, P2)
_MODE_ORDER = [0, 2, 1, 3]
_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class EquilibriumReport:
    """
    Stationary-state diagnostics at one parameter point.

    Attributes
    ----------
    eta : float
        Bath squeezing.
    gamma : float
        Coupling γ.
    beta : float
        Inverse temperature; ``inf`` at η = 0.
    n_bar : float
        Mean occupation (cosh η − 1)/2.
    nu1 : float
        Single-mode purity.
    nu2 : float
        Two-mode purity of neighbouring oscillators.
    entropy1 : float
        Single-mode von Neumann entropy.
    simon_value : float
        Left side of the separability inequality; negative if entangled.
    ppt_value : float
        The generic two-mode PPT polynomial on the same matrix.
    entangled : bool
        ``simon_value < 0``.
    """

    eta: float
    gamma: float
    beta: float
    n_bar: float
    nu1: float
    nu2: float
    entropy1: float
    simon_value: float
    ppt_value: float
    entangled: bool

    def to_record(self) -> Dict[str, object]:
        """Flat key-value record, fields in declaration order."""
        return asdict(self)


def effective_beta(eta: float) -> float:
    """
    Inverse temperature of the relaxed oscillator,
    β = 2 arccoth(cosh η) = 2 artanh(1/cosh η) = −2 ln tanh(|η|/2).

    Below |η| = 1 the tanh form is used, where 1/cosh η is close to 1;
    above it β = 2[ln(1 + e^{−|η|}) − ln(1 − e^{−|η|})], which stays finite
    for any η and tends to 0⁺ as |η| → ∞.

    Raises
    ------
    InfiniteBetaError
        At η = 0, where the state is the ground state.
    """
    if eta == 0:
        raise InfiniteBetaError("eta = 0 gives zero temperature (beta = inf)")
    if abs(eta) < 1.0:
        return -2.0 * math.log(math.tanh(abs(eta) / 2.0))
    x = math.exp(-abs(eta))
    return 2.0 * (math.log1p(x) - math.log1p(-x))


def boltzmann_covariance(beta: float) -> np.ndarray:
    """
    Covariance ½ coth(β/2) I₂ of a thermal oscillator at inverse
    temperature β; β = inf gives the ground state I/2.
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if math.isinf(beta):
        return 0.5 * np.eye(2)
    return 0.5 / math.tanh(beta / 2.0) * np.eye(2)


def mean_occupation(eta: float) -> float:
    """n̄ = (cosh η − 1)/2."""
    return 0.5 * (math.cosh(eta) - 1.0)


def _check_gamma(gamma: float):
    if not 0.0 <= gamma < 0.5:
        raise ParameterError(f"gamma must lie in [0, 1/2), got {gamma}")


def _determinant_factors(eta: float, gamma: float) -> Tuple[float, float]:
    c2 = math.cosh(eta) ** 2
    return (
        c2 - math.exp(-2.0 * eta) * gamma**2 / 4.0,
        c2 - math.exp(2.0 * eta) * gamma**2 / 4.0,
    )


def _printed_simon_value(eta: float, gamma: float) -> float:
    first, second = _determinant_factors(eta, gamma)
    return first * second - math.cosh(2.0 * eta)


def ppt_simon_value(V: np.ndarray) -> float:
    """
    Generic two-mode PPT polynomial

        16[det A det B + (¼ − |det C|)² − tr(AJCJBJCᵀJ) − ¼(det A + det B)]

    for a 4×4 covariance in (Q1, Q2, P1, P2) ordering, A, B the single-mode
    blocks and C the cross block. Negative values mean entanglement.
    """
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 covariance, got {V.shape}")
    M = V[np.ix_(_MODE_ORDER, _MODE_ORDER)]
    A, B, C = M[:2, :2], M[2:, 2:], M[:2, 2:]
    det_a, det_b = np.linalg.det(A), np.linalg.det(B)
    mixed = np.trace(A @ _J @ C @ _J @ B @ _J @ C.T @ _J)
    value = (
        det_a * det_b
        + (0.25 - abs(np.linalg.det(C))) ** 2
        - mixed
        - 0.25 * (det_a + det_b)
    )
    return float(16.0 * value)


def partial_transpose_symplectic_eigenvalues(V: np.ndarray) -> np.ndarray:
    """
    Symplectic eigenvalues of the partial transpose (P₂ → −P₂) of a
    two-mode covariance in (Q1, Q2, P1, P2) ordering. The state is
    entangled iff the smaller one is below ½.
    """
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 covariance, got {V.shape}")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return symplectic_eigenvalues(flip @ V @ flip)


def simon_criterion(eta: float, gamma: float) -> Tuple[float, bool]:
    """
    Separability test for two neighbouring oscillators in the stationary
    state,

        value = (cosh²η − e^{−2η}γ²/4)(cosh²η − e^{2η}γ²/4) − cosh 2η,

    entangled when value < 0. A disagreement in sign with
    :func:`ppt_simon_value` on the same matrix is logged.

    Returns
    -------
    tuple
        (value, entangled).
    """
    _check_gamma(gamma)
    value = _printed_simon_value(eta, gamma)
    generic = ppt_simon_value(steady_state_covariance(2, eta, gamma))
    if (value < 0) != (generic < 0):
        logger.warning(
            f"Printed Simon value {value:.6g} and generic PPT value "
            f"{generic:.6g} disagree at eta={eta}, gamma={gamma}"
        )
    return value, value < 0


def two_mode_purity(eta: float, gamma: float) -> float:
    """
    ν⁽²⁾ = [(cosh²η − e^{−2η}γ²/4)(cosh²η − e^{2η}γ²/4)]^{−1/2}.

    Values above 1 flag the truncation of the stationary matrix at small η;
    they are logged, not clamped.
    """
    _check_gamma(gamma)
    first, second = _determinant_factors(eta, gamma)
    product = first * second
    if product <= 0:
        raise ParameterError(
            f"stationary two-mode matrix is not positive definite at "
            f"eta={eta}, gamma={gamma}"
        )
    nu2 = product**-0.5
    if nu2 > 1.0:
        logger.warning(
            f"Two-mode purity {nu2:.12g} > 1 at eta={eta}, gamma={gamma}"
        )
    return nu2


def entanglement_threshold(
    gamma: float,
    kind: str = "printed",
    eta_max: float = 5.0,
    xtol: float = 1e-12,
) -> float:
    """
    The squeezing η*(γ) above which neighbouring oscillators are
    separable, by bisection on the chosen criterion.

    Parameters
    ----------
    gamma : float
        Coupling γ.
    kind : str
        "printed" for the scalar inequality, "ppt" for the generic
        polynomial on the stationary matrix.
    eta_max : float
        Upper end of the search bracket.
    xtol : float
        Absolute tolerance on η*.

    Returns
    -------
    float
        η*; zero at γ = 0.
    """
    _check_gamma(gamma)
    if kind not in SIMON_KINDS:
        raise ParameterError(f"kind must be one of {SIMON_KINDS}")
    if gamma == 0:
        return 0.0

    def value(eta):
        if kind == "printed":
            return _printed_simon_value(eta, gamma)
        return ppt_simon_value(steady_state_covariance(2, eta, gamma))

    if value(0.0) >= 0 or value(eta_max) <= 0:
        raise ParameterError(
            f"no sign change of the {kind} criterion in [0, {eta_max}]"
        )
    return float(bisect(value, 0.0, eta_max, xtol=xtol))


def equilibrium_report(eta: float, gamma: float) -> EquilibriumReport:
    """Collect every stationary-state diagnostic at (η, γ)."""
    try:
        beta = effective_beta(eta)
    except InfiniteBetaError:
        beta = math.inf
    nu1 = purity(steady_state_covariance(1, eta, gamma))
    simon_value, entangled = simon_criterion(eta, gamma)
    return EquilibriumReport(
        eta=float(eta),
        gamma=float(gamma),
        beta=beta,
        n_bar=mean_occupation(eta),
        nu1=nu1,
        nu2=two_mode_purity(eta, gamma),
        entropy1=single_mode_entropy(min(nu1, 1.0)),
        simon_value=simon_value,
        ppt_value=ppt_simon_value(steady_state_covariance(2, eta, gamma)),
        entangled=bool(entangled),
    )


def equilibration_distance(
    series: Sequence[Tuple[float, np.ndarray]], target: np.ndarray
) -> List[Tuple[float, float]]:
    """
    Max-abs distance of each reduced covariance from ``target``.

    Parameters
    ----------
    series : sequence of (t, V_sub)
        Time series of reduced covariances.
    target : np.ndarray
        Stationary covariance of the same dimension.

    Returns
    -------
    list of (t, distance)
    """
    target = np.asarray(target, dtype=float)
    distances = []
    for t, V_sub in series:
        V_sub = np.asarray(V_sub, dtype=float)
        if V_sub.shape != target.shape:
            raise ParameterError(
                f"shape {V_sub.shape} at t={t} does not match target "
                f"{target.shape}"
            )
        distances.append((float(t), float(np.max(np.abs(V_sub - target)))))
    return distances


def rms_envelope(values: Sequence[float]) -> float:
    """Root-mean-square of an oscillating sample."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ParameterError("empty sample")
    return float(np.sqrt(np.mean(values**2)))


def fit_power_law(
    x: Sequence[float], y: Sequence[float]
) -> Tuple[float, float]:
    """
    Least-squares fit of y = A x^p on log–log axes.

    Returns
    -------
    tuple
        (p, A).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ParameterError("need at least two matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("power-law fit needs positive data")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(math.exp(intercept))
