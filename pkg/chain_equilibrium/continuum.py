"""
Continuum Module
================

Covariance elements of the infinitely long chain (N → ∞), where the mode
sums become integrals over φ ∈ [0, π]:

    C^{(a,κ)}_{s,l}(t) = (1/π) ∫ sin(sφ) sin(lφ) λ^κ(φ) cos^a[ωt λ^½(φ)] dφ
    S^{(a,κ)}_{s,l}(t) = (1/π) ∫ sin(sφ) sin(lφ) λ^κ(φ) sin^a[ωt λ^½(φ)] dφ

with λ(φ) = 1 + 2ε(1 − cos φ) = (1+2ε)(1 − 2γ cos φ).

Three evaluation routes are offered: direct quadrature (exact up to the
tolerance), closed forms in Bessel functions valid to O(γ) at weak
coupling, and the γΩt → ∞ limits. Sites s, l are counted from the fixed
end of the half-infinite chain.

Assembly of a covariance element from the integrals follows from
V(t) = S(t) V(0) Sᵀ(t) with the split of V(0) into a homogeneous bath part
and one correction per system site; every matrix function f(A) becomes
2·(1/π)∫ sin(sφ) sin(lφ) f(λ(φ)) dφ in the limit.
"""

import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.special import jv

from chain_equilibrium.chain import ChainParams
from chain_equilibrium.config import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_QUADRATURE_TOL,
    WEAK_COUPLING_WARN_GAMMA,
)
from chain_equilibrium.exceptions import ParameterError, QuadratureError
from chain_equilibrium.gaussian import PrepSpec
from chain_equilibrium.logger_config import logger
from chain_equilibrium.quadrature import integrate

KAPPAS = (-1.0, -0.5, 0.0, 0.5, 1.0)
BLOCKS = ("QQ", "PP", "QP")
METHODS = ("quadrature", "weak_coupling", "asymptotic", "limit")


@dataclass(frozen=True)
class IntegralSpec:
    """
    One oscillatory integral.

    Attributes
    ----------
    a : int
        Power of the trigonometric factor, 1 or 2.
    kappa : float
        Power of λ(φ), one of -1, -1/2, 0, 1/2, 1.
    s, l : int
        Site indices, at least 1.
    t : float
        Time in units of 1/ω.
    trig : str
        "C" for the cosine family, "S" for the sine family.
    """

    a: int
    kappa: float
    s: int
    l: int  # noqa: E741
    t: float = 0.0
    trig: str = "C"

    def __post_init__(self):
        if self.a not in (1, 2):
            raise ParameterError(f"a must be 1 or 2, got {self.a}")
        if float(self.kappa) not in KAPPAS:
            raise ParameterError(f"kappa must be one of {KAPPAS}")
        if self.s < 1 or self.l < 1:
            raise ParameterError(
                f"site indices must be positive, got {self.s}, {self.l}"
            )
        if self.trig not in ("C", "S"):
            raise ParameterError(f"trig must be 'C' or 'S', got {self.trig}")
        object.__setattr__(self, "kappa", float(self.kappa))

    def key(self) -> Tuple:
        """Cache key; the integrals are symmetric in (s, l)."""
        lo, hi = sorted((self.s, self.l))
        return (self.trig, self.a, self.kappa, lo, hi, self.t)


@dataclass(frozen=True)
class ContinuumParams:
    """
    Parameters of a continuum evaluation.

    ``gamma`` and ``Omega`` determine ε = γ/(1−2γ) and ω = Ω/√(1+2ε).
    """

    eta: float
    mu: float
    gamma: float
    Omega: float
    system_sites: Tuple[int, ...]

    def __post_init__(self):
        if not 0.0 <= self.gamma < 0.5:
            raise ParameterError(
                f"gamma must lie in [0, 1/2), got {self.gamma}"
            )
        if not self.Omega > 0:
            raise ParameterError(f"Omega must be positive, got {self.Omega}")
        sites = tuple(int(r) for r in self.system_sites)
        if any(r < 1 for r in sites) or len(set(sites)) != len(sites):
            raise ParameterError(f"invalid system sites {sites}")
        object.__setattr__(self, "system_sites", sites)

    @property
    def epsilon(self) -> float:
        return self.gamma / (1.0 - 2.0 * self.gamma)

    @property
    def omega(self) -> float:
        return self.Omega / math.sqrt(1.0 + 2.0 * self.epsilon)

    @classmethod
    def from_chain(
        cls, params: ChainParams, prep: PrepSpec
    ) -> "ContinuumParams":
        """Continuum counterpart of a finite chain and its preparation."""
        return cls(
            eta=prep.eta,
            mu=prep.mu,
            gamma=params.gamma,
            Omega=float(params.Omega),
            system_sites=prep.system_sites,
        )


def lambda_continuum(phi, epsilon: float):
    """
    λ(φ) = 1 + 2ε(1 − cos φ) for φ ∈ [0, π]; ranges over [1, 1+4ε].
    """
    phi_arr = np.asarray(phi, dtype=float)
    if np.any(phi_arr < -1e-12) or np.any(phi_arr > np.pi + 1e-12):
        raise ParameterError("phi must lie in [0, pi]")
    value = 1.0 + 2.0 * epsilon * (1.0 - np.cos(phi_arr))
    return float(value) if np.ndim(value) == 0 else value


def _integrand(spec: IntegralSpec, epsilon: float, omega: float):
    trig = np.cos if spec.trig == "C" else np.sin
    wt = omega * spec.t

    def f(phi):
        lam = 1.0 + 2.0 * epsilon * (1.0 - np.cos(phi))
        value = np.sin(spec.s * phi) * np.sin(spec.l * phi)
        if spec.kappa:
            value = value * lam**spec.kappa
        return value * trig(wt * np.sqrt(lam)) ** spec.a / np.pi

    return f


def csfun(
    spec: IntegralSpec,
    epsilon: float,
    omega: float = 1.0,
    tol: float = DEFAULT_QUADRATURE_TOL,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """
    Evaluate C^{(a,κ)}_{s,l}(t) or S^{(a,κ)}_{s,l}(t) by quadrature.

    Parameters
    ----------
    spec : IntegralSpec
        Which integral.
    epsilon : float
        Coupling ratio ε.
    omega : float
        Base frequency ω.
    tol : float
        Absolute tolerance.
    node_budget : int
        Maximum integrand evaluations.

    Returns
    -------
    float
        The integral.

    Raises
    ------
    QuadratureError
        If the node budget is exhausted (only for extreme ωt).
    """
    max_frequency = (
        spec.s + spec.l + spec.a * abs(omega * spec.t) * epsilon + 1.0
    )
    result = integrate(
        _integrand(spec, epsilon, omega),
        0.0,
        math.pi,
        max_frequency=max_frequency,
        tol=tol,
        node_budget=node_budget,
    )
    return result.value


def bessel_reduction(s: int, gamma: float, x: float) -> float:
    """
    (1/π)∫₀^π cos(sφ) cos[x(1 − γ cos φ)] dφ = J_s(γx) cos(x − sπ/2).

    Raises
    ------
    ParameterError
        For negative x.
    """
    if x < 0:
        raise ParameterError(f"x must be non-negative, got {x}")
    s = abs(int(s))
    return float(jv(s, gamma * x) * math.cos(x - s * math.pi / 2.0))


def bessel_reduction_sin(s: int, gamma: float, x: float) -> float:
    """
    (1/π)∫₀^π cos(sφ) sin[x(1 − γ cos φ)] dφ = J_s(γx) sin(x − sπ/2).
    """
    if x < 0:
        raise ParameterError(f"x must be non-negative, got {x}")
    s = abs(int(s))
    return float(jv(s, gamma * x) * math.sin(x - s * math.pi / 2.0))


def _weak_cosine_moment(
    spec: IntegralSpec, m: int, gamma: float, x: float
) -> float:
    """(1/π)∫ cos(mφ) trig^a[x(1 − γ cos φ)] dφ in closed form."""
    m = abs(m)
    if spec.a == 1:
        if spec.trig == "C":
            return bessel_reduction(m, gamma, x)
        return bessel_reduction_sin(m, gamma, x)
    constant = 0.5 if m == 0 else 0.0
    oscillating = 0.5 * bessel_reduction(m, gamma, 2.0 * x)
    if spec.trig == "C":
        return constant + oscillating
    return constant - oscillating


def csfun_weak_coupling(
    spec: IntegralSpec, epsilon: float, omega: float = 1.0
) -> float:
    """
    O(γ) closed form of :func:`csfun` for weak coupling.

    Uses sin(sφ)sin(lφ) = ½[cos((s−l)φ) − cos((s+l)φ)],
    λ^κ ≈ (1+2ε)^κ(1 − 2κγ cos φ) and ωtλ^½ ≈ Ωt(1 − γ cos φ), after which
    every term is a Bessel reduction.
    """
    gamma = epsilon / (1.0 + 2.0 * epsilon)
    if gamma > WEAK_COUPLING_WARN_GAMMA:
        logger.warning(
            f"Weak-coupling closed forms used at gamma={gamma:.3g} > "
            f"{WEAK_COUPLING_WARN_GAMMA}"
        )
    scale = 1.0 + 2.0 * epsilon
    x = omega * math.sqrt(scale) * abs(spec.t)
    sign = -1.0 if (spec.t < 0 and spec.trig == "S" and spec.a == 1) else 1.0
    d, total = abs(spec.s - spec.l), spec.s + spec.l

    def moment(m):
        return _weak_cosine_moment(spec, m, gamma, x)

    leading = moment(d) - moment(total)
    shifted = (
        moment(d - 1) + moment(d + 1) - moment(total - 1) - moment(total + 1)
    )
    value = 0.5 * scale**spec.kappa * (leading - spec.kappa * gamma * shifted)
    return sign * value


def asymptotic_csfun(spec: IntegralSpec, gamma: float) -> float:
    """
    Limits for γΩt → ∞ to O(γ):

    C^{(2,0)} → δ_{s,l}/4; S^{(1,±½)}, C^{(1,0)} → 0;
    S^{(2,±1)} → ¼(δ_{s,l} ∓ γ[δ_{s,l+1} + δ_{s,l−1}]).

    Raises
    ------
    ParameterError
        For an (a, κ) combination without a stated limit.
    """
    delta = 1.0 if spec.s == spec.l else 0.0
    neighbour = 1.0 if abs(spec.s - spec.l) == 1 else 0.0
    combo = (spec.trig, spec.a, spec.kappa)
    if combo == ("C", 2, 0.0):
        return 0.25 * delta
    if combo in (("S", 1, 0.5), ("S", 1, -0.5), ("C", 1, 0.0)):
        return 0.0
    if combo in (("S", 2, 1.0), ("S", 2, -1.0)):
        return 0.25 * (delta - spec.kappa * gamma * neighbour)
    raise ParameterError(f"no asymptotic limit for {combo}")


def limiting_csfun(
    spec: IntegralSpec,
    epsilon: float,
    tol: float = DEFAULT_QUADRATURE_TOL,
) -> float:
    """
    Exact γΩt → ∞ limit of an integral: zero for a = 1, and for a = 2 the
    time average ½(1/π)∫ sin(sφ) sin(lφ) λ^κ dφ, without O(γ) truncation.
    """
    if spec.a == 1:
        return 0.0
    static = IntegralSpec(
        a=2, kappa=spec.kappa, s=spec.s, l=spec.l, t=0.0, trig="C"
    )
    # cos²(0) = 1, so this is the static integral
    return 0.5 * csfun(static, epsilon, 1.0, tol=tol)


class _IntegralCache:
    """Evaluates integrals once per (family, a, κ, s, l, t)."""

    def __init__(self, params: ContinuumParams, method: str, tol: float):
        if method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}")
        self.params = params
        self.method = method
        self.tol = tol
        self.values: Dict[Tuple, float] = {}

    def __call__(self, trig, a, kappa, s, l, t):  # noqa: E741
        spec = IntegralSpec(a=a, kappa=kappa, s=s, l=l, t=t, trig=trig)
        key = spec.key()
        if key not in self.values:
            self.values[key] = self._evaluate(spec)
        return self.values[key]

    def _evaluate(self, spec: IntegralSpec) -> float:
        eps, omega = self.params.epsilon, self.params.omega
        if self.method == "quadrature":
            return csfun(spec, eps, omega, tol=self.tol)
        if self.method == "weak_coupling":
            return csfun_weak_coupling(spec, eps, omega)
        if self.method == "asymptotic":
            return asymptotic_csfun(spec, self.params.gamma)
        return limiting_csfun(spec, eps, tol=self.tol)


def _element(block: str, s: int, l: int, t: float, f) -> float:  # noqa: E741
    params = f.params
    eta, mu = params.eta, params.mu
    em = math.exp(-mu) - math.exp(-eta)
    ep = math.exp(mu) - math.exp(eta)
    sites = params.system_sites
    if block == "QQ":
        value = math.exp(-eta) * f("C", 2, 0, s, l, t) + math.exp(eta) * f(
            "S", 2, -1, s, l, t
        )
        for r in sites:
            value += 2.0 * (
                em * f("C", 1, 0, s, r, t) * f("C", 1, 0, l, r, t)
                + ep * f("S", 1, -0.5, s, r, t) * f("S", 1, -0.5, l, r, t)
            )
        return value
    if block == "PP":
        value = math.exp(eta) * f("C", 2, 0, s, l, t) + math.exp(-eta) * f(
            "S", 2, 1, s, l, t
        )
        for r in sites:
            value += 2.0 * (
                ep * f("C", 1, 0, s, r, t) * f("C", 1, 0, l, r, t)
                + em * f("S", 1, 0.5, s, r, t) * f("S", 1, 0.5, l, r, t)
            )
        return value
    if block == "QP":
        value = 0.5 * (
            math.exp(eta) * f("S", 1, -0.5, s, l, 2.0 * t)
            - math.exp(-eta) * f("S", 1, 0.5, s, l, 2.0 * t)
        )
        for r in sites:
            value += 2.0 * (
                ep * f("S", 1, -0.5, s, r, t) * f("C", 1, 0, l, r, t)
                - em * f("C", 1, 0, s, r, t) * f("S", 1, 0.5, l, r, t)
            )
        return value
    raise ParameterError(f"block must be one of {BLOCKS}, got {block!r}")


def covariance_element_continuum(
    block: str,
    s: int,
    l: int,  # noqa: E741
    t: float,
    params: ContinuumParams,
    method: str = "quadrature",
    tol: float = DEFAULT_QUADRATURE_TOL,
) -> float:
    """
    One element of the continuum covariance matrix.

    Parameters
    ----------
    block : str
        "QQ", "PP" or "QP" (⟨Q_s P_l⟩ part).
    s, l : int
        Sites.
    t : float
        Time in units of 1/ω.
    params : ContinuumParams
        Squeezing, coupling and system sites.
    method : str
        "quadrature", "weak_coupling", "asymptotic" or "limit".
    tol : float
        Quadrature tolerance.

    Returns
    -------
    float
        [V_block(t)]_{s,l}.
    """
    cache = _IntegralCache(params, method, tol)
    return _element(block, s, l, t, cache)


def continuum_covariance(
    sites: Sequence[int],
    t: float,
    params: ContinuumParams,
    method: str = "quadrature",
    tol: float = DEFAULT_QUADRATURE_TOL,
    errors: str = "raise",
) -> np.ndarray:
    """
    The 2n×2n continuum covariance of ``sites`` at time t, ordered
    (Q_{r_1}..Q_{r_n}, P_{r_1}..P_{r_n}). Integrals shared between
    elements are evaluated once.

    With ``errors="nan"`` an element whose quadrature does not converge is
    logged and set to NaN instead of raising.
    """
    if errors not in ("raise", "nan"):
        raise ParameterError(f"errors must be 'raise' or 'nan', got {errors}")
    sites = tuple(int(r) for r in sites)
    if not sites:
        raise ParameterError("site list is empty")
    cache = _IntegralCache(params, method, tol)

    def element(block, s, l):  # noqa: E741
        try:
            return _element(block, s, l, t, cache)
        except QuadratureError as exc:
            if errors == "raise":
                raise
            logger.warning(f"V_{block}[{s},{l}] at t={t}: {exc}")
            return math.nan

    n = len(sites)
    V = np.zeros((2 * n, 2 * n))
    for i, s in enumerate(sites):
        for j, l in enumerate(sites):  # noqa: E741
            if j >= i:
                V[i, j] = V[j, i] = element("QQ", s, l)
                V[n + i, n + j] = V[n + j, n + i] = element("PP", s, l)
            V[i, n + j] = V[n + j, i] = element("QP", s, l)
    return V


def limiting_covariance(
    sites: Sequence[int],
    params: ContinuumParams,
    tol: float = DEFAULT_QUADRATURE_TOL,
) -> np.ndarray:
    """Exact γΩt → ∞ limit of :func:`continuum_covariance`."""
    return continuum_covariance(sites, 0.0, params, method="limit", tol=tol)


def steady_state_covariance(
    n: int, eta: float, gamma: float, form: str = "printed"
) -> np.ndarray:
    """
    Stationary covariance V^{(n)} = V_Q ⊕ V_P of n consecutive sites.

    With ``form="printed"``:

        [V_Q]_{sl} = ½(cosh η δ_{sl} + (e^{-η}γ/2)[δ_{s,l+1} + δ_{s,l-1}])
        [V_P]_{sl} = ½(cosh η δ_{sl} − (e^{η}γ/2)[δ_{s,l+1} + δ_{s,l-1}])

    which is diag(cosh η, cosh η)/2 for one mode. ``form="derived"`` swaps
    the exponents of the neighbour terms, as the long-time limit of the
    dynamics produces them; purity and the Simon value are the same for
    both.
    """
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if form not in ("printed", "derived"):
        raise ParameterError(f"unknown form {form!r}")
    q_exp, p_exp = (-eta, eta) if form == "printed" else (eta, -eta)
    ones = np.ones(n - 1)
    neighbours = np.diag(ones, 1) + np.diag(ones, -1)
    diagonal = math.cosh(eta) * np.eye(n)
    V_Q = 0.5 * (diagonal + 0.5 * math.exp(q_exp) * gamma * neighbours)
    V_P = 0.5 * (diagonal - 0.5 * math.exp(p_exp) * gamma * neighbours)
    return block_diag(V_Q, V_P)
