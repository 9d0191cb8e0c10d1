"""
Gaussian Module
===============

Gaussian states of the chain at covariance level: the squeezed product
initial state, its exact evolution under S(t), and reduced subsystems with
their purity, symplectic spectrum and von Neumann entropy.

All states have zero first moments, so the covariance matrix
V_{αβ} = ½⟨{Δξ_α, Δξ_β}⟩ in the (Q_1..Q_N, P_1..P_N) ordering describes
them completely.

Classes
-------
CovarianceMatrix:
    A 2N×2N covariance matrix, optionally tagged with its time.
PrepSpec:
    Squeezing of bath (η) and system (μ) oscillators and the system sites.
SubsystemState:
    Reduced covariance of retained sites plus its diagnostics.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.fft import dst

from chain_equilibrium.chain import (
    ChainParams,
    ModeSpectrum,
    Propagator,
    commutation_matrix,
    mode_spectrum,
)
from chain_equilibrium.config import (
    ENTROPY_SERIES_THRESHOLD,
    PAIRING_TOL,
    PHYSICAL_TOL,
    SYMMETRY_TOL,
)
from chain_equilibrium.exceptions import NumericalError, ParameterError
from chain_equilibrium.logger_config import logger


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """
    Covariance matrix of an N-mode Gaussian state.

    Attributes
    ----------
    data : np.ndarray
        Real symmetric 2N×2N matrix.
    time : float
        Time of the state in units of 1/ω (0 for initial states).
    """

    data: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ParameterError(f"expected a square matrix, got {data.shape}")
        if data.shape[0] % 2:
            raise ParameterError(
                f"covariance matrices have even dimension, got {data.shape[0]}"
            )
        scale = max(1.0, float(np.max(np.abs(data))))
        if np.max(np.abs(data - data.T)) > SYMMETRY_TOL * scale:
            raise ParameterError("covariance matrix is not symmetric")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.dim // 2


@dataclass(frozen=True)
class PrepSpec:
    """
    Initial squeezed product state.

    Bath oscillators carry squeezing η, the oscillators at
    ``system_sites`` (1-based, strictly increasing) carry μ.
    """

    eta: float
    mu: float
    system_sites: Tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(r) for r in self.system_sites)
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ParameterError(
                f"system sites must be strictly increasing, got {sites}"
            )
        object.__setattr__(self, "system_sites", sites)

    def validate_for(self, N: int) -> "PrepSpec":
        """Check the sites against a chain of N oscillators."""
        if len(self.system_sites) > N:
            raise ParameterError(
                f"{len(self.system_sites)} system sites exceed N={N}"
            )
        for r in self.system_sites:
            if not 1 <= r <= N:
                raise ParameterError(f"site {r} outside 1..{N}")
        return self


@dataclass(frozen=True, eq=False)
class SubsystemState:
    """
    Reduced state of the retained ``sites``.

    ``V_sub`` is ordered (Q_{r_1}..Q_{r_n}, P_{r_1}..P_{r_n}).
    """

    sites: Tuple[int, ...]
    V_sub: np.ndarray
    nu: float
    entropy: float
    symplectic_eigs: np.ndarray
    time: float = 0.0


def initial_covariance(
    params: ChainParams, prep: PrepSpec
) -> CovarianceMatrix:
    """
    Covariance of the squeezed product state,
    V(0) = ½(D_Q ⊕ D_P) with D_Q = diag(e^{-η} on the bath, e^{-μ} on the
    system) and D_P = D_Q⁻¹.

    Parameters
    ----------
    params : ChainParams
        Chain parameters (only N is used).
    prep : PrepSpec
        Squeezing parameters and system sites.

    Returns
    -------
    CovarianceMatrix
        A pure state: every symplectic eigenvalue is 1/2.
    """
    d_q = _position_variances(params.N, prep)
    return CovarianceMatrix(np.diag(np.concatenate([d_q, 1.0 / d_q])) / 2.0)


def _position_variances(N: int, prep: PrepSpec) -> np.ndarray:
    """Diagonal of D_Q."""
    prep.validate_for(N)
    d_q = np.full(N, math.exp(-prep.eta))
    for r in prep.system_sites:
        d_q[r - 1] = math.exp(-prep.mu)
    return d_q


def split_covariance(
    V0: CovarianceMatrix, params: ChainParams, prep: PrepSpec
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Split V(0) into the homogeneous bath part v(η;0) = ½(e^{-η}I ⊕ e^{η}I)
    and one correction v_i per system site.

    Each v_i holds ½(e^{-μ}−e^{-η}) at (r_i, r_i) and ½(e^{μ}−e^{η}) at
    (N+r_i, N+r_i); v + Σ v_i reproduces V(0).

    Raises
    ------
    ParameterError
        If ``V0`` is not the initial covariance for ``prep``.
    """
    N = params.N
    expected = initial_covariance(params, prep)
    if V0.dim != expected.dim or not np.array_equal(V0.data, expected.data):
        raise ParameterError("V0 does not match the preparation")
    bath = np.diag(
        np.concatenate(
            [np.full(N, math.exp(-prep.eta)), np.full(N, math.exp(prep.eta))]
        )
    ) / 2.0
    corrections = []
    for r in prep.system_sites:
        v_i = np.zeros((2 * N, 2 * N))
        v_i[r - 1, r - 1] = 0.5 * (math.exp(-prep.mu) - math.exp(-prep.eta))
        v_i[N + r - 1, N + r - 1] = 0.5 * (
            math.exp(prep.mu) - math.exp(prep.eta)
        )
        corrections.append(v_i)
    return bath, corrections


def evolve(V0: CovarianceMatrix, S: Propagator) -> CovarianceMatrix:
    """
    Evolve a covariance matrix: V(t) = S V0 Sᵀ.

    Raises
    ------
    ParameterError
        If the dimensions differ.
    """
    if S.matrix.shape != V0.data.shape:
        raise ParameterError(
            f"propagator {S.matrix.shape} does not match covariance "
            f"{V0.data.shape}"
        )
    evolved = S.matrix @ V0.data @ S.matrix.T
    return CovarianceMatrix(0.5 * (evolved + evolved.T), time=S.time)


def purity(V: np.ndarray) -> float:
    """ν = [2ⁿ √det V]⁻¹, evaluated through log-determinants."""
    V = np.asarray(V, dtype=float)
    sign, logdet = np.linalg.slogdet(V)
    if sign <= 0:
        raise ParameterError("covariance matrix is not positive definite")
    n = V.shape[0] // 2
    return float(math.exp(-n * math.log(2.0) - 0.5 * logdet))


def symplectic_eigenvalues(V_sub: np.ndarray) -> np.ndarray:
    """
    Symplectic eigenvalues d_k of a 2n×2n covariance matrix, ascending.

    They are the moduli of the eigenvalues ±d_k of iΓV; each pair is
    checked and reported once.

    Raises
    ------
    ParameterError
        If the input is not symmetric positive definite.
    NumericalError
        If the ± pairs do not match within the pairing tolerance.
    """
    V_sub = np.asarray(V_sub, dtype=float)
    if V_sub.ndim != 2 or V_sub.shape[0] != V_sub.shape[1]:
        raise ParameterError(f"expected a square matrix, got {V_sub.shape}")
    if V_sub.shape[0] % 2:
        raise ParameterError("covariance matrices have even dimension")
    if np.linalg.eigvalsh(0.5 * (V_sub + V_sub.T))[0] <= 0:
        raise ParameterError("covariance matrix is not positive definite")
    n = V_sub.shape[0] // 2
    values = np.sort(
        np.linalg.eigvals(1j * commutation_matrix(n) @ V_sub).real
    )
    negative = -values[:n][::-1]
    positive = values[n:]
    if np.max(np.abs(positive - negative)) > PAIRING_TOL * max(
        1.0, float(positive[-1])
    ):
        raise NumericalError("symplectic eigenvalues do not pair as ±d")
    return 0.5 * (positive + negative)


def single_mode_entropy(nu: float) -> float:
    """
    Entropy of a single-mode Gaussian state of purity ν,

        S = ((1−ν)/(2ν)) ln((1+ν)/(1−ν)) − ln(2ν/(1+ν)),

    equal to (n̄+1)ln(n̄+1) − n̄ ln n̄ with n̄ = (1/ν − 1)/2. Above
    ν = 1 − 1e-6 the series n̄(1 − ln n̄) + n̄²/2 replaces the closed form.

    Raises
    ------
    ParameterError
        If ν ∉ (0, 1] beyond the physicality tolerance.
    """
    if not 0.0 < nu <= 1.0 + PHYSICAL_TOL:
        raise ParameterError(f"purity must lie in (0, 1], got {nu}")
    if nu >= 1.0:
        return 0.0
    if nu > 1.0 - ENTROPY_SERIES_THRESHOLD:
        n_bar = 0.5 * (1.0 / nu - 1.0)
        return n_bar * (1.0 - math.log(n_bar)) + 0.5 * n_bar**2
    return (
        (1.0 - nu) / (2.0 * nu) * math.log((1.0 + nu) / (1.0 - nu))
        - math.log(2.0 * nu / (1.0 + nu))
    )


def von_neumann_entropy(state) -> float:
    """
    Entropy of a reduced state: the sum of single-mode contributions over
    its symplectic eigenvalues, each with ν_k = 1/(2d_k). For one mode this
    is the closed form of :func:`single_mode_entropy`.

    Parameters
    ----------
    state : SubsystemState or np.ndarray
        A reduced state or directly its symplectic eigenvalues.
    """
    eigs = (
        state.symplectic_eigs
        if isinstance(state, SubsystemState)
        else np.asarray(state, dtype=float)
    )
    return float(sum(single_mode_entropy(1.0 / (2.0 * d)) for d in eigs))


def _site_indices(N: int, sites: Sequence[int]) -> np.ndarray:
    sites = tuple(int(r) for r in sites)
    if not sites:
        raise ParameterError("site list is empty")
    if len(set(sites)) != len(sites):
        raise ParameterError(f"sites must be distinct, got {sites}")
    for r in sites:
        if not 1 <= r <= N:
            raise ParameterError(f"site {r} outside 1..{N}")
    q = np.array(sites) - 1
    return np.concatenate([q, q + N])


def make_subsystem_state(
    sites: Sequence[int], V_sub: np.ndarray, time: float = 0.0
) -> SubsystemState:
    """Wrap a reduced covariance with its diagnostics."""
    eigs = symplectic_eigenvalues(V_sub)
    if eigs[0] < 0.5 - PHYSICAL_TOL:
        logger.warning(
            f"Unphysical reduced state at t={time}: smallest symplectic "
            f"eigenvalue {eigs[0]:.12g}"
        )
    nu = purity(V_sub)
    entropy = von_neumann_entropy(np.maximum(eigs, 0.5))
    return SubsystemState(
        sites=tuple(int(r) for r in sites),
        V_sub=V_sub,
        nu=nu,
        entropy=entropy,
        symplectic_eigs=eigs,
        time=time,
    )


def reduce_subsystem(
    V: CovarianceMatrix, sites: Sequence[int]
) -> SubsystemState:
    """
    Reduced state of the given sites: the principal submatrix on their Q
    and P rows and columns, in the order the sites are listed.
    """
    idx = _site_indices(V.N, sites)
    V_sub = V.data[np.ix_(idx, idx)]
    return make_subsystem_state(sites, V_sub, time=V.time)


def propagator_rows(
    params: ChainParams,
    spectrum: ModeSpectrum,
    t: float,
    sites: Sequence[int],
) -> np.ndarray:
    """
    The 2n rows of S(t) belonging to ``sites`` (Q rows, then P rows).

    Row r of f(A) is the orthonormal DST-I of σ_{r,·} f(λ), so the dense
    σ is never formed.
    """
    N = params.N
    idx = _site_indices(N, sites)[: len(sites)]
    root = np.sqrt(spectrum.lambdas)
    phase = params.omega * t * root
    cos_f, sin_f = np.cos(phase), np.sin(phase)
    sigma_rows = np.sqrt(2.0 / (N + 1)) * np.sin(
        np.outer(idx + 1, spectrum.phis)
    )

    def rows_of(f):
        return dst(sigma_rows * f, type=1, norm="ortho", axis=-1)

    c = rows_of(cos_f)
    upper = rows_of(sin_f / root)
    lower = -rows_of(sin_f * root)
    return np.block([[c, upper], [lower, c]])


def verify_symplectic_rows(rows: np.ndarray) -> float:
    """
    Max-abs residual of R Γ Rᵀ − Γ_n for 2n rows of a 2N×2N symplectic
    matrix: the principal block of S Γ Sᵀ − Γ on those rows.
    """
    n = rows.shape[0] // 2
    N = rows.shape[1] // 2
    q_part, p_part = rows[:, :N], rows[:, N:]
    product = q_part @ p_part.T - p_part @ q_part.T
    return float(np.max(np.abs(product - commutation_matrix(n))))


def evolve_reduced(
    params: ChainParams,
    prep: PrepSpec,
    t: float,
    sites: Optional[Sequence[int]] = None,
    spectrum: Optional[ModeSpectrum] = None,
) -> Tuple[SubsystemState, float]:
    """
    Reduced state at time t without forming the full 2N×2N evolution.

    Parameters
    ----------
    params : ChainParams
        Chain parameters.
    prep : PrepSpec
        Initial state.
    t : float
        Time in units of 1/ω.
    sites : sequence of int, optional
        Retained sites; defaults to the system sites of ``prep``.
    spectrum : ModeSpectrum, optional
        Precomputed normal modes.

    Returns
    -------
    tuple
        The reduced state and the row symplectic residual.
    """
    sites = tuple(sites) if sites is not None else prep.system_sites
    spectrum = spectrum or mode_spectrum(params)
    d_q = _position_variances(params.N, prep)
    diagonal = np.concatenate([d_q, 1.0 / d_q]) / 2.0
    rows = propagator_rows(params, spectrum, t, sites)
    V_sub = (rows * diagonal) @ rows.T
    V_sub = 0.5 * (V_sub + V_sub.T)
    residual = verify_symplectic_rows(rows)
    return make_subsystem_state(sites, V_sub, time=t), residual
