"""
Chain Module
============

The harmonic chain: coupling matrix, normal modes and the exact symplectic
propagator.

Units are ħ = m = 1 and ω = √(K/m) is carried explicitly. Phase-space
vectors use the ordering ξ = (Q_1..Q_N, P_1..P_N) and the commutation
matrix Γ = [[0, I], [-I, 0]]. Sites are 1-based in the API.

Classes
-------
ChainParams:
    Physical parameters N, ε, ω and the derived γ, Ω.
ModeSpectrum:
    Normal-mode angles, eigenvalues and the orthogonal sine matrix σ.
Propagator:
    The 2N×2N symplectic matrix S(t).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from chain_equilibrium.exceptions import ParameterError
from chain_equilibrium.logger_config import logger


@dataclass(frozen=True)
class ChainParams:
    """
    Parameters of a chain of N oscillators with on-site spring K and
    nearest-neighbour spring k.

    Attributes
    ----------
    N : int
        Number of oscillators.
    epsilon : float
        ε = k/K.
    omega : float
        ω = √(K/m).
    """

    N: int
    epsilon: float
    omega: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N}")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ParameterError(
                f"epsilon must be non-negative, got {self.epsilon}"
            )
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")

    @property
    def gamma(self) -> float:
        """γ = k/(K+2k) = ε/(1+2ε), always in [0, 1/2)."""
        return self.epsilon / (1.0 + 2.0 * self.epsilon)

    @property
    def Omega(self) -> float:
        """Renormalized frequency Ω = ω√(1+2ε)."""
        return self.omega * np.sqrt(1.0 + 2.0 * self.epsilon)

    @classmethod
    def from_gamma(
        cls, N: int, gamma: float, omega: float = 1.0
    ) -> "ChainParams":
        """Build the parameters from γ instead of ε (ε = γ/(1−2γ))."""
        if not 0.0 <= gamma < 0.5:
            raise ParameterError(f"gamma must lie in [0, 1/2), got {gamma}")
        return cls(N=N, epsilon=gamma / (1.0 - 2.0 * gamma), omega=omega)


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """
    Normal modes of the coupling matrix A.

    ``sigma`` is built on first access: the reduced-row evolution never
    needs the dense N×N matrix.
    """

    phis: np.ndarray
    lambdas: np.ndarray

    @property
    def N(self) -> int:
        return len(self.phis)

    @cached_property
    def sigma(self) -> np.ndarray:
        """σ_{s,l} = √(2/(N+1)) sin(s φ_l); symmetric and orthogonal."""
        return sine_matrix(self.N)

    def normal_mode_transform(self) -> np.ndarray:
        """
        The symplectic map Λ^{1/4}σ ⊕ Λ^{-1/4}σ under which the
        Hamiltonian becomes a sum of independent oscillators with
        frequencies ω√λ_l.
        """
        quarter = self.lambdas**0.25
        q_block = quarter[:, None] * self.sigma
        p_block = self.sigma / quarter[:, None]
        zero = np.zeros_like(q_block)
        return np.block([[q_block, zero], [zero, p_block]])


@dataclass(frozen=True, eq=False)
class Propagator:
    """The symplectic matrix S(t) for time ``time`` (units 1/ω)."""

    time: float
    matrix: np.ndarray

    @property
    def N(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def blocks(self):
        """The four N×N blocks (QQ, QP, PQ, PP)."""
        n = self.N
        m = self.matrix
        return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


def commutation_matrix(N: int) -> np.ndarray:
    """Γ = [[0, I], [-I, 0]] for N modes."""
    eye = np.eye(N)
    zero = np.zeros((N, N))
    return np.block([[zero, eye], [-eye, zero]])


def sine_matrix(N: int) -> np.ndarray:
    """Orthonormal DST-I matrix √(2/(N+1)) sin(s l π/(N+1)), s,l = 1..N."""
    idx = np.arange(1, N + 1)
    return np.sqrt(2.0 / (N + 1)) * np.sin(
        np.outer(idx, idx) * np.pi / (N + 1)
    )


def build_coupling_matrix(params: ChainParams) -> np.ndarray:
    """
    Build the tridiagonal coupling matrix
    A_{ij} = (2ε+1)δ_{ij} − ε(δ_{i,j+1} + δ_{i+1,j}).

    Parameters
    ----------
    params : ChainParams
        Chain parameters.

    Returns
    -------
    np.ndarray
        Symmetric positive-definite N×N matrix.
    """
    N, eps = params.N, params.epsilon
    off = np.full(N - 1, -eps)
    return (
        np.diag(np.full(N, 2.0 * eps + 1.0))
        + np.diag(off, 1)
        + np.diag(off, -1)
    )


def mode_spectrum(params: ChainParams) -> ModeSpectrum:
    """
    Analytic normal modes of A: φ_l = lπ/(N+1) and
    λ_l = 1 + 2ε(1 − cos φ_l), l = 1..N.
    """
    phis = np.arange(1, params.N + 1) * np.pi / (params.N + 1)
    lambdas = 1.0 + 2.0 * params.epsilon * (1.0 - np.cos(phis))
    return ModeSpectrum(phis=phis, lambdas=lambdas)


def mode_frequencies(
    params: ChainParams, spectrum: ModeSpectrum
) -> np.ndarray:
    """Normal-mode angular frequencies ω√λ_l."""
    return params.omega * np.sqrt(spectrum.lambdas)


def _assemble(sigma, cos_f, sin_over, sin_times) -> np.ndarray:
    c = (sigma * cos_f) @ sigma.T
    upper = (sigma * sin_over) @ sigma.T
    lower = -(sigma * sin_times) @ sigma.T
    return np.block([[c, upper], [lower, c]])


def propagator(
    params: ChainParams, spectrum: ModeSpectrum, t: float
) -> Propagator:
    """
    Exact propagator of the chain,

        S(t) = [[cos(ωt A^½),       A^{-½} sin(ωt A^½)],
                [-A^½ sin(ωt A^½),  cos(ωt A^½)       ]],

    with every matrix function evaluated through σ and λ. Negative times
    run the dynamics backwards.
    """
    if not np.isfinite(t):
        raise ParameterError(f"time must be finite, got {t}")
    root = np.sqrt(spectrum.lambdas)
    phase = params.omega * t * root
    cos_f, sin_f = np.cos(phase), np.sin(phase)
    matrix = _assemble(spectrum.sigma, cos_f, sin_f / root, sin_f * root)
    return Propagator(time=float(t), matrix=matrix)


def dense_propagator(params: ChainParams, t: float) -> Propagator:
    """
    S(t) from a numerical eigendecomposition of A.

    Independent of the analytic spectrum; used to cross-check
    :func:`propagator`.
    """
    lambdas, vectors = np.linalg.eigh(build_coupling_matrix(params))
    root = np.sqrt(lambdas)
    phase = params.omega * t * root
    cos_f, sin_f = np.cos(phase), np.sin(phase)
    matrix = _assemble(vectors, cos_f, sin_f / root, sin_f * root)
    return Propagator(time=float(t), matrix=matrix)


def verify_symplectic(S) -> float:
    """
    Max-abs residual of S Γ Sᵀ − Γ.

    Parameters
    ----------
    S : np.ndarray or Propagator
        Square matrix of even dimension.

    Returns
    -------
    float
        The residual; the caller compares it with a tolerance.
    """
    matrix = S.matrix if isinstance(S, Propagator) else np.asarray(S)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ParameterError(f"expected a square matrix, got {matrix.shape}")
    if matrix.shape[0] % 2:
        raise ParameterError(
            f"symplectic matrices have even dimension, got {matrix.shape[0]}"
        )
    gamma = commutation_matrix(matrix.shape[0] // 2)
    residual = float(np.max(np.abs(matrix @ gamma @ matrix.T - gamma)))
    logger.debug(f"Symplectic residual {residual:.3e}")
    return residual
