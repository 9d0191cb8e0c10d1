"""
Quadrature Module
=================

Composite Gauss–Legendre quadrature for smooth, highly oscillatory
integrands.

The interval is split into equal panels, each integrated with a fixed
Gauss–Legendre rule. The starting panel count puts at least
``NODES_PER_OSCILLATION`` nodes in every oscillation of the integrand,
estimated from a bound on its angular frequency. The panel count is then
doubled until two successive estimates agree within the tolerance. The rule
and the refinement sequence are fixed, so a given integral always yields
the same bits.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from chain_equilibrium.config import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_QUADRATURE_TOL,
    NODES_PER_OSCILLATION,
    NODES_PER_PANEL,
)
from chain_equilibrium.exceptions import ParameterError, QuadratureError
from chain_equilibrium.logger_config import logger


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral with its convergence record."""

    value: float
    difference: float
    evaluations: int
    panels: int


@lru_cache(maxsize=8)
def gauss_legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def initial_panels(
    lower: float,
    upper: float,
    max_frequency: float,
    nodes_per_panel: int = NODES_PER_PANEL,
) -> int:
    """
    Smallest panel count that resolves an integrand whose angular
    frequency never exceeds ``max_frequency``.
    """
    oscillations = abs(upper - lower) * max_frequency / (2.0 * math.pi)
    needed = oscillations * NODES_PER_OSCILLATION / nodes_per_panel
    return max(2, int(math.ceil(needed)))


def composite_rule(
    f: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    panels: int,
    nodes_per_panel: int = NODES_PER_PANEL,
) -> float:
    """Integrate ``f`` with ``panels`` equal Gauss–Legendre panels."""
    x, w = gauss_legendre(nodes_per_panel)
    edges = np.linspace(lower, upper, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = mid[:, None] + half[:, None] * x[None, :]
    values = f(points.ravel()).reshape(points.shape)
    return float(np.sum((values @ w) * half))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    max_frequency: float = 0.0,
    tol: float = DEFAULT_QUADRATURE_TOL,
    node_budget: int = DEFAULT_NODE_BUDGET,
    nodes_per_panel: int = NODES_PER_PANEL,
) -> QuadratureResult:
    """
    Integrate a vectorized function over [lower, upper].

    Parameters
    ----------
    f : callable
        Maps an array of abscissae to an array of integrand values.
    lower, upper : float
        Integration limits.
    max_frequency : float
        Upper bound on the angular frequency of ``f``; sets the starting
        panel count.
    tol : float
        Absolute tolerance on the change between successive doublings.
    node_budget : int
        Maximum number of integrand evaluations.
    nodes_per_panel : int
        Order of the Gauss–Legendre rule on each panel.

    Returns
    -------
    QuadratureResult
        The converged value and its convergence record.

    Raises
    ------
    QuadratureError
        If the budget runs out before the estimates agree.
    """
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    panels = initial_panels(lower, upper, max_frequency, nodes_per_panel)
    evaluations = panels * nodes_per_panel
    if evaluations > node_budget:
        raise QuadratureError(math.nan, math.inf, 0)
    previous = composite_rule(f, lower, upper, panels, nodes_per_panel)
    difference = math.inf
    while True:
        panels *= 2
        cost = panels * nodes_per_panel
        if evaluations + cost > node_budget:
            raise QuadratureError(previous, difference, evaluations)
        current = composite_rule(f, lower, upper, panels, nodes_per_panel)
        evaluations += cost
        difference = abs(current - previous)
        if difference < tol:
            logger.debug(
                f"Quadrature converged with {panels} panels, "
                f"{evaluations} evaluations, change {difference:.2e}"
            )
            return QuadratureResult(current, difference, evaluations, panels)
        previous = current
