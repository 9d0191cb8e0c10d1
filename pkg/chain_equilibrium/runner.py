"""
Runner Module
=============

Runs configured by a :class:`~chain_equilibrium.config.RunConfig`; each
returns a :class:`pandas.DataFrame` whose rows follow the grid order.

Classes
-------
EquilibrationRunner:
    Executes finite-N evolutions, continuum evaluations, stationary
    states, parameter sweeps and the invariant check suite.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd

from chain_equilibrium.chain import (
    ChainParams,
    mode_spectrum,
    propagator,
    verify_symplectic,
)
from chain_equilibrium.config import (
    CHECK_COLUMNS,
    CONTINUUM_COLUMNS,
    FINITE_COLUMNS,
    STEADY_COLUMNS,
    SWEEP_COLUMNS,
    SYMPLECTIC_TOL,
    RunConfig,
    covariance_columns,
    symplectic_columns,
)
from chain_equilibrium.continuum import (
    ContinuumParams,
    continuum_covariance,
    steady_state_covariance,
)
from chain_equilibrium.diagnostics import (
    boltzmann_covariance,
    effective_beta,
    entanglement_threshold,
    equilibrium_report,
    mean_occupation,
)
from chain_equilibrium.exceptions import (
    ChainEquilibriumError,
    NumericalError,
    ParameterError,
)
from chain_equilibrium.gaussian import (
    PrepSpec,
    evolve,
    evolve_reduced,
    initial_covariance,
    make_subsystem_state,
    purity,
    single_mode_entropy,
)
from chain_equilibrium.logger_config import logger
from chain_equilibrium.utils import write_covariance


def _upper_triangle(V: np.ndarray) -> List[float]:
    rows, cols = np.triu_indices(V.shape[0])
    return [float(x) for x in V[rows, cols]]


class EquilibrationRunner:
    """
    Execute the run described by a configuration.

    Attributes
    ----------
    config : RunConfig
        Validated run configuration.
    """

    def __init__(self, config: RunConfig):
        """
        Initialize the runner.

        Parameters
        ----------
        config : RunConfig
            The run configuration; validated again here.
        """
        self.config = config.validate()

    @property
    def params(self) -> ChainParams:
        return ChainParams(
            N=self.config.N,
            epsilon=self.config.epsilon,
            omega=self.config.omega,
        )

    @property
    def sites(self):
        return tuple(sorted(self.config.sites))

    def _map(self, func: Callable, items: Sequence) -> List:
        """Apply ``func`` over ``items``; results keep the input order."""
        if self.config.threads == 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            return list(pool.map(func, items))

    def run(self) -> pd.DataFrame:
        """Dispatch on ``config.mode``."""
        runs = {
            "finite": self.run_finite,
            "continuum": self.run_continuum,
            "steady": self.run_steady,
            "sweep": self.run_sweep,
            "check": self.run_check,
        }
        return runs[self.config.mode]()

    def run_finite(self) -> pd.DataFrame:
        """
        Evolve the chain over the time grid and record the reduced state of
        the system sites.

        Returns
        -------
        pd.DataFrame
            Columns t, nu, entropy, symplectic_residual, d_1..d_n and the
            upper triangle of V_sub.

        Raises
        ------
        NumericalError
            Carrying the step and time at which a numerical failure
            occurred.
        """
        params, sites = self.params, self.sites
        prep = PrepSpec(self.config.eta, self.config.mu, sites)
        prep.validate_for(params.N)
        spectrum = mode_spectrum(params)
        times = self.config.times
        logger.info(
            f"Finite run: N={params.N}, epsilon={params.epsilon}, "
            f"sites={sites}, {len(times)} time points"
        )
        if self.config.covariance_dir:
            os.makedirs(self.config.covariance_dir, exist_ok=True)

        def row(item):
            step, t = item
            try:
                state, residual = evolve_reduced(
                    params, prep, t, spectrum=spectrum
                )
            except (ChainEquilibriumError, np.linalg.LinAlgError) as exc:
                raise NumericalError(str(exc), step=step, time=t) from exc
            if residual > SYMPLECTIC_TOL:
                logger.warning(
                    f"Symplectic residual {residual:.3e} at step {step}"
                )
            if self.config.covariance_dir:
                write_covariance(
                    os.path.join(
                        self.config.covariance_dir, f"finite_{step:05d}.txt"
                    ),
                    state.V_sub,
                    t,
                )
            return (
                [t, state.nu, state.entropy, residual]
                + [float(d) for d in state.symplectic_eigs]
                + _upper_triangle(state.V_sub)
            )

        rows = self._map(row, list(enumerate(times)))
        n = len(sites)
        columns = (
            FINITE_COLUMNS + symplectic_columns(n) + covariance_columns(sites)
        )
        logger.info("Finite run finished")
        return pd.DataFrame(rows, columns=columns)

    def _state_row(self, V: np.ndarray, t: float) -> List[float]:
        n = V.shape[0] // 2
        if not np.all(np.isfinite(V)):
            return [math.nan] * (n + 2)
        try:
            state = make_subsystem_state(range(1, n + 1), V, time=t)
        except ChainEquilibriumError as exc:
            logger.warning(f"No diagnostics at t={t}: {exc}")
            return [math.nan] * (n + 2)
        return [state.nu, state.entropy] + [
            float(d) for d in state.symplectic_eigs
        ]

    def run_continuum(self) -> pd.DataFrame:
        """
        Evaluate the continuum covariance of the system sites over the time
        grid.

        Elements whose quadrature does not converge are written as NaN and
        the run continues. With ``weak_coupling`` the closed forms are
        appended as ``wc_`` columns together with ``rel_diff``, the max-abs
        difference relative to the largest quadrature element.
        """
        params, sites = self.params, self.sites
        cparams = ContinuumParams(
            eta=self.config.eta,
            mu=self.config.mu,
            gamma=params.gamma,
            Omega=float(params.Omega),
            system_sites=sites,
        )
        tol = self.config.quadrature_tol
        times = self.config.times
        logger.info(
            f"Continuum run: gamma={cparams.gamma:.6g}, sites={sites}, "
            f"{len(times)} time points"
        )

        def row(t):
            V = continuum_covariance(sites, t, cparams, tol=tol, errors="nan")
            values = [t] + self._state_row(V, t) + _upper_triangle(V)
            if self.config.weak_coupling:
                V_wc = continuum_covariance(
                    sites, t, cparams, method="weak_coupling"
                )
                scale = np.max(np.abs(V))
                values += _upper_triangle(V_wc)
                values.append(float(np.max(np.abs(V_wc - V)) / scale))
            return values

        rows = self._map(row, list(times))
        columns = (
            CONTINUUM_COLUMNS
            + symplectic_columns(len(sites))
            + covariance_columns(sites)
        )
        if self.config.weak_coupling:
            columns += ["wc_" + c for c in covariance_columns(sites)]
            columns.append("rel_diff")
        logger.info("Continuum run finished")
        return pd.DataFrame(rows, columns=columns)

    def run_steady(self) -> pd.DataFrame:
        """
        The stationary covariance of n consecutive sites, n the number of
        configured system sites, with its diagnostics in one row.
        """
        n = len(self.sites)
        gamma = self.params.gamma
        eta = self.config.eta
        V = steady_state_covariance(
            n, eta, gamma, form=self.config.steady_form
        )
        try:
            beta = effective_beta(eta)
        except ParameterError:
            beta = math.inf
        labels = tuple(range(1, n + 1))
        values = (
            [n, eta, gamma, beta, mean_occupation(eta)]
            + self._state_row(V, 0.0)
            + _upper_triangle(V)
        )
        columns = (
            STEADY_COLUMNS + symplectic_columns(n) + covariance_columns(labels)
        )
        return pd.DataFrame([values], columns=columns)

    def run_sweep(self) -> pd.DataFrame:
        """
        Stationary-state diagnostics over the (γ, η) grid, γ-major, with the
        entanglement threshold η*(γ) of each γ row from both criteria.
        """
        etas, gammas = self.config.etas, self.config.gammas
        if not etas or not gammas:
            raise ParameterError("sweep grid is empty")
        logger.info(
            f"Sweep: {len(gammas)} gamma values x {len(etas)} eta values"
        )
        thresholds: Dict[float, tuple] = {
            g: (
                entanglement_threshold(g, "printed"),
                entanglement_threshold(g, "ppt"),
            )
            for g in gammas
        }
        grid = [(g, e) for g in gammas for e in etas]

        def record(point):
            gamma, eta = point
            values = equilibrium_report(eta, gamma).to_record()
            values["eta_star"], values["ppt_eta_star"] = thresholds[gamma]
            return values

        return pd.DataFrame(self._map(record, grid), columns=SWEEP_COLUMNS)

    def run_check(self) -> pd.DataFrame:
        """
        Invariant suite: symplecticity with group and inverse laws, global
        purity conservation, Boltzmann identification and the entropy
        formula. Random draws use ``config.seed``.

        Returns
        -------
        pd.DataFrame
            One row per check with its worst value, tolerance and outcome.
        """
        rng = np.random.default_rng(self.config.seed)
        results = []
        results += self._check_symplectic(rng)
        results += self._check_purity(rng)
        results += self._check_boltzmann()
        results += self._check_entropy()
        table = pd.DataFrame(results, columns=CHECK_COLUMNS)
        failed = int((~table["passed"]).sum())
        logger.info(
            f"Check suite: {len(table) - failed} passed, {failed} failed"
        )
        return table

    def _check_symplectic(self, rng, trials: int = 200) -> List[list]:
        worst = {"symplectic": 0.0, "group_law": 0.0, "inverse_law": 0.0}
        for _ in range(trials):
            params = ChainParams(
                N=int(rng.integers(1, 65)), epsilon=float(rng.uniform(0, 5))
            )
            spectrum = mode_spectrum(params)
            t1, t2 = rng.uniform(-10.0, 10.0, size=2)
            S1 = propagator(params, spectrum, t1).matrix
            S2 = propagator(params, spectrum, t2).matrix
            S12 = propagator(params, spectrum, t1 + t2).matrix
            S_back = propagator(params, spectrum, -t1).matrix
            eye = np.eye(2 * params.N)
            worst["symplectic"] = max(
                worst["symplectic"], verify_symplectic(S1)
            )
            worst["group_law"] = max(
                worst["group_law"], float(np.max(np.abs(S1 @ S2 - S12)))
            )
            worst["inverse_law"] = max(
                worst["inverse_law"], float(np.max(np.abs(S1 @ S_back - eye)))
            )
        return [
            [1, name, value, 1e-9, value < 1e-9]
            for name, value in worst.items()
        ]

    def _check_purity(self, rng, steps: int = 100) -> List[list]:
        params = ChainParams(N=64, epsilon=float(rng.uniform(0, 5)))
        eta, mu = rng.uniform(-2.0, 2.0, size=2)
        prep = PrepSpec(float(eta), float(mu), (32,))
        V0 = initial_covariance(params, prep)
        spectrum = mode_spectrum(params)
        worst = 0.0
        for t in np.linspace(0.0, 50.0, steps):
            V = evolve(V0, propagator(params, spectrum, t))
            worst = max(worst, abs(purity(V.data) - 1.0))
        return [[2, "global_purity", worst, 1e-7, worst < 1e-7]]

    def _check_boltzmann(self) -> List[list]:
        identification, round_trip = 0.0, 0.0
        for eta in (0.1, 0.5, 1.0, 2.0):
            beta = effective_beta(eta)
            thermal = boltzmann_covariance(beta)
            steady = steady_state_covariance(1, eta, self.params.gamma)
            identification = max(
                identification, float(np.max(np.abs(thermal - steady)))
            )
            round_trip = max(
                round_trip, abs(math.cosh(eta) - 1.0 / math.tanh(beta / 2.0))
            )
        return [
            [
                5,
                "boltzmann_identification",
                identification,
                1e-14,
                identification <= 1e-14,
            ],
            [5, "beta_round_trip", round_trip, 1e-12, round_trip <= 1e-12],
        ]

    def _check_entropy(self) -> List[list]:
        value = single_mode_entropy(1.0 / 3.0)
        n_bar = 1.0
        oracle = (n_bar + 1.0) * math.log(n_bar + 1.0)
        error = max(abs(value - 2.0 * math.log(2.0)), abs(value - oracle))
        return [[6, "entropy_one_third", error, 1e-12, error <= 1e-12]]
