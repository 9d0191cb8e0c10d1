"""
Command-line entry point.

Usage::

    chain-equilibrium finite --config run.ini --out finite.csv
    chain-equilibrium sweep --gammas 0.01,0.05,0.1 --format json
    chain-equilibrium check

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 numerical failure.
"""

import argparse
import sys
from typing import Dict, List, Optional

from chain_equilibrium.config import (
    MODES,
    OUTPUT_FORMATS,
    STEADY_FORMS,
    load_run_config,
)
from chain_equilibrium.exceptions import ConfigError, NumericalError
from chain_equilibrium.logger_config import logger
from chain_equilibrium.runner import EquilibrationRunner
from chain_equilibrium.utils import write_table

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# flag destination -> RunConfig field
_OVERRIDES = {
    "out": "output",
    "format": "format",
    "tol": "quadrature_tol",
    "threads": "threads",
    "N": "N",
    "epsilon": "epsilon",
    "omega": "omega",
    "eta": "eta",
    "mu": "mu",
    "sites": "system_sites",
    "t_start": "t_start",
    "t_stop": "t_stop",
    "t_steps": "t_steps",
    "weak_coupling": "weak_coupling",
    "steady_form": "steady_form",
    "eta_start": "eta_start",
    "eta_stop": "eta_stop",
    "eta_steps": "eta_steps",
    "gammas": "gammas",
    "max_N": "max_N",
    "seed": "seed",
    "covariance_dir": "covariance_dir",
}


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="INI file with a [run] section")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=OUTPUT_FORMATS)
    parser.add_argument("--tol", type=float, help="quadrature tolerance")
    parser.add_argument("--threads", type=int, help="worker pool size")
    parser.add_argument("--N", type=int, help="number of oscillators")
    parser.add_argument("--epsilon", type=float, help="coupling ratio k/K")
    parser.add_argument("--omega", type=float)
    parser.add_argument("--eta", type=float, help="bath squeezing")
    parser.add_argument("--mu", type=float, help="system squeezing")
    parser.add_argument(
        "--sites", help="system sites, comma separated (1-based)"
    )
    parser.add_argument("--t-start", type=float)
    parser.add_argument("--t-stop", type=float)
    parser.add_argument("--t-steps", type=int)
    parser.add_argument(
        "--weak-coupling",
        action="store_const",
        const=True,
        help="add weak-coupling closed forms to continuum output",
    )
    parser.add_argument("--steady-form", choices=STEADY_FORMS)
    parser.add_argument("--eta-start", type=float)
    parser.add_argument("--eta-stop", type=float)
    parser.add_argument("--eta-steps", type=int)
    parser.add_argument("--gammas", help="γ values, comma separated")
    parser.add_argument("--max-N", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument(
        "--covariance-dir", help="dump reduced covariances (finite mode)"
    )


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with one subcommand per run mode."""
    parser = argparse.ArgumentParser(
        prog="chain-equilibrium",
        description="Equilibration of squeezed harmonic chains.",
    )
    subparsers = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "finite": "exact evolution of a finite chain",
        "continuum": "continuum (N → ∞) covariance over a time grid",
        "steady": "stationary covariance and its diagnostics",
        "sweep": "stationary diagnostics over an (η, γ) grid",
        "check": "run the invariant suite",
    }
    for mode in MODES:
        _add_common_arguments(subparsers.add_parser(mode, help=helps[mode]))
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, object]:
    """RunConfig overrides from parsed flags; unset flags are skipped."""
    values: Dict[str, object] = {"mode": args.mode}
    for dest, name in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[name] = value
    return values


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run, write the table.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name; ``sys.argv[1:]`` by default.

    Returns
    -------
    int
        The exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, overrides_from_args(args))
        logger.info(f"Starting {config.mode} run")
        table = EquilibrationRunner(config).run()
        write_table(table, config.output or None, config.format)
        if config.mode == "check" and not table["passed"].all():
            failed = ", ".join(table.loc[~table["passed"], "name"])
            raise NumericalError(f"invariant checks failed: {failed}")
        logger.info(f"{config.mode} run finished successfully")
        return EXIT_OK
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}", exc_info=True)
        return EXIT_NUMERICAL
    except Exception as e:
        logger.error(f"An error occurred: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
