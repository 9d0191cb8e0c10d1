"""
Configuration Module
====================

Numerical constants, run defaults and the run configuration.

A run is described by a plain INI file with a ``[run]`` section and an
optional ``[sweep]`` section, one ``key = value`` per line::

    [run]
    mode = finite
    N = 401
    epsilon = 0.0526315789
    eta = 1.0
    mu = 0.0
    system_sites = 201
    t_start = 0
    t_stop = 100
    t_steps = 50

    [sweep]
    eta_start = 0
    eta_stop = 2
    eta_steps = 21
    gammas = 0.01, 0.05, 0.1

Command-line flags are applied on top of the file; flags win.
"""

import configparser
import math
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from chain_equilibrium.exceptions import ConfigError

# Define base directory of the repository
BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))

# Tolerances
SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-10
PAIRING_TOL = 1e-9
PHYSICAL_TOL = 1e-9
ENTROPY_SERIES_THRESHOLD = 1e-6

# Quadrature
DEFAULT_QUADRATURE_TOL = 1e-10
MIN_QUADRATURE_TOL = 1e-14
MAX_QUADRATURE_TOL = 1e-4
DEFAULT_NODE_BUDGET = 2**20
NODES_PER_PANEL = 16
NODES_PER_OSCILLATION = 8

# Weak-coupling closed forms lose accuracy above this coupling
WEAK_COUPLING_WARN_GAMMA = 0.1

DEFAULT_MAX_N = 5000

# Output
SCHEMA_VERSION = "1"
FLOAT_FORMAT = "%.17g"
OUTPUT_FORMATS = ("csv", "json", "sqlite")
MODES = ("finite", "continuum", "steady", "sweep", "check")
STEADY_FORMS = ("printed", "derived")

# Column layouts of the result tables, versioned by SCHEMA_VERSION.
# Per-site columns d_1..d_n and the covariance upper triangle follow the
# listed leading columns.
FINITE_COLUMNS = ["t", "nu", "entropy", "symplectic_residual"]
CONTINUUM_COLUMNS = ["t", "nu", "entropy"]
STEADY_COLUMNS = ["n", "eta", "gamma", "beta", "n_bar", "nu", "entropy"]
SWEEP_COLUMNS = [
    "eta",
    "gamma",
    "beta",
    "n_bar",
    "nu1",
    "nu2",
    "entropy1",
    "simon_value",
    "ppt_value",
    "entangled",
    "eta_star",
    "ppt_eta_star",
]
CHECK_COLUMNS = ["suite", "name", "value", "tolerance", "passed"]
SCHEMA_COLUMN = "schema_version"


def symplectic_columns(n: int) -> List[str]:
    """Columns d_1..d_n of the symplectic eigenvalues."""
    return [f"d_{k}" for k in range(1, n + 1)]


def covariance_labels(sites: Sequence[int]) -> List[str]:
    """Row labels Q<r>... then P<r>... of a reduced covariance."""
    return [f"Q{r}" for r in sites] + [f"P{r}" for r in sites]


def covariance_columns(sites: Sequence[int]) -> List[str]:
    """Column names V_<row>_<col> of the upper triangle, row-major."""
    labels = covariance_labels(sites)
    return [
        f"V_{labels[i]}_{labels[j]}"
        for i in range(len(labels))
        for j in range(i, len(labels))
    ]


def default_system_sites(N: int) -> Tuple[int, ...]:
    """Return the centre site ⌈N/2⌉ of a chain of N oscillators."""
    return (max(1, math.ceil(N / 2)),)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a single run needs.

    Times are in units of 1/ω. ``system_sites`` are 1-based; an empty tuple
    means the centre site of the chain.
    """

    mode: str = "finite"
    N: int = 401
    epsilon: float = 0.05
    omega: float = 1.0
    eta: float = 1.0
    mu: float = 0.0
    system_sites: Tuple[int, ...] = ()
    t_start: float = 0.0
    t_stop: float = 10.0
    t_steps: int = 10
    quadrature_tol: float = DEFAULT_QUADRATURE_TOL
    weak_coupling: bool = False
    steady_form: str = "printed"
    eta_start: float = 0.0
    eta_stop: float = 2.0
    eta_steps: int = 21
    gammas: Tuple[float, ...] = (0.01, 0.05, 0.1)
    output: str = ""
    format: str = "csv"
    threads: int = 1
    max_N: int = DEFAULT_MAX_N
    seed: int = 12345
    covariance_dir: str = ""

    @property
    def sites(self) -> Tuple[int, ...]:
        """System sites with the centre-site default applied."""
        return self.system_sites or default_system_sites(self.N)

    @property
    def times(self) -> Tuple[float, ...]:
        """
        The time grid: ``t_steps`` points from ``t_start`` to ``t_stop``
        inclusive (a single point at ``t_start`` when ``t_steps`` is 1).
        """
        if self.t_steps == 1:
            return (float(self.t_start),)
        step = (self.t_stop - self.t_start) / (self.t_steps - 1)
        return tuple(
            float(self.t_start + k * step) for k in range(self.t_steps)
        )

    @property
    def etas(self) -> Tuple[float, ...]:
        """The sweep's η grid, endpoints included."""
        if self.eta_steps == 1:
            return (float(self.eta_start),)
        step = (self.eta_stop - self.eta_start) / (self.eta_steps - 1)
        return tuple(
            float(self.eta_start + k * step) for k in range(self.eta_steps)
        )

    def validate(self) -> "RunConfig":
        """
        Check every field and return ``self``.

        Raises
        ------
        ConfigError
            Naming the first offending field.
        """
        if self.mode not in MODES:
            raise ConfigError("mode", f"expected one of {MODES}")
        if self.N < 1:
            raise ConfigError("N", "must be at least 1")
        if self.mode == "finite" and self.N > self.max_N:
            raise ConfigError(
                "N", f"{self.N} exceeds the finite-mode limit {self.max_N}"
            )
        if not self.epsilon >= 0.0:
            raise ConfigError("epsilon", "must be non-negative")
        if not self.omega > 0.0:
            raise ConfigError("omega", "must be positive")
        for name in ("epsilon", "omega", "eta", "mu", "t_start", "t_stop"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")
        sites = self.sites
        if len(set(sites)) != len(sites):
            raise ConfigError("system_sites", "sites must be distinct")
        if any(r < 1 or r > self.N for r in sites):
            raise ConfigError(
                "system_sites", f"sites must lie in 1..{self.N}"
            )
        if self.t_steps < 1:
            raise ConfigError("t_steps", "must be at least 1")
        if not MIN_QUADRATURE_TOL <= self.quadrature_tol <= MAX_QUADRATURE_TOL:
            raise ConfigError(
                "quadrature_tol",
                f"must lie in [{MIN_QUADRATURE_TOL}, {MAX_QUADRATURE_TOL}]",
            )
        if self.steady_form not in STEADY_FORMS:
            raise ConfigError("steady_form", f"expected one of {STEADY_FORMS}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError("format", f"expected one of {OUTPUT_FORMATS}")
        if self.format == "sqlite" and not self.output:
            raise ConfigError("output", "sqlite output needs a file path")
        if self.threads < 1:
            raise ConfigError("threads", "must be at least 1")
        if self.mode == "sweep":
            if self.eta_steps < 1:
                raise ConfigError("eta_steps", "sweep grid is empty")
            if not self.gammas:
                raise ConfigError("gammas", "sweep grid is empty")
            if any(not 0.0 <= g < 0.5 for g in self.gammas):
                raise ConfigError("gammas", "each γ must lie in [0, 1/2)")
        return self


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_tuple(text: str, kind: type) -> Tuple[Any, ...]:
    items = [item for item in text.replace(",", " ").split() if item]
    return tuple(kind(item) for item in items)


def _coerce(name: str, value: Any) -> Any:
    """Convert a raw value (usually a string) to the field's type."""
    if not isinstance(value, str):
        if name in ("system_sites", "gammas"):
            return tuple(value)
        return value
    try:
        if name == "system_sites":
            return _parse_tuple(value, int)
        if name == "gammas":
            return _parse_tuple(value, float)
        if name == "weak_coupling":
            return _parse_bool(value)
        if name in (
            "N",
            "t_steps",
            "eta_steps",
            "threads",
            "max_N",
            "seed",
        ):
            return int(value)
        if name in (
            "mode",
            "steady_form",
            "output",
            "format",
            "covariance_dir",
        ):
            return value.strip()
        return float(value)
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse {value!r}: {exc}") from exc


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read the ``[run]`` and ``[sweep]`` sections of an INI file.

    Parameters
    ----------
    path : str
        Path of the configuration file.

    Returns
    -------
    dict
        Raw ``key -> value`` strings, keys case preserved.
    """
    if not os.path.exists(path):
        raise ConfigError("config", f"file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep "N" distinct from "n"
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from exc
    raw: Dict[str, str] = {}
    for section in ("run", "sweep"):
        if parser.has_section(section):
            raw.update(dict(parser.items(section)))
    return raw


def build_run_config(
    values: Mapping[str, Any], base: Optional[RunConfig] = None
) -> RunConfig:
    """
    Apply ``values`` on top of ``base`` (defaults when omitted) and
    validate.

    Unknown keys raise :class:`ConfigError`; ``None`` values are ignored so
    unset command-line flags do not clobber the file.
    """
    config = base or RunConfig()
    changes = {}
    for name, value in values.items():
        if value is None:
            continue
        if name not in _FIELD_NAMES:
            raise ConfigError(name, "unknown configuration key")
        changes[name] = _coerce(name, value)
    return replace(config, **changes).validate()


def load_run_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Load a run configuration from an optional file plus overrides.

    Parameters
    ----------
    path : str, optional
        INI file with ``[run]``/``[sweep]`` sections.
    overrides : mapping, optional
        Field values from the command line; they take precedence.

    Returns
    -------
    RunConfig
        The validated configuration.

    Raises
    ------
    ConfigError
        If the file is missing or a field is invalid.
    """
    merged: Dict[str, Any] = {}
    if path:
        merged.update(read_config_file(path))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    return build_run_config(merged)
