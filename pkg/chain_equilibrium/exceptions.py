"""
Exceptions Module
=================

Error hierarchy shared by the simulation modules and the command-line
driver.

Invalid arguments subclass :class:`ValueError` so callers may keep catching
the builtin exception. Numerical failures subclass :class:`ArithmeticError`
and may record the time step at which a run broke down.
"""

from typing import Optional


class ChainEquilibriumError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(ChainEquilibriumError, ValueError):
    """Invalid physical or numerical argument."""


class InfiniteBetaError(ParameterError):
    """Raised when the bath is unsqueezed, i.e. the temperature is zero."""


class ConfigError(ChainEquilibriumError, ValueError):
    """
    Invalid run configuration.

    Attributes
    ----------
    field : str
        Name of the configuration field that failed validation.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericalError(ChainEquilibriumError, ArithmeticError):
    """
    Numerical failure during a computation.

    Attributes
    ----------
    step : int or None
        Index of the time step at which the failure occurred, if known.
    time : float or None
        Time value of that step, if known.
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        time: Optional[float] = None,
    ):
        self.step = step
        self.time = time
        if step is not None:
            message = f"{message} (step {step}, t={time!r})"
        super().__init__(message)


class QuadratureError(NumericalError):
    """
    Quadrature did not converge within its node budget.

    Attributes
    ----------
    estimate : float
        Last value of the integral.
    difference : float
        Last change between successive refinements.
    evaluations : int
        Number of integrand evaluations spent.
    """

    def __init__(self, estimate: float, difference: float, evaluations: int):
        self.estimate = estimate
        self.difference = difference
        self.evaluations = evaluations
        super().__init__(
            f"quadrature not converged after {evaluations} evaluations "
            f"(last change {difference:.3e}, estimate {estimate:.12g})"
        )
