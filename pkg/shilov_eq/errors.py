"""Exceptions raised by the library; only the CLI turns them into exit codes."""
from __future__ import annotations

from typing import Optional


class Shilov_Eq_Error(Exception):
    """Base class of every error raised on purpose by this package."""


class Validation_Error(Shilov_Eq_Error, ValueError):
    """The inputs violate a documented precondition."""


class Duplicate_Point_Error(Validation_Error):
    """Two monomial points define the same valuation."""


class Config_Error(Validation_Error):
    """
    A configuration file or flag could not be turned into an experiment.

    :param line: The 1-based line of the offending entry, if it is known.
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Computation_Error(Shilov_Eq_Error, ArithmeticError):
    """A well-posed computation could not be carried out."""


class Precision_Exhausted(Computation_Error):
    """Certification still fails at the largest allowed precision cap."""


class Rank_Deficient(Computation_Error):
    """A map that has to be injective is not."""


class Target_Unreachable(Computation_Error):
    """The solver hit its iteration cap before reaching the tolerance."""


class Dominated_Point_Error(Computation_Error):
    """A point with positive target mass is dominated at every shift."""


class Infeasible(Computation_Error):
    """The linear program has no feasible point."""


class Unbounded(Computation_Error):
    """The linear program is unbounded in the direction of optimization."""
