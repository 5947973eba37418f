"""
Comb Errors
This module defines the exceptions raised by comb, ultrametric, contour and p-adic operations.
"""

from typing import Tuple


class CombError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CombError, ValueError):
    """An argument lies outside the domain of the operation."""


class UltrametricViolation(DomainError):
    """A matrix breaks the strong triangle inequality."""

    def __init__(self, triple: Tuple[int, int, int], message: str = ""):
        self.triple = triple
        i, j, k = triple
        super().__init__(
            message or f"d({i},{k}) > max(d({i},{j}), d({j},{k})) for triple {triple}"
        )


class OrderViolation(DomainError):
    """A labelling does not satisfy d(x_i, x_j) = max of consecutive distances."""

    def __init__(self, pair: Tuple[int, int]):
        self.pair = pair
        super().__init__(f"order breaks the consecutive-maximum identity at slots {pair}")


class EmptySphereError(DomainError):
    """The contour never reaches the requested level."""


class MissingMassesError(DomainError):
    """A measured construction was asked for on a matrix without masses."""


class ValuationOfZeroError(DomainError):
    """The valuation of the zero sequence or of the rational 0 was requested."""


class FileFormatError(CombError, ValueError):
    """An input file does not follow its declared format."""
