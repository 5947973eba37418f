"""
Local-Time Staircase
This module builds the finite-stage staircase: the continuous nondecreasing map from
[0, M] onto [0, 1] that is constant on a family of disjoint open intervals, each new
interval taking the midpoint value of the gap it falls in.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import daiquiri

from combs.comb import Real
from combs.errors import DomainError

logger = daiquiri.getLogger(__name__)


class OpenInterval(tuple):
    """An open interval (start, end) with start < end."""

    __slots__ = ()

    def __new__(cls, start: Real, end: Real):
        if not start < end:
            raise DomainError(f"empty open interval ({start}, {end})")
        return tuple.__new__(cls, (start, end))

    @property
    def start(self) -> Real:
        return self[0]

    @property
    def end(self) -> Real:
        return self[1]

    @property
    def length(self) -> Real:
        return self.end - self.start

    def __repr__(self):
        return "OpenInterval({},{})".format(*self)


@dataclass(frozen=True)
class Staircase:
    """
    Stage-n staircase L on [0, length].

    breakpoints lists (x, L(x)) in increasing x; two consecutive breakpoints with the
    same x form a vertical step (two constancy intervals touching). values[i] is the
    plateau value of the i-th given interval, None when the interval was not reached
    by stage n.
    """

    stage: int
    length: Real
    intervals: Tuple[OpenInterval, ...]
    values: Tuple[Optional[Fraction], ...]
    breakpoints: Tuple[Tuple[Real, Fraction], ...]

    def value_at(self, x: Real) -> Real:
        """L(x), right-continuous at vertical steps."""
        if not 0 <= x <= self.length:
            raise DomainError(f"{x} outside [0, {self.length}]")
        xs = [point for point, _ in self.breakpoints]
        k = bisect_right(xs, x) - 1
        x0, y0 = self.breakpoints[k]
        if x0 == x or k + 1 == len(xs):
            return y0
        x1, y1 = self.breakpoints[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def plateau_values(self) -> List[Fraction]:
        """Plateau values of the realized intervals, left to right."""
        realized = [
            (interval.start, value)
            for interval, value in zip(self.intervals, self.values)
            if value is not None
        ]
        return [value for _, value in sorted(realized)]


def staircase(intervals: Sequence[Tuple[Real, Real]], length: Real, stage: Optional[int] = None) -> Staircase:
    """
    Build the stage-n staircase for disjoint open intervals of (0, length).

    Intervals are taken by decreasing length, equal lengths by increasing left end.
    The first one gets 1/2; each later one gets the mean of the plateau values on the
    nearest realized plateaus to its left and right, where 0 and length count as
    plateaus of value 0 and 1.

    Args:
        intervals: Disjoint open intervals; touching endpoints are allowed
        length: Right end M of the domain
        stage: Number of intervals to realize (all of them by default)

    Returns:
        The staircase, affine between plateaus
    """
    if length < 0:
        raise DomainError(f"negative domain length {length}")
    intervals = tuple(OpenInterval(*interval) for interval in intervals)
    stage = len(intervals) if stage is None else stage
    if not 0 <= stage <= len(intervals):
        raise DomainError(f"stage {stage} outside 0..{len(intervals)}")
    for interval in intervals:
        if interval.start < 0 or interval.end > length:
            raise DomainError(f"interval {interval} is not inside (0, {length})")
    by_start = sorted(intervals)
    for previous, current in zip(by_start, by_start[1:]):
        if current.start < previous.end:
            raise DomainError(f"intervals {previous} and {current} overlap")

    ranked = sorted(range(len(intervals)), key=lambda i: (-intervals[i].length, intervals[i].start))
    # realized plateaus as (start, end, value), anchors included, sorted by start
    plateaus: List[Tuple[Real, Real, Fraction]] = [(0, 0, Fraction(0)), (length, length, Fraction(1))]
    values: List[Optional[Fraction]] = [None] * len(intervals)
    for i in ranked[:stage]:
        interval = intervals[i]
        # plateaus[k - 1] ends at or before the interval, plateaus[k] starts at or after it
        k = bisect_right([start for start, _, _ in plateaus], interval.start)
        value = (plateaus[k - 1][2] + plateaus[k][2]) / 2
        plateaus.insert(k, (interval.start, interval.end, value))
        values[i] = value

    breakpoints: List[Tuple[Real, Fraction]] = []
    for start, end, value in plateaus:
        for point in ((start, value), (end, value)):
            if not breakpoints or breakpoints[-1] != point:
                breakpoints.append(point)
    logger.debug("staircase on [0, %s] at stage %d", length, stage)
    return Staircase(
        stage=stage,
        length=length,
        intervals=intervals,
        values=tuple(values),
        breakpoints=tuple(breakpoints),
    )
