"""
Tree Contours
This module handles contour functions of trees: the tree pseudo-metric, the sphere of
radius T read off the excursions below level T, the comb representing that sphere, and
the reflected compound Poisson contour of splitting trees.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, List, Tuple

import daiquiri
import numpy as np

from combs.comb import Comb, CombPoint, Face, Real
from combs.errors import DomainError, EmptySphereError

from .staircase import Staircase, staircase

logger = daiquiri.getLogger(__name__)

LEVEL_TOLERANCE = 1e-12

Breakpoint = Tuple[Real, Real, Real]
JumpLaw = Callable[[np.random.Generator], float]


def _at_level(value: Real, level: Real) -> bool:
    """value == level, exactly for rationals, within LEVEL_TOLERANCE for floats."""
    if isinstance(value, (int, Fraction)) and isinstance(level, (int, Fraction)):
        return value == level
    return abs(value - level) <= LEVEL_TOLERANCE


def _ratio(numerator: Real, denominator: Real) -> Real:
    """numerator / denominator, kept exact when both are rationals."""
    if isinstance(numerator, (int, Fraction)) and isinstance(denominator, (int, Fraction)):
        return Fraction(numerator) / denominator
    return numerator / denominator


@dataclass(frozen=True)
class Contour:
    """
    A càdlàg contour h given by breakpoints (time, left limit, value).

    h equals `value` at each breakpoint time and is affine from `value` at one
    breakpoint to the left limit of the next. A jump (value > left limit) is always
    upwards. The contour starts from 0 and ends at 0.
    """

    breakpoints: Tuple[Breakpoint, ...]

    def __post_init__(self):
        breakpoints = tuple(tuple(point) for point in self.breakpoints)
        object.__setattr__(self, "breakpoints", breakpoints)
        if not breakpoints:
            raise DomainError("contour has no breakpoints")
        for (t0, _, _), (t1, _, _) in zip(breakpoints, breakpoints[1:]):
            if not t0 < t1:
                raise DomainError(f"breakpoint times {t0}, {t1} are not increasing")
        for time, left, value in breakpoints:
            if left < 0 or value < 0:
                raise DomainError(f"negative contour value at time {time}")
            if value < left:
                raise DomainError(f"negative jump at time {time}")
        if breakpoints[0][1] != 0:
            raise DomainError("contour must start from 0")
        if breakpoints[-1][2] != 0:
            raise DomainError("contour must end at 0")

    @cached_property
    def times(self) -> List[Real]:
        return [time for time, _, _ in self.breakpoints]

    @property
    def start(self) -> Real:
        return self.breakpoints[0][0]

    @property
    def end(self) -> Real:
        return self.breakpoints[-1][0]

    @property
    def maximum(self) -> Real:
        return max(value for _, _, value in self.breakpoints)

    def check_time(self, x: Real) -> None:
        if not self.start <= x <= self.end:
            raise DomainError(f"time {x} outside [{self.start}, {self.end}]")

    def value_at(self, x: Real) -> Real:
        """h(x)."""
        self.check_time(x)
        k = bisect_right(self.times, x) - 1
        t0, _, v0 = self.breakpoints[k]
        if t0 == x:
            return v0
        t1, l1, _ = self.breakpoints[k + 1]
        return v0 + _ratio((l1 - v0) * (x - t0), t1 - t0)

    def infimum(self, a: Real, b: Real) -> Real:
        """Infimum of h over [min(a, b), max(a, b)]."""
        if b < a:
            a, b = b, a
        best = min(self.value_at(a), self.value_at(b))
        first = bisect_left(self.times, a)
        last = bisect_right(self.times, b)
        for time, left, value in self.breakpoints[first:last]:
            best = min(best, value)
            if time > a:
                best = min(best, left)
        return best

    def clamp(self, level: Real) -> "Contour":
        """
        The contour of min(h, level), with a breakpoint inserted wherever a segment
        crosses the level. Crossings are exact when the inputs are rationals.
        """
        clamped: List[Breakpoint] = []
        for k, (time, left, value) in enumerate(self.breakpoints):
            clamped.append((time, min(left, level), min(value, level)))
            if k + 1 == len(self.breakpoints):
                break
            t1, l1, _ = self.breakpoints[k + 1]
            if (value - level) * (l1 - level) < 0:
                crossing = time + _ratio((level - value) * (t1 - time), l1 - value)
                if time < crossing < t1:
                    clamped.append((crossing, level, level))
        return Contour(tuple(clamped))


def tree_distance(h: Contour, s: Real, t: Real) -> Real:
    """
    The tree pseudo-metric d_h(s, t) = h(s) + h(t) - 2 inf h over [s, t].

    Args:
        h: The contour
        s: First time
        t: Second time

    Returns:
        The distance, exact when the contour is rational
    """
    return h.value_at(s) + h.value_at(t) - 2 * h.infimum(s, t)


def four_points_check(distances, tolerance: float = 0.0) -> bool:
    """
    Check the four-point condition on a labeled quadruple: for each of the three ways to
    pair the points, the pairing sum is at most the larger of the two others.
    """
    d = np.asarray(distances)
    sums = [d[0, 1] + d[2, 3], d[0, 2] + d[1, 3], d[0, 3] + d[1, 2]]
    for i, current in enumerate(sums):
        others = max(sums[j] for j in range(3) if j != i)
        if current > others + tolerance:
            return False
    return True


@dataclass(frozen=True)
class Excursion:
    """An excursion of the clamped contour below the level, between two visits."""

    g: Real
    d: Real
    depth: Real


@dataclass(frozen=True)
class ExcursionList:
    """
    Excursions below level T in time order.

    components[i] is the i-th closed component of the visit set; excursions[i] runs
    from the end of components[i] to the start of components[i + 1].
    """

    T: Real
    components: Tuple[Tuple[Real, Real], ...]
    excursions: Tuple[Excursion, ...]

    def component_of(self, s: Real) -> int:
        """Index of the visit component containing time s."""
        starts = [start for start, _ in self.components]
        k = bisect_right(starts, s) - 1
        if k < 0 or s > self.components[k][1]:
            raise DomainError(f"time {s} is not a visit of level {self.T}")
        return k


def visit_components(h: Contour, level: Real) -> List[Tuple[Real, Real]]:
    """Maximal closed time intervals on which min(h, level) equals the level."""
    clamped = h.clamp(level)
    components: List[Tuple[Real, Real]] = []
    previous_on_level = False
    for time, left, value in clamped.breakpoints:
        on_level = _at_level(value, level)
        if on_level and previous_on_level and _at_level(left, level):
            components[-1] = (components[-1][0], time)
        elif on_level:
            components.append((time, time))
        previous_on_level = on_level
    return components


def excursions_below(h: Contour, level: Real) -> ExcursionList:
    """Split the clamped contour into its visit components and the excursions between them."""
    if not level > 0:
        raise DomainError(f"level must be positive, got {level}")
    components = visit_components(h, level)
    if not components:
        raise EmptySphereError(f"contour never reaches level {level} (maximum {h.maximum})")
    clamped = h.clamp(level)
    excursions = []
    for (_, g), (d, _) in zip(components, components[1:]):
        excursions.append(Excursion(g, d, 2 * (level - clamped.infimum(g, d))))
    return ExcursionList(level, tuple(components), tuple(excursions))


def sphere_comb(
    h: Contour, level: Real, epsilon: Real = 0
) -> Tuple[Comb, ExcursionList, Staircase]:
    """
    Represent the sphere of radius `level` of the tree coded by h as a comb on [0, 1].

    Every excursion below the level between two visits becomes a tooth of height
    2 (level - inf) placed at the staircase value of its time interval; teeth of
    height at most epsilon are dropped.

    Args:
        h: The contour
        level: Radius T of the sphere, positive
        epsilon: Cutoff on tooth heights, nonnegative

    Returns:
        (comb, excursions, staircase)

    Raises:
        EmptySphereError: the contour stays below the level
    """
    if epsilon < 0:
        raise DomainError(f"cutoff must be nonnegative, got {epsilon}")
    excursions = excursions_below(h, level)
    origin = excursions.components[0][0]
    local_time = staircase(
        [(e.g - origin, e.d - origin) for e in excursions.excursions],
        excursions.components[-1][1] - origin,
    )
    teeth = [
        (position, excursion.depth)
        for excursion, position in zip(excursions.excursions, local_time.values)
        if excursion.depth > epsilon
    ]
    logger.debug(
        "sphere of radius %s: %d components, %d teeth above %s",
        level,
        len(excursions.components),
        len(teeth),
        epsilon,
    )
    return Comb(Fraction(0), Fraction(1), tuple(teeth)), excursions, local_time


def sphere_image(excursions: ExcursionList, local_time: Staircase, s: Real) -> CombPoint:
    """
    The point of the sphere comb standing for the visit time s.

    A visit before the last component maps to the left face of the next excursion's
    tooth, a visit in the last component to the right face of the last tooth.
    """
    k = excursions.component_of(s)
    if not excursions.excursions:
        return CombPoint(Fraction(0), Face.INTERIOR)
    if k < len(excursions.excursions):
        return CombPoint(local_time.values[k], Face.LEFT)
    return CombPoint(local_time.values[-1], Face.RIGHT)


@dataclass(frozen=True)
class ExcursionPath:
    """
    One excursion of the reflected process started at the level.

    Breakpoint times are relative to the start of the excursion. `returned` is False
    when the process was killed at 0 before coming back to the level.
    """

    breakpoints: Tuple[Breakpoint, ...]
    infimum: float
    returned: bool

    @property
    def duration(self) -> float:
        return self.breakpoints[-1][0]


def sample_excursion_below(
    level: float, jump_rate: float, jump_law: JumpLaw, rng: np.random.Generator
) -> ExcursionPath:
    """
    Run the process with drift -1 and upward jumps at rate `jump_rate` from the level
    until it jumps back to the level (clipped) or hits 0.
    """
    x = level
    elapsed = 0.0
    lowest = level
    breakpoints: List[Breakpoint] = []
    while True:
        wait = rng.exponential(1 / jump_rate) if jump_rate > 0 else np.inf
        if wait >= x:
            breakpoints.append((elapsed + x, 0.0, 0.0))
            return ExcursionPath(tuple(breakpoints), 0.0, False)
        elapsed += wait
        x -= wait
        lowest = min(lowest, x)
        after = min(x + jump_law(rng), level)
        breakpoints.append((elapsed, x, after))
        if after >= level:
            return ExcursionPath(tuple(breakpoints), lowest, True)
        x = after


def sample_reflected_cpp_contour(
    level: float,
    jump_rate: float,
    jump_law: JumpLaw,
    seed=None,
    max_excursions: int = 1_000_000,
) -> Contour:
    """
    Sample the contour of a splitting tree truncated at `level`: start at the level,
    drift down at slope -1, jump up by `jump_law` amounts at rate `jump_rate`, clip at
    the level and stop when hitting 0.

    Args:
        level: Truncation height T, positive
        jump_rate: Birth rate b, nonnegative
        jump_law: Draws one jump size from a numpy Generator
        seed: Anything numpy.random.default_rng accepts
        max_excursions: Bound on the number of returning excursions

    Returns:
        The sampled contour
    """
    if not level > 0:
        raise DomainError(f"level must be positive, got {level}")
    if jump_rate < 0:
        raise DomainError(f"jump rate must be nonnegative, got {jump_rate}")
    rng = np.random.default_rng(seed)
    breakpoints: List[Breakpoint] = [(0.0, 0.0, level)]
    offset = 0.0
    for _ in range(max_excursions):
        path = sample_excursion_below(level, jump_rate, jump_law, rng)
        breakpoints.extend((offset + time, left, value) for time, left, value in path.breakpoints)
        offset += path.duration
        if not path.returned:
            logger.debug("contour killed at time %s", offset)
            return Contour(tuple(breakpoints))
    logger.warning("contour still alive after %d excursions", max_excursions)
    raise DomainError(f"contour did not reach 0 within {max_excursions} excursions")
