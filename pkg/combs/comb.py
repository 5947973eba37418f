"""
Comb Core
This module defines combs, their points with face tags, and the comb (pseudo-)metric
with the completion semantics that distinguish the left and right faces of a tooth.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Callable, List, Optional, Protocol, Sequence, Tuple, Union

import daiquiri
import numpy as np

from .errors import DomainError
from .range_max import RangeMaxIndex

logger = daiquiri.getLogger(__name__)

Real = Union[int, float, Fraction]


class Face(str, Enum):
    """Which completion point of a position is meant."""

    LEFT = "left"
    RIGHT = "right"
    INTERIOR = "interior"


class LimitSide(str, Enum):
    """Direction of a monotone approach towards a position."""

    FROM_LEFT = "from_left"
    FROM_RIGHT = "from_right"


@dataclass(frozen=True)
class CombPoint:
    """A position of the comb interval together with a face tag."""

    position: Real
    face: Face = Face.INTERIOR

    @classmethod
    def left(cls, position: Real) -> "CombPoint":
        return cls(position, Face.LEFT)

    @classmethod
    def right(cls, position: Real) -> "CombPoint":
        return cls(position, Face.RIGHT)


class CombFunction(Protocol):
    """Anything the face-distance rule can be evaluated on."""

    def check_position(self, x: Real) -> None:
        ...

    def height_at(self, x: Real) -> Real:
        ...

    def sup_between(self, s: Real, t: Real) -> Real:
        ...


@dataclass(frozen=True)
class Comb:
    """
    A comb: finitely many teeth (position, height) over the interval [interval_lo, interval_hi].

    Positions are strictly increasing and strictly inside the interval, heights are
    strictly positive. f vanishes away from the teeth. The sup of f over any interval
    is answered by a sparse table built on first use.
    """

    interval_lo: Real
    interval_hi: Real
    teeth: Tuple[Tuple[Real, Real], ...] = field(default=())

    def __post_init__(self):
        teeth = tuple((position, height) for position, height in self.teeth)
        object.__setattr__(self, "teeth", teeth)
        if self.interval_lo > self.interval_hi:
            raise DomainError(
                f"empty interval [{self.interval_lo}, {self.interval_hi}]"
            )
        previous = self.interval_lo
        for position, height in teeth:
            if not position > previous:
                raise DomainError(
                    f"tooth at {position} is not strictly after {previous}"
                )
            if not height > 0:
                raise DomainError(f"tooth at {position} has non-positive height {height}")
            previous = position
        if teeth and not teeth[-1][0] < self.interval_hi:
            raise DomainError(
                f"tooth at {teeth[-1][0]} is not strictly inside the interval"
            )

    @cached_property
    def positions(self) -> List[Real]:
        return [position for position, _ in self.teeth]

    @cached_property
    def heights(self) -> List[Real]:
        return [height for _, height in self.teeth]

    @cached_property
    def index(self) -> RangeMaxIndex:
        logger.debug("building range-max index over %d teeth", len(self.teeth))
        return RangeMaxIndex(self.heights)

    @property
    def zero(self) -> Real:
        """The zero of the height type (0.0 for an empty comb)."""
        return self.teeth[0][1] * 0 if self.teeth else 0.0

    def __len__(self) -> int:
        return len(self.teeth)

    def check_position(self, x: Real) -> None:
        if not self.interval_lo <= x <= self.interval_hi:
            raise DomainError(
                f"position {x} outside [{self.interval_lo}, {self.interval_hi}]"
            )

    def height_at(self, x: Real) -> Real:
        """The value f(x)."""
        k = bisect_left(self.positions, x)
        if k < len(self.positions) and self.positions[k] == x:
            return self.heights[k]
        return self.zero

    def tooth_span(self, s: Real, t: Real) -> Tuple[int, int]:
        """Indices first..last of the teeth lying strictly inside (s, t)."""
        return bisect_right(self.positions, s), bisect_left(self.positions, t) - 1

    def sup_between(
        self, s: Real, t: Real, closed_left: bool = False, closed_right: bool = False
    ) -> Real:
        """
        Supremum of f over (s, t), 0 when no tooth lies inside.

        closed_left / closed_right include the endpoint s / t in the range.
        """
        first, last = self.tooth_span(s, t)
        best = self.index.query(first, last)
        best = self.zero if best is None else best
        if closed_left:
            best = max(best, self.height_at(s))
        if closed_right:
            best = max(best, self.height_at(t))
        return best

    def gap_representatives(self) -> List[Real]:
        """One zero of f in every gap between consecutive teeth, end gaps included."""
        bounds = [self.interval_lo, *self.positions, self.interval_hi]
        return [(left + right) / 2 for left, right in zip(bounds, bounds[1:])]


def build_index(comb: Comb) -> RangeMaxIndex:
    """Return the range-max index over the tooth heights of a comb."""
    return comb.index


def _resolve_face(comb: CombFunction, point: CombPoint) -> Tuple[Face, Real]:
    comb.check_position(point.position)
    height = comb.height_at(point.position)
    if height > 0:
        if point.face is Face.INTERIOR:
            raise DomainError(
                f"position {point.position} carries a tooth; pick its left or right face"
            )
        return point.face, height
    # faces of a zero of f are identified
    return Face.INTERIOR, height


def comb_distance(comb: CombFunction, a: CombPoint, b: CombPoint) -> Real:
    """
    Distance between two points of the completed comb space.

    For s < t the left endpoint contributes f(s) only through its left face and the
    right endpoint contributes f(t) only through its right face; the open interval
    (s, t) always contributes. At equal positions two different faces are at
    distance f(t), equal faces at distance 0.

    Args:
        comb: The comb (or any CombFunction, e.g. the p-adic comb)
        a: First point
        b: Second point

    Returns:
        The comb distance, in the height type of the comb
    """
    face_a, height_a = _resolve_face(comb, a)
    face_b, height_b = _resolve_face(comb, b)
    if a.position == b.position:
        return height_a if face_a is not face_b else height_a * 0
    if b.position < a.position:
        a, b = b, a
        face_a, face_b = face_b, face_a
        height_a, height_b = height_b, height_a

    best = comb.sup_between(a.position, b.position)
    if face_a is Face.LEFT and height_a > best:
        best = height_a
    if face_b is Face.RIGHT and height_b > best:
        best = height_b
    return best


def find_ultrametric_violation(distances) -> Optional[Tuple[int, int, int]]:
    """
    Look for a triple breaking d(i,k) <= max(d(i,j), d(j,k)).

    Args:
        distances: Square matrix (array-like, float or exact values)

    Returns:
        The first violating triple (i, j, k), or None
    """
    d = np.asarray(distances)
    for j in range(d.shape[0]):
        bound = np.maximum.outer(d[:, j], d[j, :])
        bad = np.argwhere(d > bound)
        if len(bad):
            i, k = bad[0]
            return int(i), j, int(k)
    return None


def verify_ultrametric(
    comb: CombFunction,
    points: Sequence[CombPoint],
    distance: Callable[[CombFunction, CombPoint, CombPoint], Real] = comb_distance,
) -> bool:
    """
    Check the strong triangle inequality on every triple of points.

    The check is vacuously true for fewer than three points. `distance` can be
    replaced to inject faults into the check.
    """
    n = len(points)
    if n < 3:
        return True
    matrix = np.empty((n, n), dtype=object)
    for i in range(n):
        for k in range(n):
            matrix[i, k] = distance(comb, points[i], points[k])
    violation = find_ultrametric_violation(matrix)
    if violation is not None:
        logger.debug("ultrametric inequality fails on triple %s", violation)
    return violation is None


def face_limit_distance(
    comb: Comb,
    x: Real,
    side: LimitSide,
    approaching_positions: Sequence[Real],
) -> List[Real]:
    """
    Distances from a face of x to a monotone sequence of zeros of f approaching x.

    An increasing approach converges to the left face of x, a decreasing one to the
    right face. The returned distances are nonincreasing and tend to 0.

    Args:
        comb: The comb
        x: Limit position
        side: Direction of approach
        approaching_positions: Strictly monotone positions converging to x, all with f = 0

    Returns:
        The list of distances, one per approaching position
    """
    side = LimitSide(side)
    if side is LimitSide.FROM_LEFT:
        target_face = Face.LEFT
        ordered = all(s < t for s, t in zip(approaching_positions, approaching_positions[1:]))
        on_side = all(s < x for s in approaching_positions)
    else:
        target_face = Face.RIGHT
        ordered = all(s > t for s, t in zip(approaching_positions, approaching_positions[1:]))
        on_side = all(s > x for s in approaching_positions)
    if not (ordered and on_side):
        raise DomainError(f"positions are not strictly monotone towards {x} ({side.value})")

    target = CombPoint(x, target_face if comb.height_at(x) > 0 else Face.INTERIOR)
    return [
        comb_distance(comb, target, CombPoint(s, Face.INTERIOR))
        for s in approaching_positions
    ]


@dataclass(frozen=True)
class DendrogramNode:
    """Node of the ultrametric tree drawn under a comb; leaves are gaps of the comb."""

    x: Real
    height: Real
    children: Tuple["DendrogramNode", ...] = ()


def comb_dendrogram(comb: Comb) -> DendrogramNode:
    """
    Build the ultrametric tree associated with a comb.

    The internal nodes form the Cartesian tree of the tooth heights (each tooth joins
    the subtrees on its two sides at its own height); leaves sit at the gap midpoints.
    """
    leaves = [DendrogramNode(x, comb.zero) for x in comb.gap_representatives()]
    n = len(comb)
    if n == 0:
        return leaves[0]

    heights = comb.heights
    left_child = [-1] * n
    right_child = [-1] * n
    stack: List[int] = []
    for i in range(n):
        last = -1
        while stack and heights[stack[-1]] < heights[i]:
            last = stack.pop()
        left_child[i] = last
        if stack:
            right_child[stack[-1]] = i
        stack.append(i)
    root = stack[0]

    built: dict = {}
    pending = [(root, False)]
    while pending:
        tooth, expanded = pending.pop()
        if not expanded:
            pending.append((tooth, True))
            for child in (left_child[tooth], right_child[tooth]):
                if child >= 0:
                    pending.append((child, False))
            continue
        left = built.pop(left_child[tooth]) if left_child[tooth] >= 0 else leaves[tooth]
        right = built.pop(right_child[tooth]) if right_child[tooth] >= 0 else leaves[tooth + 1]
        built[tooth] = DendrogramNode(comb.positions[tooth], heights[tooth], (left, right))
    return built[root]
