"""
Ultrametric Embedding
This module converts finite ultrametric spaces into combs and back: the ordering of a
finite ultrametric set, the measured construction driven by the fragmentation of balls,
and the visibility measure.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import daiquiri
import numpy as np

from combs.comb import Comb, Real, find_ultrametric_violation
from combs.errors import DomainError, MissingMassesError, OrderViolation, UltrametricViolation

logger = daiquiri.getLogger(__name__)

Block = Tuple[int, ...]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    # decimal reading of floats, so "0.1" stays one tenth
    return Fraction(repr(float(value)))


@dataclass(frozen=True, eq=False)
class UltrametricMatrix:
    """
    A finite (pseudo-)ultrametric space given by its distance matrix and optional point masses.

    The matrix is stored as a read-only float64 array. Construction checks shape, symmetry,
    zero diagonal and nonnegativity; the strong triangle inequality is checked by the
    operations that rely on it (see `check_ultrametric`), so that invalid files can still be
    loaded and reported on.
    """

    distances: np.ndarray
    masses: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        d = np.array(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise DomainError(f"distance matrix must be square and nonempty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise DomainError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise DomainError("distance matrix has negative entries")
        if np.any(np.diagonal(d) != 0):
            raise DomainError("distance matrix has a nonzero diagonal entry")
        if not np.array_equal(d, d.T):
            raise DomainError("distance matrix is not symmetric")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)

        if self.masses is not None:
            masses = tuple(_as_fraction(m) for m in self.masses)
            if len(masses) != d.shape[0]:
                raise DomainError(f"expected {d.shape[0]} masses, got {len(masses)}")
            if any(m <= 0 for m in masses):
                raise DomainError("masses must be strictly positive")
            object.__setattr__(self, "masses", masses)

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.distances.max())

    @property
    def total_mass(self) -> Fraction:
        if self.masses is None:
            return Fraction(self.n)
        return sum(self.masses, Fraction(0))

    @property
    def jump_thresholds(self) -> List[float]:
        """Distinct positive distances, in decreasing order."""
        values = np.unique(self.distances)
        return [float(v) for v in values[::-1] if v > 0]

    def with_masses(self, masses: Sequence[Real]) -> "UltrametricMatrix":
        return UltrametricMatrix(self.distances, tuple(masses))

    def check_ultrametric(self) -> None:
        """Raise UltrametricViolation carrying the first violating triple, if any."""
        violation = find_ultrametric_violation(self.distances)
        if violation is not None:
            raise UltrametricViolation(violation)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UltrametricMatrix):
            return NotImplemented
        return np.array_equal(self.distances, other.distances) and self.masses == other.masses


@dataclass(frozen=True)
class BallPartition:
    """
    The ordered partition of the points into closed balls of a common radius.

    blocks[i] is the i-th ball, cumulative_masses[i] the mass of blocks 0..i and
    intervals[i] the segment of [0, m] assigned to blocks[i].
    """

    threshold: Real
    blocks: Tuple[Block, ...]
    cumulative_masses: Tuple[Fraction, ...]
    intervals: Tuple[Tuple[Fraction, Fraction], ...]

    @property
    def boundaries(self) -> Tuple[Fraction, ...]:
        """Inner cut points of [0, m], one between each pair of consecutive blocks."""
        return self.cumulative_masses[:-1]

    def __len__(self) -> int:
        return len(self.blocks)


def _balls(d: np.ndarray, members: Sequence[int], t: float) -> List[Block]:
    """Classes of d <= t among members; each class keeps the order of members."""
    unassigned = list(members)
    balls = []
    while unassigned:
        center = unassigned[0]
        balls.append(tuple(m for m in unassigned if d[center, m] <= t))
        unassigned = [m for m in unassigned if d[center, m] > t]
    return balls


def order_ultrametric(matrix: UltrametricMatrix) -> List[int]:
    """
    Label the points so that d(x_i, x_j) is the maximum of the consecutive distances between them.

    The closest pair (y, z) is located (ties broken by the lexicographic order of (y, z)),
    the rest is ordered recursively and z is inserted right after y.

    Args:
        matrix: A valid ultrametric matrix

    Returns:
        The order as a list of point indices

    Raises:
        UltrametricViolation: the matrix breaks the strong triangle inequality
    """
    matrix.check_ultrametric()
    d = matrix.distances
    remaining = list(range(matrix.n))
    merges: List[Tuple[int, int]] = []
    while len(remaining) > 1:
        sub = d[np.ix_(remaining, remaining)]
        upper = np.triu(np.ones(sub.shape, dtype=bool), k=1)
        # row-major argmin returns the lexicographically first closest pair
        a, b = divmod(int(np.argmin(np.where(upper, sub, np.inf))), len(remaining))
        y, z = remaining[a], remaining[b]
        merges.append((y, z))
        remaining.remove(z)

    order = [remaining[0]]
    for y, z in reversed(merges):
        order.insert(order.index(y) + 1, z)
    return order


def check_comb_order(matrix: UltrametricMatrix, order: Sequence[int]) -> Optional[Tuple[int, int]]:
    """
    Return the first slot pair (i, j), i < j, where d(x_i, x_j) differs from the
    maximum of d(x_k, x_{k+1}) over i <= k < j, or None if the order is a comb order.
    """
    if sorted(order) != list(range(matrix.n)):
        raise DomainError(f"order is not a permutation of 0..{matrix.n - 1}")
    d = matrix.distances[np.ix_(order, order)]
    consecutive = np.diagonal(d, 1)
    for i in range(len(order) - 1):
        running = np.maximum.accumulate(consecutive[i:])
        bad = np.nonzero(d[i, i + 1:] != running)[0]
        if len(bad):
            return i, i + 1 + int(bad[0])
    return None


def comb_from_ordered(matrix: UltrametricMatrix, order: Sequence[int]) -> Comb:
    """
    Transcribe an ordered finite ultrametric space into the comb on [0, n] with a tooth at
    each integer k of height d(x_k, x_{k+1}).

    Pairs at distance zero get no tooth.
    """
    violation = check_comb_order(matrix, order)
    if violation is not None:
        raise OrderViolation(violation)
    d = matrix.distances
    teeth = []
    for slot in range(1, matrix.n):
        height = float(d[order[slot - 1], order[slot]])
        if height > 0:
            teeth.append((float(slot), height))
        else:
            logger.warning("points %d and %d are at distance 0", order[slot - 1], order[slot])
    return Comb(0.0, float(matrix.n), tuple(teeth))


def comb_embedding(matrix: UltrametricMatrix) -> Tuple[List[int], Comb, List[float]]:
    """
    Order a matrix and embed it in a comb.

    Returns:
        (order, comb, positions) where positions[i] is the zero of the comb standing for point i
    """
    order = order_ultrametric(matrix)
    comb = comb_from_ordered(matrix, order)
    positions = [0.0] * matrix.n
    for slot, point in enumerate(order):
        positions[point] = slot + 0.5
    return order, comb, positions


def matrix_from_comb(comb: Comb, sample_positions: Sequence[Real]) -> UltrametricMatrix:
    """
    Restrict the comb metric to finitely many zeros of the comb.

    Args:
        comb: The comb
        sample_positions: Distinct positions of the interval where f vanishes

    Returns:
        The matrix of pairwise comb distances
    """
    n = len(sample_positions)
    if len(set(sample_positions)) != n:
        raise DomainError("sample positions must be distinct")
    for x in sample_positions:
        comb.check_position(x)
        if comb.height_at(x) > 0:
            raise DomainError(f"sample position {x} sits on a tooth")

    by_position = sorted(range(n), key=lambda i: sample_positions[i])
    d = np.zeros((n, n))
    for a, i in enumerate(by_position):
        for j in by_position[a + 1:]:
            d[i, j] = d[j, i] = float(comb.sup_between(sample_positions[i], sample_positions[j]))
    return UltrametricMatrix(d)


def partition_at(
    matrix: UltrametricMatrix,
    t: Real,
    parent: Optional[BallPartition] = None,
) -> BallPartition:
    """
    Partition the points into the closed balls of radius t.

    Each block of the parent partition (or the whole space) is replaced in place by its
    sub-balls ranked by decreasing mass, equal masses ranked by smallest member index.
    Without masses the counting measure is used.

    Args:
        matrix: The ultrametric matrix
        t: Positive radius
        parent: Coarser partition with a strictly larger threshold

    Returns:
        The ordered partition with its cumulative masses and intervals
    """
    if not t > 0:
        raise DomainError(f"radius must be positive, got {t}")
    if parent is not None and not t < parent.threshold:
        raise DomainError(f"radius {t} is not below the parent radius {parent.threshold}")
    masses = matrix.masses or (Fraction(1),) * matrix.n
    parents = parent.blocks if parent is not None else (tuple(range(matrix.n)),)

    blocks: List[Block] = []
    for block in parents:
        balls = _balls(matrix.distances, block, t)
        balls.sort(key=lambda ball: (-sum(masses[i] for i in ball), ball[0]))
        blocks.extend(balls)

    cumulative = []
    total = Fraction(0)
    for block in blocks:
        total += sum(masses[i] for i in block)
        cumulative.append(total)
    starts = [Fraction(0), *cumulative[:-1]]
    return BallPartition(
        threshold=t,
        blocks=tuple(blocks),
        cumulative_masses=tuple(cumulative),
        intervals=tuple(zip(starts, cumulative)),
    )


def fragmentation_cascade(matrix: UltrametricMatrix) -> List[BallPartition]:
    """
    Partitions at every jump threshold, from the diameter down, followed by the partition
    into points at distance zero from each other.
    """
    thresholds = matrix.jump_thresholds
    if not thresholds:
        return [partition_at(matrix, 1.0)]
    cascade = [partition_at(matrix, thresholds[0])]
    for t in thresholds[1:]:
        cascade.append(partition_at(matrix, t, cascade[-1]))
    cascade.append(partition_at(matrix, thresholds[-1] / 2, cascade[-1]))
    logger.debug("fragmentation cascade with %d levels", len(cascade))
    return cascade


def comb_from_measured(
    matrix: UltrametricMatrix,
) -> Tuple[Comb, Tuple[Tuple[Fraction, Fraction], ...]]:
    """
    Build the comb on [0, m] whose Lebesgue measure is carried to the point masses.

    Every cut point a between consecutive balls gets the height of the largest threshold
    below which a separates blocks. Each point receives a subinterval of [0, m] whose
    length is its mass; the midpoints of these intervals realize the distances exactly.

    Args:
        matrix: Ultrametric matrix with strictly positive masses

    Returns:
        (comb, intervals) with intervals[i] the segment of [0, m] standing for point i
    """
    if matrix.masses is None:
        raise MissingMassesError("matrix has no masses; apply visibility_measure first")
    matrix.check_ultrametric()
    cascade = fragmentation_cascade(matrix)

    heights = {}
    for coarse, fine in zip(cascade, cascade[1:]):
        for cut in fine.boundaries:
            heights.setdefault(cut, coarse.threshold)

    intervals: List[Tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(0))] * matrix.n
    finest = cascade[-1]
    for block, (start, _) in zip(finest.blocks, finest.intervals):
        cursor = start
        for point in block:
            intervals[point] = (cursor, cursor + matrix.masses[point])
            cursor += matrix.masses[point]

    teeth = tuple(sorted(heights.items()))
    return Comb(Fraction(0), matrix.total_mass, teeth), tuple(intervals)


def visibility_measure(matrix: UltrametricMatrix) -> Tuple[Fraction, ...]:
    """
    Probability measure dividing the mass of every ball equally between its sub-balls.

    Points at distance zero from each other share their ball's mass equally.
    """
    d = matrix.distances
    masses: List[Fraction] = [Fraction(0)] * matrix.n
    pending = [(tuple(range(matrix.n)), Fraction(1))]
    while pending:
        ball, mass = pending.pop()
        if len(ball) == 1:
            masses[ball[0]] = mass
            continue
        sub = d[np.ix_(ball, ball)]
        radius = sub.max()
        if radius == 0:
            for point in ball:
                masses[point] = mass / len(ball)
            continue
        next_threshold = sub[sub < radius].max()
        children = _balls(d, ball, next_threshold)
        for child in children:
            pending.append((child, mass / len(children)))
    return tuple(masses)
