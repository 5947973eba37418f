"""
Random Combs and Coalescents
This module samples random combs (the Kingman comb, coalescent point processes and
i.i.d. splitting-tree depths) and computes the partition-valued process they induce
on sampled points.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import daiquiri
import numpy as np

from combs.comb import Comb, Real
from combs.errors import DomainError

from .contour import sample_excursion_below

logger = daiquiri.getLogger(__name__)


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent child seeds for `count` replicates of a seeded run."""
    return np.random.SeedSequence(seed).spawn(count)


@dataclass(frozen=True)
class Partition:
    """A partition of 0..n-1 into nonempty disjoint blocks, in order of first element."""

    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(block) for block in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        members = [i for block in blocks for i in block]
        if any(len(block) == 0 for block in blocks):
            raise DomainError("partition has an empty block")
        if sorted(members) != list(range(len(members))):
            raise DomainError("blocks are not a partition of 0..n-1")

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(len(block) for block in self.blocks)

    def block_sizes(self) -> List[int]:
        return sorted((len(block) for block in self.blocks), reverse=True)

    def refines(self, other: "Partition") -> bool:
        """True when every block of self lies inside a block of other."""
        owner = {}
        for label, block in enumerate(other.blocks):
            for i in block:
                owner[i] = label
        return all(len({owner[i] for i in block}) == 1 for block in self.blocks)


def _check_sample_positions(comb: Comb, positions: Sequence[Real]) -> List[int]:
    if len(set(positions)) != len(positions):
        raise DomainError("sample positions must be distinct")
    for x in positions:
        comb.check_position(x)
        if comb.height_at(x) > 0:
            raise DomainError(f"sample position {x} sits on a tooth")
    return sorted(range(len(positions)), key=lambda i: positions[i])


def partition_process(comb: Comb, positions: Sequence[Real], t: Real) -> Partition:
    """
    The partition of the sampled points into classes at comb distance at most t.

    Args:
        comb: The comb
        positions: Distinct zeros of f
        t: Nonnegative time

    Returns:
        Blocks made of runs of sorted positions separated only by teeth of height <= t
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    order = _check_sample_positions(comb, positions)
    if not order:
        return Partition(())
    blocks = [[order[0]]]
    for previous, current in zip(order, order[1:]):
        if comb.sup_between(positions[previous], positions[current]) <= t:
            blocks[-1].append(current)
        else:
            blocks.append([current])
    return Partition(tuple(tuple(sorted(block)) for block in sorted(blocks, key=min)))


def block_holding_times(comb: Comb, positions: Sequence[Real]) -> Dict[int, float]:
    """
    Time spent by the partition process with k blocks, for k = n down to 2.

    The process starts with n singletons at t = 0 and loses one block each time t
    passes the height separating two consecutive sampled points.
    """
    order = _check_sample_positions(comb, positions)
    n = len(order)
    separations = sorted(
        float(comb.sup_between(positions[a], positions[b])) for a, b in zip(order, order[1:])
    )
    holding = {}
    elapsed = 0.0
    for i, height in enumerate(separations):
        holding[n - i] = height - elapsed
        elapsed = height
    return holding


def sample_kingman_comb(n: int, seed=None) -> Comb:
    """
    Sample the Kingman comb truncated at n lineages.

    Tooth j sits at a uniform position of (0, 1) with height tau_j, the sum of
    independent exponentials e_k of rate k(k-1)/2 over k = j+1..n.

    Args:
        n: Number of lineages, at least 2
        seed: Anything numpy.random.default_rng accepts

    Returns:
        A comb on [0, 1] with n-1 teeth
    """
    if n < 2:
        raise DomainError(f"need at least 2 lineages, got {n}")
    rng = np.random.default_rng(seed)
    k = np.arange(2, n + 1)
    holding = rng.exponential(2.0 / (k * (k - 1)))
    heights = np.cumsum(holding[::-1])[::-1]
    positions = rng.random(n - 1)
    while np.any(positions == 0) or len(np.unique(positions)) < n - 1:
        positions = rng.random(n - 1)
    teeth = sorted(zip(positions.tolist(), heights.tolist()))
    return Comb(0.0, 1.0, tuple(teeth))


@dataclass(frozen=True)
class Intensity:
    """A height intensity nu given by its tail x -> nu([x, inf)) and the inverse of that tail."""

    tail: Callable[[float], float]
    inverse_tail: Callable[[float], float]
    name: str = "custom"


def brownian_tail(x: float) -> float:
    """nu([x, inf)) for nu(dh) = dh / (2 h^2)."""
    if not x > 0:
        raise DomainError(f"tail is only defined for positive heights, got {x}")
    return 1 / (2 * x)


def brownian_inverse_tail(y: float) -> float:
    if not y > 0:
        raise DomainError(f"inverse tail is only defined for positive masses, got {y}")
    return 1 / (2 * y)


def brownian_intensity() -> Intensity:
    return Intensity(brownian_tail, brownian_inverse_tail, "brownian")


@dataclass(frozen=True)
class PointProcessSample:
    """
    Atoms (S_i, H_i) of a coalescent point process with H_i in [epsilon, T], up to the
    first atom (D, H) with H > T.
    """

    T: float
    epsilon: float
    atoms: Tuple[Tuple[float, float], ...]
    terminal: Tuple[float, float]
    seed: Optional[int] = None

    def __post_init__(self):
        D, H = self.terminal
        if not H > self.T:
            raise DomainError(f"terminal height {H} does not exceed {self.T}")
        previous = 0.0
        for s, h in self.atoms:
            if not previous < s < D:
                raise DomainError(f"atom position {s} out of order")
            if not self.epsilon <= h <= self.T:
                raise DomainError(f"atom height {h} outside [{self.epsilon}, {self.T}]")
            previous = s

    def comb(self) -> Comb:
        """The comb on [0, D] with a tooth 2 H_i at each S_i."""
        return Comb(0.0, self.terminal[0], tuple((s, 2 * h) for s, h in self.atoms))


def sample_cpp(
    T: float, epsilon: float, intensity: Intensity, seed=None
) -> Tuple[Comb, PointProcessSample]:
    """
    Sample the coalescent point process of heights nu, cut off below epsilon.

    Atoms of height at least epsilon arrive in S at rate nu([epsilon, inf)); heights
    are drawn by inverting the tail. Sampling stops at the first atom above T.

    Args:
        T: Truncation height, positive
        epsilon: Cutoff, 0 < epsilon <= T
        intensity: Tail and inverse tail of nu
        seed: Anything numpy.random.default_rng accepts

    Returns:
        (comb, sample)
    """
    if not T > 0 or not epsilon > 0:
        raise DomainError(f"T and epsilon must be positive, got {T}, {epsilon}")
    if epsilon > T:
        raise DomainError(f"cutoff {epsilon} exceeds T = {T}")
    rate = intensity.tail(epsilon)
    if not (math.isfinite(rate) and rate > 0):
        raise DomainError(f"nu([{epsilon}, inf)) = {rate} is not a positive finite mass")
    if not intensity.tail(T) > 0:
        raise DomainError(f"nu(({T}, inf)) = 0, the process has no terminal atom")

    rng = np.random.default_rng(seed)
    s = 0.0
    atoms: List[Tuple[float, float]] = []
    while True:
        step = rng.exponential(1 / rate)
        while step == 0:
            step = rng.exponential(1 / rate)
        s += step
        h = intensity.inverse_tail(rate * (1.0 - rng.random()))
        if h > T:
            break
        atoms.append((s, max(h, epsilon)))
    logger.debug("coalescent point process: %d atoms before D = %s", len(atoms), s)
    sample = PointProcessSample(
        T=T,
        epsilon=epsilon,
        atoms=tuple(atoms),
        terminal=(s, h),
        seed=seed if isinstance(seed, int) else None,
    )
    return sample.comb(), sample


@dataclass(frozen=True)
class LifetimeLaw:
    """Lifetime (jump size) law of a splitting tree, sampled by inverting its tail."""

    tail: Callable[[float], float]
    inverse_tail: Callable[[float], float]

    def __call__(self, rng: np.random.Generator) -> float:
        return self.inverse_tail(1.0 - rng.random())


def exponential_lifetime(rate: float) -> LifetimeLaw:
    if not rate > 0:
        raise DomainError(f"lifetime rate must be positive, got {rate}")
    return LifetimeLaw(lambda x: math.exp(-rate * x), lambda y: -math.log(y) / rate)


def sample_splitting_depths(
    T: float,
    birth_rate: float,
    lifetime: Callable[[np.random.Generator], float],
    n: int,
    seed=None,
    max_attempts: int = 10_000,
) -> Comb:
    """
    A comb of n i.i.d. excursion depths of the splitting-tree contour below T.

    Each depth is 2 (T - inf) over one excursion of the reflected process that returns
    to T; excursions killed at 0 are discarded and redrawn.

    Args:
        T: Truncation height, positive
        birth_rate: Jump rate b, positive
        lifetime: Jump size sampler
        n: Number of teeth
        seed: Anything numpy.random.default_rng accepts
        max_attempts: Bound on the draws spent on one tooth

    Returns:
        A comb on [0, n + 1] with teeth at 1..n
    """
    if not T > 0 or not birth_rate > 0:
        raise DomainError(f"T and birth rate must be positive, got {T}, {birth_rate}")
    if n < 0:
        raise DomainError(f"tooth count must be nonnegative, got {n}")
    rng = np.random.default_rng(seed)
    teeth = []
    for position in range(1, n + 1):
        for _ in range(max_attempts):
            path = sample_excursion_below(T, birth_rate, lifetime, rng)
            if path.returned:
                teeth.append((float(position), 2 * (T - path.infimum)))
                break
        else:
            logger.warning("no returning excursion in %d attempts", max_attempts)
            raise DomainError(f"no excursion returned to {T} in {max_attempts} attempts")
    return Comb(0.0, float(n + 1), tuple(teeth))
