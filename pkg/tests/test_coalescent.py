import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from combs.comb import Comb, CombPoint, verify_ultrametric
from combs.errors import DomainError
from spaces.coalescent import (
    Partition,
    PointProcessSample,
    block_holding_times,
    brownian_intensity,
    brownian_tail,
    exponential_lifetime,
    partition_process,
    sample_cpp,
    sample_kingman_comb,
    sample_splitting_depths,
    spawn_seeds,
)

from strategies import combs


@pytest.fixture
def three_teeth():
    return Comb(0.0, 4.0, ((1.0, 1.0), (2.0, 3.0), (3.0, 2.0)))


SAMPLES = [0.5, 1.5, 2.5, 3.5]


class TestPartitionProcess:
    def test_blocks(self, three_teeth):
        assert partition_process(three_teeth, SAMPLES, 2.5).blocks == ((0, 1), (2, 3))
        assert partition_process(three_teeth, SAMPLES, 3).blocks == ((0, 1, 2, 3),)
        assert partition_process(three_teeth, SAMPLES, 0).blocks == ((0,), (1,), (2,), (3,))

    def test_unsorted_positions(self, three_teeth):
        assert partition_process(three_teeth, [3.5, 0.5, 2.5, 1.5], 2.5).blocks == ((0, 2), (1, 3))

    def test_negative_time(self, three_teeth):
        with pytest.raises(DomainError):
            partition_process(three_teeth, SAMPLES, -1)

    def test_holding_times(self, three_teeth):
        assert block_holding_times(three_teeth, SAMPLES) == {4: 1.0, 3: 1.0, 2: 1.0}

    def test_partition_validation(self):
        with pytest.raises(DomainError):
            Partition(((0, 1), (1, 2)))
        with pytest.raises(DomainError):
            Partition(((0,), ()))
        fine = Partition(((0,), (1,), (2, 3)))
        assert fine.refines(Partition(((0, 1), (2, 3))))
        assert not Partition(((0, 2), (1, 3))).refines(Partition(((0, 1), (2, 3))))
        assert fine.block_sizes() == [2, 1, 1]
        assert fine.n == 4

    def test_exchangeable_labels(self):
        """Uniform sample points: each of the three pairs is equally likely to be the merged one."""
        rng = np.random.default_rng(13)
        pairs = {(0, 1): 0, (0, 2): 0, (1, 2): 0}
        for _ in range(1000):
            comb = sample_kingman_comb(20, rng)
            positions = list(rng.uniform(0.0, 1.0, size=3))
            merged = [block for block in partition_process(comb, positions, 0.3).blocks if len(block) == 2]
            if merged:
                pairs[merged[0]] += 1
        assert sum(pairs.values()) > 100
        assert stats.chisquare(list(pairs.values())).pvalue > 0.01


class TestPartitionProperties:
    """Property tests for the partition-valued process"""

    @given(combs(), st.floats(min_value=0, max_value=7), st.floats(min_value=0, max_value=7))
    def test_monotone_in_time(self, comb, s, t):
        """Property: R(s) refines R(t) for s <= t."""
        s, t = min(s, t), max(s, t)
        positions = comb.gap_representatives()
        assert partition_process(comb, positions, s).refines(partition_process(comb, positions, t))

    @given(combs())
    def test_extremes(self, comb):
        """Property: singletons at t = 0, one block above the highest tooth."""
        positions = comb.gap_representatives()
        assert len(partition_process(comb, positions, 0)) == len(positions)
        assert len(partition_process(comb, positions, 7)) == 1


class TestKingmanComb:
    def test_two_lineages(self):
        comb = sample_kingman_comb(2, seed=1)
        assert len(comb) == 1
        assert (comb.interval_lo, comb.interval_hi) == (0.0, 1.0)

    def test_too_few_lineages(self):
        with pytest.raises(DomainError):
            sample_kingman_comb(1, seed=1)

    def test_reproducible(self):
        assert sample_kingman_comb(20, seed=42) == sample_kingman_comb(20, seed=42)
        assert sample_kingman_comb(20, seed=42) != sample_kingman_comb(20, seed=43)

    def test_mean_heights(self):
        n, trials = 50, 10_000
        rng = np.random.default_rng(2024)
        heights = np.array([sorted(sample_kingman_comb(n, rng).heights, reverse=True) for _ in range(trials)])
        for j in (1, 2, 5):
            tau = heights[:, j - 1]
            # truncation at n lineages drops the holding times beyond k = n
            expected = 2 / j - 2 / n
            assert abs(tau.mean() - expected) < 3 * tau.std(ddof=1) / np.sqrt(trials)

    def test_mean_heights_approach_untruncated_law(self):
        n, trials = 1000, 2000
        rng = np.random.default_rng(2025)
        heights = np.array([sorted(sample_kingman_comb(n, rng).heights, reverse=True)[:2] for _ in range(trials)])
        for j in (1, 2):
            tau = heights[:, j - 1]
            assert abs(tau.mean() - 2 / j) < 3 * tau.std(ddof=1) / np.sqrt(trials)

    def test_two_lineages_height_is_exponential(self):
        rng = np.random.default_rng(19)
        heights = [sample_kingman_comb(2, rng).heights[0] for _ in range(2000)]
        assert stats.kstest(heights, "expon").pvalue > 0.01

    def test_sampled_combs_are_ultrametric(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            comb = sample_kingman_comb(12, rng)
            points = [CombPoint(x) for x in comb.gap_representatives()]
            points += [CombPoint.left(x) for x in comb.positions] + [CombPoint.right(x) for x in comb.positions]
            assert verify_ultrametric(comb, points)

    def test_holding_times_are_exponential(self):
        n, trials = 6, 10_000
        rng = np.random.default_rng(7)
        holding = {k: [] for k in range(2, n + 1)}
        for _ in range(trials):
            comb = sample_kingman_comb(n, rng)
            for k, value in block_holding_times(comb, comb.gap_representatives()).items():
                holding[k].append(value)
        for k in (2, 3, 4):
            rate = k * (k - 1) / 2
            assert stats.kstest(holding[k], "expon", args=(0, 1 / rate)).pvalue > 0.01


class TestCoalescentPointProcess:
    def test_brownian_tail(self):
        assert brownian_tail(1) == 0.5
        assert brownian_tail(0.5) == 1.0
        assert brownian_tail(1e12) < 1e-11
        with pytest.raises(DomainError):
            brownian_tail(0)

    def test_sample_shape(self):
        comb, sample = sample_cpp(1.0, 0.1, brownian_intensity(), seed=3)
        assert comb.interval_hi == sample.terminal[0]
        assert sample.terminal[1] > 1.0
        assert comb.heights == [2 * h for _, h in sample.atoms]
        assert all(0.1 <= h <= 1.0 for _, h in sample.atoms)
        assert sample.seed == 3

    def test_reproducible(self):
        assert sample_cpp(1.0, 0.1, brownian_intensity(), seed=9) == sample_cpp(1.0, 0.1, brownian_intensity(), seed=9)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            sample_cpp(1.0, 2.0, brownian_intensity(), seed=1)
        with pytest.raises(DomainError):
            sample_cpp(1.0, 0.0, brownian_intensity(), seed=1)

    def test_cutoff_equal_to_height(self):
        rng = np.random.default_rng(0)
        assert all(len(sample_cpp(1.0, 1.0, brownian_intensity(), rng)[1].atoms) == 0 for _ in range(100))

    @pytest.mark.parametrize("T, epsilon", [(1.0, 0.1), (2.0, 0.5)])
    def test_atom_count_is_geometric(self, T, epsilon):
        trials = 10_000
        rng = np.random.default_rng(31)
        counts = np.array([len(sample_cpp(T, epsilon, brownian_intensity(), rng)[1].atoms) for _ in range(trials)])
        success = epsilon / T
        mean = 1 / success - 1
        standard_error = np.sqrt((1 - success) / success**2 / trials)
        assert abs(counts.mean() - mean) < 3 * standard_error

    def test_retained_heights_follow_conditional_law(self):
        T, epsilon = 1.0, 0.1
        rng = np.random.default_rng(37)
        heights = []
        while len(heights) < 5000:
            heights.extend(h for _, h in sample_cpp(T, epsilon, brownian_intensity(), rng)[1].atoms)

        def conditional_cdf(x):
            return (1 / epsilon - 1 / np.asarray(x)) / (1 / epsilon - 1 / T)

        assert stats.kstest(heights, conditional_cdf).pvalue > 0.01

    def test_sampled_comb_is_ultrametric(self):
        comb, _ = sample_cpp(1.0, 0.1, brownian_intensity(), seed=41)
        points = [CombPoint(x) for x in comb.gap_representatives()] + [CombPoint.left(x) for x in comb.positions]
        assert verify_ultrametric(comb, points)

    def test_sample_validation(self):
        with pytest.raises(DomainError):
            PointProcessSample(T=1.0, epsilon=0.1, atoms=((0.5, 0.3),), terminal=(1.0, 0.9))
        with pytest.raises(DomainError):
            PointProcessSample(T=1.0, epsilon=0.1, atoms=((0.5, 0.05),), terminal=(1.0, 2.0))


class TestSplittingDepths:
    def test_shape(self):
        comb = sample_splitting_depths(1.0, 1.0, exponential_lifetime(1.0), 25, seed=4)
        assert comb.positions == [float(k) for k in range(1, 26)]
        assert all(0 < h <= 2.0 for h in comb.heights)

    def test_reproducible(self):
        law = exponential_lifetime(2.0)
        assert sample_splitting_depths(1.0, 1.0, law, 10, seed=8) == sample_splitting_depths(1.0, 1.0, law, 10, seed=8)

    def test_independent_depths(self):
        heights = np.array(sample_splitting_depths(1.0, 1.0, exponential_lifetime(1.0), 10_000, seed=12).heights)
        correlation = np.corrcoef(heights[:-1], heights[1:])[0, 1]
        assert abs(correlation) < 3 / np.sqrt(len(heights) - 1)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            sample_splitting_depths(1.0, 0.0, exponential_lifetime(1.0), 3, seed=1)
        with pytest.raises(DomainError):
            exponential_lifetime(0.0)


class TestSeeds:
    def test_spawned_seeds(self):
        first = [sample_kingman_comb(10, seed) for seed in spawn_seeds(5, 3)]
        again = [sample_kingman_comb(10, seed) for seed in spawn_seeds(5, 3)]
        assert first == again
        assert first[0] != first[1]
