import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats

from combs.comb import CombPoint, Face, comb_distance
from combs.errors import DomainError, EmptySphereError
from spaces.coalescent import exponential_lifetime
from spaces.contour import (
    Contour,
    excursions_below,
    four_points_check,
    sample_reflected_cpp_contour,
    sphere_comb,
    sphere_image,
    tree_distance,
    visit_components,
)

from strategies import hand_contour, rational_contours, tent_contour

LEVEL_TOLERANCE = 1e-12


def visit_times(excursions):
    return [t for component in excursions.components for t in component]


def sphere_mismatches(h, level):
    comb, excursions, local_time = sphere_comb(h, level)
    clamped = h.clamp(level)
    mismatches = 0
    for s, t in itertools.combinations(visit_times(excursions), 2):
        a = sphere_image(excursions, local_time, s)
        b = sphere_image(excursions, local_time, t)
        if abs(comb_distance(comb, a, b) - tree_distance(clamped, s, t)) > LEVEL_TOLERANCE:
            mismatches += 1
    return mismatches


class TestContour:
    def test_validation(self):
        with pytest.raises(DomainError):
            Contour(())
        with pytest.raises(DomainError):
            Contour(((0, 1, 1), (1, 0, 0)))
        with pytest.raises(DomainError):
            Contour(((0, 0, 0), (1, 2, 1), (2, 0, 0)))
        with pytest.raises(DomainError):
            Contour(((0, 0, 0), (1, 1, 1)))
        with pytest.raises(DomainError):
            Contour(((0, 0, 0), (0, 0, 0)))

    def test_value_at(self):
        h = hand_contour()
        assert h.value_at(2) == 2
        assert h.value_at(9) == 2
        assert h.value_at(Fraction(11, 2)) == Fraction(3, 2)
        with pytest.raises(DomainError):
            h.value_at(11)

    def test_infimum_with_jump(self):
        h = Contour(((0, 0, 0), (1, 1, 3), (2, 2, 2), (4, 0, 0)))
        assert h.infimum(0.5, 1.5) == 0.5
        assert h.infimum(1, 2) == 2
        assert h.infimum(Fraction(1, 2), 3) == Fraction(1, 2)

    def test_clamp_inserts_crossings(self):
        clamped = hand_contour().clamp(2)
        assert clamped.times == [0, 2, 3, 4, 5, 6, 8, 9, 10]
        assert max(value for _, _, value in clamped.breakpoints) == 2


class TestTreeDistance:
    def test_hand_example(self):
        assert tree_distance(hand_contour(), 2, 9) == 2

    def test_tent_identifies_legs(self):
        assert tree_distance(tent_contour(2), 1, 3) == 0

    def test_same_time(self):
        assert tree_distance(hand_contour(), 4, 4) == 0

    def test_four_points(self):
        h = hand_contour()
        times = [1, 4, 6, 9]
        d = [[tree_distance(h, s, t) for t in times] for s in times]
        assert four_points_check(d)
        assert four_points_check(np.zeros((4, 4)))
        broken = np.ones((4, 4)) - np.eye(4)
        broken[0, 1] = broken[1, 0] = broken[2, 3] = broken[3, 2] = 10
        assert not four_points_check(broken)


class TestSphere:
    def test_visit_components(self):
        assert visit_components(hand_contour(), 2) == [(2, 4), (6, 9)]

    def test_excursions(self):
        excursions = excursions_below(hand_contour(), 2)
        assert len(excursions.excursions) == 1
        excursion = excursions.excursions[0]
        assert (excursion.g, excursion.d, excursion.depth) == (4, 6, 2)
        assert excursions.component_of(3) == 0
        assert excursions.component_of(7) == 1
        with pytest.raises(DomainError):
            excursions.component_of(5)

    def test_hand_sphere(self):
        comb, excursions, local_time = sphere_comb(hand_contour(), 2)
        assert comb.teeth == ((Fraction(1, 2), 2),)
        left = sphere_image(excursions, local_time, 3)
        right = sphere_image(excursions, local_time, 7)
        assert left == CombPoint(Fraction(1, 2), Face.LEFT)
        assert right == CombPoint(Fraction(1, 2), Face.RIGHT)
        assert comb_distance(comb, left, right) == 2 == tree_distance(hand_contour(), 2, 9)

    def test_cutoff_drops_teeth(self):
        comb, _, _ = sphere_comb(hand_contour(), 2, epsilon=2)
        assert len(comb) == 0

    def test_single_point_sphere(self):
        comb, excursions, local_time = sphere_comb(tent_contour(2), 2)
        assert len(comb) == 0
        assert sphere_image(excursions, local_time, 2) == CombPoint(0, Face.INTERIOR)

    def test_empty_sphere(self):
        with pytest.raises(EmptySphereError):
            sphere_comb(hand_contour(), 5)
        with pytest.raises(DomainError):
            sphere_comb(hand_contour(), 0)
        with pytest.raises(DomainError):
            sphere_comb(hand_contour(), 2, epsilon=-1)

    def test_exact_isometry(self):
        assert sphere_mismatches(hand_contour(), 2) == 0
        assert sphere_mismatches(hand_contour(), Fraction(3, 2)) == 0

    def test_sampled_isometry(self):
        rng = np.random.default_rng(99)
        law = exponential_lifetime(1.0)
        for _ in range(500):
            h = sample_reflected_cpp_contour(1.0, 1.5, law, rng)
            assert sphere_mismatches(h, 1.0) == 0


class TestReflectedContour:
    def test_zero_jump_rate(self):
        h = sample_reflected_cpp_contour(1.0, 0.0, exponential_lifetime(1.0), seed=1)
        assert h.breakpoints == ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))
        comb, _, _ = sphere_comb(h, 1.0)
        assert len(comb) == 0

    def test_reproducible(self):
        law = exponential_lifetime(1.0)
        assert sample_reflected_cpp_contour(1.0, 1.0, law, seed=5) == sample_reflected_cpp_contour(1.0, 1.0, law, seed=5)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            sample_reflected_cpp_contour(0.0, 1.0, exponential_lifetime(1.0), seed=1)
        with pytest.raises(DomainError):
            sample_reflected_cpp_contour(1.0, -1.0, exponential_lifetime(1.0), seed=1)

    def test_deterministic_jumps(self):
        """Jumps of size T reflect straight back, so each depth is twice a drift time below T."""
        level = 1.0
        rng = np.random.default_rng(21)
        waits = []
        for _ in range(2000):
            h = sample_reflected_cpp_contour(level, 1.0, lambda rng: level, rng)
            for excursion in excursions_below(h, level).excursions:
                assert excursion.depth == pytest.approx(2 * (excursion.d - excursion.g))
                waits.append(excursion.d - excursion.g)
        assert all(wait < level for wait in waits)
        assert stats.kstest(waits, stats.truncexpon(b=level).cdf).pvalue > 0.01


class TestContourProperties:
    """Property tests for tree distances"""

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=500, deadline=None)
    def test_four_point_condition(self, seed):
        """Property: tree distances on random quadruples satisfy the four-point condition."""
        rng = np.random.default_rng(seed)
        h = sample_reflected_cpp_contour(1.0, 2.0, exponential_lifetime(1.0), rng)
        for _ in range(20):
            times = rng.uniform(float(h.start), float(h.end), size=4)
            d = [[tree_distance(h, s, t) for t in times] for s in times]
            assert four_points_check(d, 1e-9)

    @given(st.lists(st.fractions(min_value=0, max_value=10, max_denominator=8), min_size=4, max_size=4))
    @settings(max_examples=500)
    def test_four_point_condition_exact(self, times):
        """Property: on the hand contour the four-point condition holds without tolerance."""
        h = hand_contour()
        d = [[tree_distance(h, s, t) for t in times] for s in times]
        assert four_points_check(d)

    @given(rational_contours(), st.data())
    @settings(max_examples=500)
    def test_four_point_condition_rational(self, h, data):
        """Property: exact four-point condition on random rational contours with jumps."""
        instants = st.fractions(min_value=h.start, max_value=h.end, max_denominator=6)
        times = [data.draw(instants) for _ in range(4)]
        d = [[tree_distance(h, s, t) for t in times] for s in times]
        assert four_points_check(d)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=200, deadline=None)
    def test_sphere_is_ultrametric(self, seed):
        """Property: between visits of the level, tree distances satisfy the strong triangle inequality."""
        h = sample_reflected_cpp_contour(1.0, 1.0, exponential_lifetime(1.0), seed)
        times = visit_times(excursions_below(h, 1.0))[:12]
        for r, s, t in itertools.permutations(times, 3):
            assert tree_distance(h, r, t) <= max(tree_distance(h, r, s), tree_distance(h, s, t)) + LEVEL_TOLERANCE

    @given(st.integers(min_value=0, max_value=10_000), st.sampled_from([0.25, 0.5, 0.75, 1.0]))
    @settings(max_examples=200, deadline=None)
    def test_sphere_ignores_heights_above_level(self, seed, level):
        """Property: the sphere of h and the sphere of min(h, T) give the same comb."""
        h = sample_reflected_cpp_contour(1.0, 2.0, exponential_lifetime(1.0), seed)
        assert sphere_comb(h, level) == sphere_comb(h.clamp(level), level)

    @given(rational_contours(), st.fractions(min_value=0, max_value=1, max_denominator=5))
    @settings(max_examples=300)
    def test_sphere_ignores_heights_above_level_exact(self, h, fraction):
        """Property: clamping a rational contour at T leaves its sphere of radius T unchanged."""
        assume(h.maximum > 0 and fraction > 0)
        level = h.maximum * fraction
        assert sphere_comb(h, level) == sphere_comb(h.clamp(level), level)
