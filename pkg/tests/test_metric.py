import numpy as np
import pytest

from minkpack import (
    BudgetExceededError,
    CoordinateScaling,
    ValidationError,
    depth_for_delta,
    epsilon_components,
    greedy_packing,
    hausdorff_distance,
    max_packing_exhaustive,
    minkowski_content_estimate,
    pillar,
    sample_attractor,
)
from conftest import chain_component_labels, scan_greedy_oracle


class TestSampleAttractor:
    def test_cantor_depth_one(self, cantor):
        cloud = sample_attractor(cantor, 1)
        assert np.allclose(sorted(cloud.points.ravel()), [1 / 6, 5 / 6])

    def test_depth_zero_center(self, mcmullen):
        cloud = sample_attractor(mcmullen, 0)
        assert cloud.points.shape == (1, 2)
        assert np.allclose(cloud.points[0], [0.5, 0.5])

    def test_mcmullen_depth_two_points_inside_pillars(self, mcmullen):
        cloud = sample_attractor(mcmullen, 2)
        assert len(cloud) == 9
        for i in range(len(cloud)):
            box = pillar(mcmullen, cloud.word_at(i)).box
            for (lo, hi), x in zip(box, cloud.points[i]):
                assert float(lo) <= x <= float(hi)

    def test_budget(self, mcmullen):
        with pytest.raises(BudgetExceededError):
            sample_attractor(mcmullen, 10, budget=100)

    def test_lexicographic_order(self, cantor):
        cloud = sample_attractor(cantor, 3)
        as_tuples = [tuple(w) for w in cloud.words]
        assert as_tuples == sorted(as_tuples)


class TestGreedyPacking:
    def test_three_point_line(self):
        result = greedy_packing([0.0, 1.0, 2.0], 0.6)
        assert result.count == 2
        assert list(result.centers) == [0, 2]

    def test_single_point(self):
        assert greedy_packing([0.3], 0.9).count == 1

    def test_cantor_rank_four_structure(self, cantor):
        cloud = sample_attractor(cantor, 8)
        result = greedy_packing(cloud, 3.0**-4)
        assert result.count == 16

    def test_errors(self):
        with pytest.raises(ValidationError):
            greedy_packing(np.empty((0, 2)), 0.1)
        with pytest.raises(ValidationError):
            greedy_packing([0.0, 1.0], 0.0)

    def test_matches_scan_oracle(self, cantor):
        rng = np.random.default_rng(11)
        pts = rng.random((120, 2))
        for delta in (0.01, 0.03, 0.08):
            got = greedy_packing(pts, delta)
            assert list(got.centers) == scan_greedy_oracle(pts, delta)

    def test_packing_validity(self, mcmullen):
        cloud = sample_attractor(mcmullen, 6)
        for delta in (0.05, 0.02, 0.008):
            result = greedy_packing(cloud, delta)
            sel = cloud.points[result.centers]
            gaps = np.sqrt(((sel[:, None, :] - sel[None, :, :]) ** 2).sum(-1))
            np.fill_diagonal(gaps, np.inf)
            assert gaps.min() > 2 * delta

    def test_monotone_in_delta(self, cantor):
        cloud = sample_attractor(cantor, 9)
        counts = [greedy_packing(cloud, 3.0 ** (-k)).count for k in range(2, 7)]
        assert counts == sorted(counts)

    def test_separated_additivity(self):
        delta = 0.05
        a = np.linspace(0.0, 0.4, 13).reshape(-1, 1)
        b = a + 5.0  # mutual distance far beyond 4*delta
        ca = greedy_packing(a, delta).count
        cb = greedy_packing(b, delta).count
        cu = greedy_packing(np.vstack([a, b]), delta).count
        assert cu == ca + cb

    def test_max_norm_metric(self):
        pts = np.array([[0.0, 0.0], [0.3, 0.0], [0.0, 0.45]])
        assert greedy_packing(pts, 0.2, metric="max").count == 2
        assert greedy_packing(pts, 0.2, metric="euclidean").count == 2
        assert greedy_packing(pts, 0.14, metric="max").count == 3


class TestExhaustiveOracle:
    def test_greedy_within_factor_two_random(self):
        rng = np.random.default_rng(20240817)
        for _ in range(10):
            pts = rng.random((18, 2))
            delta = float(rng.uniform(0.05, 0.2))
            best = max_packing_exhaustive(pts, delta)
            got = greedy_packing(pts, delta).count
            assert got >= best / 2
            assert got <= best

    def test_greedy_attains_max_on_cantor_gaps(self, cantor):
        for depth in (2, 3, 4):
            cloud = sample_attractor(cantor, depth)
            for k in range(1, depth + 1):
                delta = 3.0 ** (-k)
                best = max_packing_exhaustive(cloud.points, delta)
                assert greedy_packing(cloud, delta).count == best

    def test_size_guard(self):
        with pytest.raises(ValidationError):
            max_packing_exhaustive(np.zeros((65, 1)), 0.1)


class TestEpsilonComponents:
    def test_cantor_two_rank_one_classes(self, cantor):
        part = epsilon_components(cantor, 0.2, depth=5)
        assert len(part.classes) == 2
        first = {w.letters for w in part.classes[0].words}
        assert all(w[0] == 0 for w in first)

    def test_whole_space_single_class(self, cantor):
        part = epsilon_components(cantor, 2.0, depth=4)
        assert len(part.classes) == 1

    def test_tiling_system_single_class(self, fullgrid):
        for eps in (0.05, 0.3):
            part = epsilon_components(fullgrid, eps)
            assert len(part.classes) == 1

    def test_depth_too_shallow(self, cantor):
        with pytest.raises(ValidationError):
            epsilon_components(cantor, 0.01, depth=2)

    @pytest.mark.parametrize("eps", [0.05, 0.12, 0.2, 0.4])
    def test_matches_chain_oracle_depth_eight(self, cantor, eps):
        cloud = sample_attractor(cantor, 8)
        part = epsilon_components(cantor, eps, depth=8)
        oracle = chain_component_labels(cloud.points, eps)
        assert list(part.labels) == oracle

    def test_cylinder_band_structure(self, cantor):
        # one class per rank-2 cylinder when eps sits between gap scales
        part = epsilon_components(cantor, 0.05, depth=8)
        assert len(part.classes) == 4


class TestLipschitzComparability:
    def test_scaled_counts_within_factor(self, dust2d):
        scaling = CoordinateScaling(factors=(1.0, 0.5))
        cloud = sample_attractor(dust2d, 6)
        scaled = scaling.apply_points(cloud.points)
        bound = (3 * 2) ** 2
        for k in range(2, 6):
            delta = 4.0 ** (-k)
            c_src = greedy_packing(cloud, delta).count
            c_tgt = greedy_packing(scaled, delta).count
            ratio = max(c_src / c_tgt, c_tgt / c_src)
            assert ratio <= bound


class TestHausdorff:
    def test_identical_sets(self):
        assert hausdorff_distance([0.0, 0.5], [0.0, 0.5]) == 0.0

    def test_singletons(self):
        assert hausdorff_distance([0.0], [1.0]) == pytest.approx(1.0)

    def test_asymmetric_sets(self):
        assert hausdorff_distance([0.0, 1.0], [0.0]) == pytest.approx(1.0)

    def test_max_metric_planar(self):
        a = np.array([[0.0, 0.0]])
        b = np.array([[0.3, 0.7]])
        assert hausdorff_distance(a, b, metric="max") == pytest.approx(0.7)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            hausdorff_distance([], [0.0])


class TestMinkowskiContent:
    def test_dense_interval(self):
        pts = np.linspace(0.0, 1.0, 2001)
        value = minkowski_content_estimate(pts, 0.1, 0.01)
        assert value == pytest.approx(12.0, abs=0.3)

    def test_single_point(self):
        value = minkowski_content_estimate([0.5], 0.1, 0.01)
        assert value == pytest.approx(2.0, abs=0.1)

    def test_cantor_comparable_to_packing(self, cantor):
        cloud = sample_attractor(cantor, 10)
        for k in (3, 4, 5):
            delta = 3.0 ** (-k)
            content = minkowski_content_estimate(cloud, delta, delta / 8)
            pack = greedy_packing(
                sample_attractor(cantor, depth_for_delta(cantor, delta)), delta
            ).count
            assert content / pack <= 8 and pack / content <= 8

    def test_step_guard(self):
        with pytest.raises(ValidationError):
            minkowski_content_estimate([0.5], 0.1, 0.05)


class TestDepthRule:
    def test_rule_bounds_diameter(self, mcmullen):
        for delta in (0.1, 0.01, 0.004):
            depth = depth_for_delta(mcmullen, delta)
            assert mcmullen.max_pillar_diameter(depth) <= delta / 4
            assert mcmullen.max_pillar_diameter(depth - 1) > delta / 4

    def test_budget_propagates(self, mcmullen):
        with pytest.raises(BudgetExceededError):
            depth_for_delta(mcmullen, 1e-6, budget=1000)
