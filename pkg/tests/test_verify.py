import math

import numpy as np
import pytest

from minkpack import (
    BernoulliMeasure,
    CoordinateScaling,
    ValidationError,
    WordBijection,
    bilipschitz_transport_check,
    coarse_multifractal_spectrum,
    doubling_measure_check,
    measure_of_set,
    minkowski_ratio_report,
    natural_beta,
    natural_measure,
    partition_criterion_check,
    solve_beta_sequence,
    uniform_measure,
)

LOG23 = math.log(2) / math.log(3)
DELTAS37 = [3.0 ** (-k) for k in range(3, 8)]


@pytest.fixture(scope="module")
def cantor_report(cantor):
    mu = natural_measure(cantor)
    return minkowski_ratio_report(cantor, mu, LOG23, [0.2, 0.05], DELTAS37)


class TestRatioReport:
    def test_rows_internally_consistent(self, cantor_report):
        for r in cantor_report.rows:
            assert r.ratio == r.packing_count * r.delta**cantor_report.beta / r.measure

    def test_cantor_bounded_spread(self, cantor_report):
        assert cantor_report.m_hat <= 4.0
        assert not cantor_report.divergent

    def test_row_count_components_times_deltas(self, cantor_report):
        # eps=0.2: 2 components, deltas 3^-3..3^-7; eps=0.05: 4 components, 3^-4..3^-7
        by_eps = {}
        for r in cantor_report.rows:
            by_eps.setdefault(r.epsilon, set()).add((r.component_id, r.delta))
        assert len(by_eps[0.2]) == 2 * 5
        assert len(by_eps[0.05]) == 4 * 4

    def test_mcmullen_bounded(self, mcmullen):
        mu = natural_measure(mcmullen)
        beta = natural_beta(mcmullen)
        report = minkowski_ratio_report(
            mcmullen, mu, beta, [0.2, 0.05], [3.0 ** (-k) for k in range(3, 7)]
        )
        assert report.m_hat < 10
        assert abs(report.last3_log_growth) < 0.1
        assert not report.divergent

    def test_kenyon_flagged_divergent(self, kenyon):
        mu = natural_measure(kenyon)
        report = minkowski_ratio_report(kenyon, mu, 1.0, [0.2, 0.05], DELTAS37)
        assert report.divergent
        # spread grows monotonically: no stabilization at desk scale
        m_values = [m for _, m in report.per_delta_m_hat]
        assert all(b > a for a, b in zip(m_values, m_values[1:]))

    def test_zero_measure_component_rejected(self, cantor):
        with pytest.raises(ValidationError, match="zero-measure"):
            minkowski_ratio_report(cantor, lambda s: 0.0, LOG23, [0.2], [3.0**-3])

    def test_no_admissible_delta_rejected(self, cantor):
        with pytest.raises(ValidationError):
            minkowski_ratio_report(cantor, natural_measure(cantor), LOG23, [0.2], [0.2])

    def test_csv_shape(self, cantor_report):
        text = cantor_report.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "component_id,epsilon,delta,packing_count,measure,ratio"
        assert lines[-1].startswith("divergent_flag,")
        assert f"beta,{LOG23!r}" in lines

    def test_rescaled_measure_scales_ratios(self, cantor, cantor_report):
        c = 3.0
        mu = natural_measure(cantor)
        nu = lambda mset: c * measure_of_set(mu, mset)
        scaled = minkowski_ratio_report(cantor, nu, LOG23, [0.2, 0.05], DELTAS37)
        for a, b in zip(cantor_report.rows, scaled.rows):
            assert b.ratio == pytest.approx(a.ratio / c, rel=1e-12)
        assert scaled.m_hat <= max(c, 1 / c) * cantor_report.m_hat + 1e-12


class TestCriterion:
    def test_cantor_ranks(self, cantor):
        mu = natural_measure(cantor)
        report = partition_criterion_check(cantor, mu, LOG23, [1, 2, 3], DELTAS37)
        for rank, m_hat in report.per_rank_m_hat.items():
            assert m_hat <= 4.0
        assert report.m_hat <= 4.0
        assert set(report.per_rank_m_hat) == {1, 2, 3}

    def test_mcmullen_ranks(self, mcmullen):
        mu = natural_measure(mcmullen)
        beta = natural_beta(mcmullen)
        report = partition_criterion_check(
            mcmullen, mu, beta, [1, 2], [3.0 ** (-k) for k in range(2, 6)]
        )
        assert report.m_hat < 20
        assert report.sizes[2] < report.sizes[1]

    def test_single_rank(self, cantor):
        mu = natural_measure(cantor)
        report = partition_criterion_check(cantor, mu, LOG23, [2], DELTAS37)
        assert set(report.per_rank_m_hat) == {2}

    def test_symbolic_ranks(self, symbolic_mcm):
        mu = uniform_measure(symbolic_mcm)
        beta = natural_beta(symbolic_mcm)
        report = partition_criterion_check(
            symbolic_mcm, mu, beta, [1, 2], [3.0 ** (-k) for k in range(2, 6)]
        )
        assert report.m_hat < 10


class TestTransport:
    def test_identity_scaling_bit_identical(self, cantor):
        mu = natural_measure(cantor)
        report = bilipschitz_transport_check(
            cantor, mu, CoordinateScaling(factors=(1.0,)), [0.2, 0.05], DELTAS37
        )
        assert report.source.to_csv() == report.target.to_csv()
        assert report.m_hat_ratio == 1.0
        assert report.slope_gap == 0.0

    def test_halving_scale_on_dust(self, dust2d):
        mu = natural_measure(dust2d)
        deltas = [4.0 ** (-k) for k in range(2, 7)]
        report = bilipschitz_transport_check(
            dust2d, mu, CoordinateScaling(factors=(1.0, 0.5)), [0.2, 0.05], deltas
        )
        assert report.m_hat_ratio <= 9.0
        assert report.slope_gap <= 0.05

    def test_digit_permutation_isometry(self, symbolic_mcm):
        mu = uniform_measure(symbolic_mcm)
        perm = WordBijection.from_digit_permutation(
            {(0, 0): (2, 0), (2, 0): (0, 0), (1, 1): (1, 1)}
        )
        report = bilipschitz_transport_check(
            symbolic_mcm, mu, perm, [0.3, 0.04], [3.0 ** (-k) for k in range(1, 6)]
        )
        assert report.source.to_csv() == report.target.to_csv()

    def test_unsupported_map_rejected(self, cantor):
        with pytest.raises(ValidationError, match="unsupported map class"):
            bilipschitz_transport_check(
                cantor, natural_measure(cantor), object(), [0.2], DELTAS37
            )

    def test_scaling_on_symbolic_rejected(self, symbolic_mcm):
        with pytest.raises(ValidationError):
            bilipschitz_transport_check(
                symbolic_mcm,
                uniform_measure(symbolic_mcm),
                CoordinateScaling(factors=(1.0, 1.0)),
                [0.3],
                [3.0**-2],
            )


class TestSpectrum:
    def test_uniform_symbolic_single_bin(self, symbolic_mcm):
        mu = uniform_measure(symbolic_mcm)
        est = coarse_multifractal_spectrum(symbolic_mcm, mu, rank=4)
        assert len(est.histogram) == 1
        assert est.total == 3**4

    def test_cantor_natural_single_bin(self, cantor):
        est = coarse_multifractal_spectrum(cantor, natural_measure(cantor), rank=8)
        assert len(est.histogram) == 1
        edge = est.histogram[0][0]
        assert edge <= LOG23 < edge + est.bin_width

    def test_skewed_weights_span(self, cantor):
        mu = BernoulliMeasure(weights={0: 0.25, 1: 0.75})
        est = coarse_multifractal_spectrum(cantor, mu, rank=8)
        lo = math.log(0.75) / math.log(1 / 3)
        hi = math.log(0.25) / math.log(1 / 3)
        edges = [edge for edge, _ in est.histogram]
        assert edges[0] <= lo + 0.06
        assert edges[-1] + est.bin_width >= hi - 0.06
        assert est.total == 2**8

    def test_counts_sum_exactly(self, mcmullen):
        mu = natural_measure(mcmullen)
        est = coarse_multifractal_spectrum(mcmullen, mu, rank=6)
        assert sum(c for _, c in est.histogram) == 3**6


class TestDoubling:
    def test_cantor_natural_bounded(self, cantor):
        mu = natural_measure(cantor)
        report = doubling_measure_check(cantor, mu, [3.0 ** (-k) for k in range(2, 6)])
        assert report.max_ratio <= 4.0

    def test_uniform_symbolic_bounded_by_n_squared(self, symbolic_mcm):
        mu = uniform_measure(symbolic_mcm)
        report = doubling_measure_check(symbolic_mcm, mu, [3.0 ** (-k) for k in range(1, 5)])
        assert report.max_ratio <= len(symbolic_mcm.digits) ** 2

    def test_rows_have_positive_measures(self, cantor):
        report = doubling_measure_check(cantor, natural_measure(cantor), [0.05], centers=8)
        for row in report.rows:
            assert row.mu_ball > 0
            assert row.mu_double >= row.mu_ball


class TestNaturalBeta:
    def test_dispatch(self, cantor, mcmullen, symbolic_mcm):
        assert natural_beta(cantor) == pytest.approx(LOG23, abs=1e-11)
        assert natural_beta(mcmullen) == pytest.approx(1 + math.log(1.5) / math.log(3), abs=1e-9)
        assert natural_beta(symbolic_mcm) == pytest.approx(
            1 + math.log(1.5) / math.log(3), abs=1e-12
        )
