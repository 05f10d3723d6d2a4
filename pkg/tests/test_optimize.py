"""Divisor sweeps, scaling schedules, and growth-exponent fits."""

import math

import pytest

from gossip_age import (PreconditionError, RateConfig, Topology, divisors,
                        fit_scaling_exponent, scaling_samples,
                        scaling_schedule, sweep_cluster_sizes)

UNIT = RateConfig(1, 1, 1, 1)


class TestDivisors:
    def test_known_list(self):
        assert divisors(120) == [1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 24, 30, 40, 60, 120]

    def test_one(self):
        assert divisors(1) == [1]

    def test_nonpositive_rejected(self):
        with pytest.raises(PreconditionError):
            divisors(0)


class TestSweep:
    def test_unit_rates_optima(self):
        assert sweep_cluster_sizes(120, UNIT, Topology.FULLY_CONNECTED).argmin_set == {120}
        assert sweep_cluster_sizes(120, UNIT, Topology.BI_RING).argmin_set == {30}
        disc = sweep_cluster_sizes(120, UNIT, Topology.DISCONNECTED)
        assert disc.argmin_set == {10, 12}
        assert disc.min_age == pytest.approx(22.0, rel=1e-15)

    def test_points_cover_every_divisor_pair(self):
        sweep = sweep_cluster_sizes(36, UNIT, Topology.BI_RING)
        assert [p.k for p in sweep.points] == divisors(36)
        assert all(p.m * p.k == 36 for p in sweep.points)

    def test_disconnected_curve_equals_two_hop_formula_exactly(self):
        rates = RateConfig(1, 10, 2, 1)
        sweep = sweep_cluster_sizes(60, rates, Topology.DISCONNECTED)
        for point in sweep.points:
            assert point.node_age == point.m * 1 / 10 + point.k * 1 / 2

    @pytest.mark.parametrize("topology", [Topology.DISCONNECTED, Topology.BI_RING,
                                          Topology.FULLY_CONNECTED])
    def test_argmin_invariant_under_common_rate_scaling(self, topology):
        base = sweep_cluster_sizes(60, UNIT, topology)
        scaled = sweep_cluster_sizes(60, UNIT.scaled(3.7), topology)
        assert base.argmin_set == scaled.argmin_set

    def test_uni_and_bi_ring_sweeps_agree(self):
        uni = sweep_cluster_sizes(24, UNIT, Topology.UNI_RING)
        bi = sweep_cluster_sizes(24, UNIT, Topology.BI_RING)
        for a, b in zip(uni.points, bi.points):
            assert a.node_age == pytest.approx(b.node_age, rel=1e-12)

    def test_custom_rejected(self):
        with pytest.raises(PreconditionError, match="custom"):
            sweep_cluster_sizes(12, UNIT, Topology.CUSTOM)


class TestScalingSchedule:
    def test_disconnected_square_root_split(self):
        assert scaling_schedule(Topology.DISCONNECTED, 100) == (10, 10)

    def test_ring_cube_root_split(self):
        assert scaling_schedule(Topology.BI_RING, 1000) == (10, 100)

    def test_fully_connected_log_split(self):
        # ln 1024 = 6.93 snaps to divisor 8 in log distance
        assert scaling_schedule(Topology.FULLY_CONNECTED, 1024) == (8, 128)

    def test_log_space_tie_breaks_to_smaller_divisor(self):
        # sqrt(1000) = 31.6 sits exactly between divisors 25 and 40 in log space
        assert scaling_schedule(Topology.DISCONNECTED, 1000) == (25, 40)

    def test_n1_rejected(self):
        with pytest.raises(PreconditionError):
            scaling_schedule(Topology.DISCONNECTED, 1)

    def test_custom_rejected(self):
        with pytest.raises(PreconditionError):
            scaling_schedule(Topology.CUSTOM, 100)

    def test_samples_use_exact_engine(self):
        samples = scaling_samples(Topology.DISCONNECTED, UNIT, [100, 10_000])
        assert samples == [(100, 20.0), (10_000, 200.0)]


class TestFitScalingExponent:
    def test_disconnected_schedule_slope_half(self):
        samples = scaling_samples(Topology.DISCONNECTED, UNIT,
                                  [10**2, 10**3, 10**4, 10**5, 10**6])
        fit = fit_scaling_exponent(samples)
        assert fit.exponent == pytest.approx(0.5, abs=0.005)
        assert fit.model == "power"

    def test_ring_schedule_slope_near_cube_root(self):
        samples = scaling_samples(Topology.BI_RING, UNIT, [10**3, 10**4, 10**5, 10**6])
        fit = fit_scaling_exponent(samples)
        assert 0.30 <= fit.exponent <= 0.37

    def test_constant_samples_fit_flat(self):
        fit = fit_scaling_exponent([(10, 3.0), (100, 3.0), (1000, 3.0), (10000, 3.0)])
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0

    def test_log_model_recovers_synthetic_slope(self):
        samples = [(n, 2.0 + 3.0 * math.log(n)) for n in (10, 100, 1000, 10000)]
        fit = fit_scaling_exponent(samples, model="log")
        assert fit.exponent == pytest.approx(3.0, rel=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.model == "log"

    def test_deterministic(self):
        samples = scaling_samples(Topology.DISCONNECTED, UNIT, [100, 1000, 10000, 100000])
        assert fit_scaling_exponent(samples) == fit_scaling_exponent(samples)

    def test_too_few_samples_rejected(self):
        with pytest.raises(PreconditionError, match=">= 4"):
            fit_scaling_exponent([(10, 1.0), (100, 2.0), (1000, 3.0)])

    def test_nonpositive_age_rejected(self):
        with pytest.raises(PreconditionError, match="positive"):
            fit_scaling_exponent([(10, 1.0), (100, 0.0), (1000, 3.0), (10000, 4.0)])

    def test_narrow_span_rejected(self):
        with pytest.raises(PreconditionError, match="decades"):
            fit_scaling_exponent([(10, 1.0), (20, 2.0), (40, 3.0), (80, 4.0)])

    def test_unknown_model_rejected(self):
        with pytest.raises(PreconditionError, match="model"):
            fit_scaling_exponent([(10, 1.0), (100, 2.0), (1000, 3.0), (10000, 4.0)],
                                 model="cubic")
