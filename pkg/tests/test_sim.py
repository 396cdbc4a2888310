# -*- coding: utf-8 -*-
"""fork-join 抽样器"""

import math

import numpy as np
import pytest

from core.dist import Deterministic, Empirical, Exponential, Gamma, HyperExponential, Uniform
from core.errors import InvalidParameter, Unstable
from core.lundberg import LundbergSolution
from core.rng import make_stream, substream
from core.sim import (Censored, ForkJoinConfig, Horizon, SampleSet, ServerClass, Statistic, class_sizes,
                      config_digest, count_arrivals, default_horizon, sample_hitting_time,
                      sample_max_queue_direct, sample_max_queue_little, sample_max_wait_lindley,
                      sample_max_wait_sup, sample_window_maxima, window_max_wait)
from defaults.sim_default import SimConfig


# 每个分布族各出现在服务与到达两侧，均满足 E[S] < E[A]
FAMILY_PAIRS = [
    (Deterministic(0.7), Exponential(1.0)),
    (Exponential(2.0), Deterministic(1.0)),
    (Gamma(2.0, 4.0), Uniform(0.8, 1.6)),
    (Uniform(0.2, 1.0), Gamma(2.0, 1.5)),
    (HyperExponential([0.5, 0.5], [0.6, 20.0]), Exponential(1.0)),
    (Exponential(2.0), HyperExponential([0.5, 0.5], [0.8, 2.0])),
    (Empirical([0.2, 1.0, 2.5, 0.0]), Exponential(1.0)),
    (Exponential(2.0), Empirical([0.5, 1.0, 2.0])),
]


def _pair_id(pair) -> str:
    return f"{pair[0].family.value}-{pair[1].family.value}"


def _single_group_blocks(config: ForkJoinConfig, steps: int, streams):
    """单类别且 N 不超过组宽时，一次抽出整条路径的到达与服务"""
    arrivals = config.arrival.sample_array(streams.arrivals, steps)
    services = config.classes[0].service.sample_array(streams.service_group(0, 0), (steps, streams.group_width))
    return arrivals, services[:, :config.n_servers]


def _with_c_hat(c_hat: float) -> LundbergSolution:
    return LundbergSolution(gamma=1.0, lambda_prime_at_gamma=1.0 / c_hat, lambda_double_prime_at_gamma=1.0,
                            c_hat=c_hat, theta_sup=math.inf, interior=True)


class TestForkJoinConfig:

    def test_sizes_must_sum_to_n(self, exp2, exp1):
        with pytest.raises(InvalidParameter):
            ForkJoinConfig(n_servers=5, arrival=exp1, classes=(ServerClass(exp2, 4),))

    def test_unstable_class_rejected(self, exp1):
        with pytest.raises(Unstable):
            ForkJoinConfig.homogeneous(3, Exponential(rate=0.5), exp1)

    def test_from_alphas(self, exp2, exp1):
        config = ForkJoinConfig.from_alphas(10, [exp2, Exponential(4.0), Gamma(2.0, 8.0)],
                                            [0.25, 0.25, 0.5], exp1)
        assert [c.size for c in config.classes] == [3, 2, 5]
        assert config.lam == pytest.approx(1.0)
        assert config.sigma_A == pytest.approx(1.0)

    def test_dict_codec(self, small_config):
        assert ForkJoinConfig.from_dict(small_config.to_dict()) == small_config


class TestClassSizes:

    def test_largest_remainder(self):
        assert class_sizes(10, [0.25, 0.25, 0.5]) == [3, 2, 5]
        assert class_sizes(7, [1 / 3, 1 / 3, 1 / 3]) == [3, 2, 2]

    def test_empty_class_rejected(self):
        with pytest.raises(InvalidParameter):
            class_sizes(2, [0.1, 0.1, 0.8])


class TestHorizon:

    @pytest.mark.parametrize('c_hat, n, steps', [
        (0.43, 10 ** 4, 1000),
        (0.43, 10 ** 20, 1000),
        (50.0, 10 ** 6, 6908),
    ])
    def test_default_horizon(self, c_hat, n, steps):
        assert default_horizon(_with_c_hat(c_hat), n).steps == steps

    def test_doubled(self):
        assert Horizon(300).doubled().steps == 600

    def test_positive_steps(self):
        with pytest.raises(InvalidParameter):
            Horizon(0)


class TestMaxWait:

    def test_deterministic_is_zero(self, deterministic_config, short_horizon):
        streams = substream(1, 0)
        assert sample_max_wait_sup(deterministic_config, short_horizon, streams) == 0.0
        assert sample_max_wait_lindley(deterministic_config, short_horizon, substream(1, 0)) == 0.0

    def test_single_step_single_server(self, exp2, exp1):
        config = ForkJoinConfig.homogeneous(1, exp2, exp1)
        value = sample_max_wait_sup(config, Horizon(1), substream(5, 3))

        streams = substream(5, 3)
        arrival = exp1.sample_array(streams.arrivals, 1)[0]
        service = exp2.sample_array(streams.service_group(0, 0), (1, streams.group_width))[0, 0]
        assert value == pytest.approx(max(0.0, service - arrival))

    def test_single_step_both_samplers_agree(self, small_config):
        sup = sample_max_wait_sup(small_config, Horizon(1), substream(9, 0))
        lindley = sample_max_wait_lindley(small_config, Horizon(1), substream(9, 0))
        assert sup == pytest.approx(lindley)

    def test_chunking_does_not_change_result(self, small_config):
        horizon = Horizon(300)
        a = sample_max_wait_sup(small_config, horizon, substream(2, 1), SimConfig(chunk_rows=7))
        b = sample_max_wait_sup(small_config, horizon, substream(2, 1), SimConfig(chunk_rows=256))
        assert a == pytest.approx(b, rel=1e-12)

    def test_servers_nest_across_n(self, exp2, exp1):
        sim_config = SimConfig(group_width=8)
        horizon = Horizon(150)
        small = ForkJoinConfig.homogeneous(10, exp2, exp1)
        large = ForkJoinConfig.homogeneous(20, exp2, exp1)
        for r in range(5):
            a = sample_max_wait_sup(small, horizon, substream(4, r, 8), sim_config)
            b = sample_max_wait_sup(large, horizon, substream(4, r, 8), sim_config)
            assert b >= a

    def test_nonnegative(self, small_config, short_horizon):
        for r in range(5):
            assert sample_max_wait_sup(small_config, short_horizon, substream(3, r)) >= 0.0


class TestPathCoupling:
    """同一子流下，截断步数与分块大小只决定读取多长的同一条路径"""

    @pytest.mark.parametrize('pair', FAMILY_PAIRS, ids=_pair_id)
    def test_sup_nondecreasing_in_horizon(self, pair):
        config = ForkJoinConfig.homogeneous(2, *pair)
        sim_config = SimConfig(chunk_rows=256, group_width=8)
        for r in range(20):
            short = sample_max_wait_sup(config, Horizon(300), substream(7, r, 8), sim_config)
            long = sample_max_wait_sup(config, Horizon(600), substream(7, r, 8), sim_config)
            assert long >= short

    @pytest.mark.parametrize('pair', FAMILY_PAIRS, ids=_pair_id)
    def test_sup_invariant_to_chunk_rows(self, pair):
        config = ForkJoinConfig.homogeneous(2, *pair)
        horizon = Horizon(700)
        for r in range(20):
            a = sample_max_wait_sup(config, horizon, substream(7, r, 8), SimConfig(chunk_rows=256, group_width=8))
            b = sample_max_wait_sup(config, horizon, substream(7, r, 8), SimConfig(chunk_rows=99, group_width=8))
            assert a == pytest.approx(b, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize('pair', FAMILY_PAIRS, ids=_pair_id)
    def test_lindley_invariant_to_chunk_rows(self, pair):
        config = ForkJoinConfig.homogeneous(3, *pair)
        horizon = Horizon(500)
        a = sample_max_wait_lindley(config, horizon, substream(3, 1, 8), SimConfig(chunk_rows=500, group_width=8))
        b = sample_max_wait_lindley(config, horizon, substream(3, 1, 8), SimConfig(chunk_rows=33, group_width=8))
        assert a == pytest.approx(b, rel=1e-9, abs=1e-12)

    def test_lindley_matches_stepwise_recursion(self, small_config):
        steps = 400
        sim_config = SimConfig(chunk_rows=64, group_width=32)
        arrivals, services = _single_group_blocks(small_config, steps, substream(11, 2, 32))
        waits = np.zeros(small_config.n_servers)
        for j in range(steps):
            waits = np.maximum(0.0, waits + services[j] - arrivals[j])
        value = sample_max_wait_lindley(small_config, Horizon(steps), substream(11, 2, 32), sim_config)
        assert value == pytest.approx(float(waits.max()), rel=1e-9, abs=1e-12)


class TestWindows:

    def test_full_window_equals_sup(self, small_config, short_horizon):
        maxima = sample_window_maxima(small_config, short_horizon, [0, 50, short_horizon.steps + 1],
                                      substream(6, 0))
        sup = sample_max_wait_sup(small_config, short_horizon, substream(6, 0))
        assert max(maxima) == pytest.approx(sup, rel=1e-12)

    def test_window_below_sup(self, small_config, short_horizon):
        value = window_max_wait(small_config, short_horizon, 20, 80, substream(6, 1))
        sup = sample_max_wait_sup(small_config, short_horizon, substream(6, 1))
        assert value <= sup + 1e-12

    @pytest.mark.parametrize('edges', [[1, 10], [0, 10, 10], [0], [0, 500]])
    def test_invalid_edges(self, small_config, short_horizon, edges):
        with pytest.raises(InvalidParameter):
            sample_window_maxima(small_config, short_horizon, edges, substream(6, 2))


class TestCountArrivals:

    def test_deterministic(self):
        assert count_arrivals(Deterministic(0.5), 1.7, make_stream(0)) == 3
        assert count_arrivals(Deterministic(0.5), 1.5, make_stream(0)) == 3

    def test_zero_time(self, exp1):
        assert count_arrivals(exp1, 0.0, make_stream(0)) == 0

    def test_poisson_mean(self):
        lam, t, n = 2.0, 3.0, 20_000
        stream = make_stream(21)
        counts = np.array([count_arrivals(Exponential(lam), t, stream, chunk=16) for _ in range(n)])
        assert abs(counts.mean() - lam * t) < 4 * math.sqrt(lam * t / n)


class TestMaxQueue:

    def test_zero_wait_gives_zero_queue(self, deterministic_config, short_horizon):
        assert sample_max_queue_little(deterministic_config, short_horizon, substream(1, 0)) == 0

    def test_direct_deterministic_is_zero(self, short_horizon):
        config = ForkJoinConfig.homogeneous(1, Deterministic(0.4), Deterministic(1.0))
        assert sample_max_queue_direct(config, short_horizon, substream(1, 0)) == 0

    def test_direct_matches_stepwise_backtrack(self, small_config):
        steps = 300
        arrivals, services = _single_group_blocks(small_config, steps, substream(12, 4, 32))
        waits = np.zeros(small_config.n_servers)
        max_waits = []
        for j in range(steps):
            max_waits.append(waits.max())
            waits = np.maximum(0.0, waits + services[j] - arrivals[j])
        epochs = np.concatenate([[0.0], np.cumsum(arrivals)])
        elapsed = epochs[steps] - epochs[:steps]
        waiting = np.nonzero(np.array(max_waits) >= elapsed)[0]
        expected = 0 if waiting.size == 0 else steps - int(waiting[0])

        value = sample_max_queue_direct(small_config, Horizon(steps), substream(12, 4, 32),
                                        SimConfig(chunk_rows=37, group_width=32))
        assert value == expected

    def test_direct_is_nonnegative_count(self, small_config, short_horizon):
        for r in range(3):
            value = sample_max_queue_direct(small_config, short_horizon, substream(8, r))
            assert isinstance(value, int)
            assert 0 <= value < short_horizon.steps


class TestHittingTime:

    def test_zero_level(self, small_config, short_horizon):
        assert sample_hitting_time(small_config, 0.0, short_horizon, substream(1, 0)) == 0

    def test_negative_drift_without_noise_is_censored(self, deterministic_config, short_horizon):
        result = sample_hitting_time(deterministic_config, 0.5, short_horizon, substream(1, 0))
        assert result == Censored(short_horizon.steps)

    def test_consistent_with_sup(self, small_config, short_horizon):
        level = 2.0
        for r in range(8):
            tau = sample_hitting_time(small_config, level, short_horizon, substream(10, r))
            sup = sample_max_wait_sup(small_config, short_horizon, substream(10, r))
            assert isinstance(tau, Censored) == (sup < level)

    def test_negative_level(self, small_config, short_horizon):
        with pytest.raises(InvalidParameter):
            sample_hitting_time(small_config, -1.0, short_horizon, substream(1, 0))


class TestSampleSet:

    def _sample_set(self, censored):
        return SampleSet(values=np.array([1.0, 2.0, 3.0, 4.0]), censored=np.array(censored),
                         master_seed=1, replications=4, config_digest='x', horizon=Horizon(10),
                         statistic=Statistic.HITTING_TIME, n_servers=20)

    def test_censored_summaries(self):
        sample_set = self._sample_set([False, True, False, False])
        assert sample_set.censored_fraction == pytest.approx(0.25)
        assert sample_set.mean == pytest.approx(8.0 / 3.0)
        assert list(sample_set.uncensored) == [1.0, 3.0, 4.0]

    def test_all_censored_mean_is_nan(self):
        assert math.isnan(self._sample_set([True] * 4).mean)

    def test_manifest(self):
        manifest = self._sample_set([False] * 4).manifest()
        assert manifest['statistic'] == 'hitting-time'
        assert manifest['kind'] == 'HittingTime'
        assert manifest['horizon'] == {'steps': 10, 'safety_factor': 10.0}


def test_config_digest(small_config, short_horizon):
    a = config_digest(small_config, Statistic.MAX_WAIT_SUP, short_horizon)
    assert a == config_digest(small_config, Statistic.MAX_WAIT_SUP, short_horizon)
    assert a != config_digest(small_config, Statistic.MAX_WAIT_LINDLEY, short_horizon)
    assert len(a) == 64


def test_statistic_kinds():
    assert Statistic.MAX_WAIT_LINDLEY.kind == 'MaxWait'
    assert Statistic.MAX_QUEUE_DIRECT.kind == 'MaxQueue'
    assert Statistic('hitting-time') is Statistic.HITTING_TIME
