# -*- coding: utf-8 -*-
"""校验套件"""

import pytest

from core.dist import Deterministic, Exponential
from defaults.experiment_default import VerifySizes
from managers.verify_suite import CheckResult, CheckStatus, VerifySuite, summarize

NUMERIC_CHECKS = ('root_residual', 'duality', 'derivative_consistency')
GAMMA_CHECKS = ('derivative_consistency', 'window_contribution', 'tail_slope', 'centering_slope')


@pytest.fixture
def small_sizes():
    return VerifySizes(sweep_size=8, n_servers=10, steps=200, replications=400,
                       tail_replications=20000, centering_replications=100, horizon_floor=50)


def _by_name(results):
    return {r.name: r for r in results}


class TestNumericChecks:

    def test_reference_model_passes(self, exp2, exp1, small_sizes):
        suite = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=3)
        results = _by_name(suite.run(NUMERIC_CHECKS))
        assert set(results) == set(NUMERIC_CHECKS)
        for result in results.values():
            assert result.status is CheckStatus.PASS, result.to_dict()
        assert results['root_residual'].details['non_interior'] == 0
        assert results['root_residual'].details['oracle_error'] <= 1e-10

    def test_sweep_is_reproducible(self, exp2, exp1, small_sizes):
        first = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=11)._sweep_pairs()
        second = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=11)._sweep_pairs()
        assert [(s, lam) for s, lam, _ in first] == [(s, lam) for s, lam, _ in second]
        assert len(first) == small_sizes.sweep_size


class TestSkipping:

    def test_no_root_skips_gamma_checks(self, exp1, small_sizes):
        suite = VerifySuite(Deterministic(value=0.4), exp1, sizes=small_sizes)
        results = _by_name(suite.run(GAMMA_CHECKS + ('root_residual',)))
        for name in GAMMA_CHECKS:
            assert results[name].status is CheckStatus.SKIP
            assert results[name].reason == 'NoRoot'
        assert results['root_residual'].status is CheckStatus.PASS
        assert suite.solution is None

    def test_asymptotic_group_is_optional(self, exp2, exp1, small_sizes):
        names = [name for name, _, _ in VerifySuite(exp2, exp1, sizes=small_sizes).checks()]
        assert 'wait_limit_shape' not in names
        small_sizes.asymptotic = True
        names = [name for name, _, _ in VerifySuite(exp2, exp1, sizes=small_sizes).checks()]
        assert {'hitting_time', 'wait_limit_shape', 'sandwich', 'queue_limit_shape', 'hetero_selection'} <= set(names)

    def test_sandwich_needs_random_arrivals(self, exp2, small_sizes):
        small_sizes.asymptotic = True
        suite = VerifySuite(exp2, Deterministic(value=1.0), sizes=small_sizes)
        result = _by_name(suite.run(['sandwich']))['sandwich']
        assert result.status is CheckStatus.SKIP
        assert result.reason == 'AssumptionViolated'


class TestWaitShapeTrend:
    """大 N 处的 KS 距离除了不超过阈值，还不能比小 N 处大出 shape_trend_allowance"""

    @pytest.mark.parametrize('ks_small, expected', [
        (0.045, CheckStatus.PASS),
        (0.035, CheckStatus.FAIL),
    ])
    def test_trend_decides_status(self, exp2, exp1, small_sizes, monkeypatch, ks_small, expected):
        small_sizes.asymptotic = True
        suite = VerifySuite(exp2, exp1, sizes=small_sizes)
        # 第一次是 theorem_servers 处的批次，第二次是 trend_servers 处
        distances = iter([0.05, ks_small])
        monkeypatch.setattr(suite, '_batch', lambda *args, **kwargs: None)
        monkeypatch.setattr(suite, '_shape_outcome',
                            lambda samples, law, base: (True, next(distances), 0.10, {}))
        result = _by_name(suite.run(['wait_limit_shape']))['wait_limit_shape']
        assert result.status is expected
        assert result.value == 0.05
        assert result.details['ks_large'] == 0.05
        assert result.details['ks_small'] == ks_small
        assert result.details['trend_servers'] == small_sizes.trend_servers

    def test_threshold_still_applies(self, exp2, exp1, small_sizes, monkeypatch):
        small_sizes.asymptotic = True
        suite = VerifySuite(exp2, exp1, sizes=small_sizes)
        distances = iter([(False, 0.2), (False, 0.3)])

        def outcome(samples, law, base):
            passed, distance = next(distances)
            return passed, distance, 0.10, {}

        monkeypatch.setattr(suite, '_batch', lambda *args, **kwargs: None)
        monkeypatch.setattr(suite, '_shape_outcome', outcome)
        result = _by_name(suite.run(['wait_limit_shape']))['wait_limit_shape']
        assert result.status is CheckStatus.FAIL
        assert result.details['trend_ok'] is True


class TestSummarize:

    def test_counts_and_verdict(self):
        results = [
            CheckResult('a', CheckStatus.PASS, value=0.1, threshold=0.2),
            CheckResult('b', CheckStatus.SKIP, reason='NoRoot'),
            CheckResult('c', CheckStatus.PASS),
        ]
        summary = summarize(results)
        assert summary['passed']
        assert summary['counts'] == {'pass': 2, 'fail': 0, 'skip': 1}
        assert summary['checks'][1]['reason'] == 'NoRoot'

    def test_any_failure_fails(self):
        summary = summarize([CheckResult('a', CheckStatus.PASS), CheckResult('b', CheckStatus.FAIL)])
        assert not summary['passed']
        assert summary['counts']['fail'] == 1


@pytest.mark.slow
class TestStatisticalChecks:

    def test_sampler_checks_pass(self, exp2, exp1, small_sizes):
        suite = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=5, parallelism=2)
        results = _by_name(suite.run(['sampler_equivalence', 'little_law', 'truncation_stability',
                                      'window_contribution']))
        for result in results.values():
            assert result.status is CheckStatus.PASS, result.to_dict()

    def test_wait_shape_reports_both_sizes(self, exp2, exp1, small_sizes):
        small_sizes.asymptotic = True
        small_sizes.trend_servers = 20
        small_sizes.theorem_servers = 400
        small_sizes.theorem_replications = 200
        suite = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=5, parallelism=4)
        result = _by_name(suite.run(['wait_limit_shape']))['wait_limit_shape']
        details = result.details
        assert details['n_servers'] == 400
        assert details['trend_servers'] == 20
        expected = (details['ks_large'] <= result.threshold
                    and details['ks_large'] <= details['ks_small'] + details['trend_allowance'])
        assert (result.status is CheckStatus.PASS) == expected

    def test_tail_and_centering_slopes(self, exp2, exp1, small_sizes):
        small_sizes.centering_replications = 400
        suite = VerifySuite(exp2, exp1, sizes=small_sizes, master_seed=5, parallelism=4,
                            n_grid=[64, 256, 1024, 4096])
        results = _by_name(suite.run(['tail_slope', 'centering_slope']))
        for result in results.values():
            assert result.status is CheckStatus.PASS, result.to_dict()
