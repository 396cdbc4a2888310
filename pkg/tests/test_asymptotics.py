# -*- coding: utf-8 -*-
"""极限分布构造、CDF、分位点与多类别选择"""

import itertools
import math

import numpy as np
import pytest

from core.asymptotics import (ClassSpec, LimitKind, LimitLaw, bound_law_cdf, brownian_limit_law,
                              hetero_select, law_cdf, lower_bound_law, predicted_quantile,
                              queue_limit_law, queue_two_normal_cdf, standardized_quantile,
                              upper_bound_law, wait_limit_law)
from core.dist import Exponential
from core.errors import (AmbiguousMinimum, AssumptionViolated, DegenerateLaw, InvalidParameter,
                         KindMismatch, OutOfRange)
from core.lundberg import LundbergSolution
from core.stats import normal_cdf


def _solution(gamma: float, slope: float, interior: bool = True) -> LundbergSolution:
    return LundbergSolution(gamma=gamma, lambda_prime_at_gamma=slope, lambda_double_prime_at_gamma=1.0,
                            c_hat=1.0 / (gamma * slope), theta_sup=math.inf, interior=interior)


class TestWaitLaw:

    def test_arithmetic(self):
        law = wait_limit_law(_solution(2.0, 0.5), sigma_A=1.0)
        assert law.kind is LimitKind.NORMAL
        assert law.center_coeff == pytest.approx(0.5)
        assert law.scale == pytest.approx(1.0)

    def test_deterministic_arrivals_degenerate(self, exp2_solution):
        law = wait_limit_law(exp2_solution, sigma_A=0.0)
        assert law.scale == 0.0
        assert law.is_degenerate
        assert law.center_coeff == pytest.approx(1.0 / exp2_solution.gamma)

    def test_exponential_example(self, exp2_solution):
        law = wait_limit_law(exp2_solution, sigma_A=1.0)
        assert law.center_coeff == pytest.approx(0.6275, abs=1e-4)
        assert law.scale == pytest.approx(0.6556, abs=1e-3)

    def test_boundary_root_rejected(self):
        with pytest.raises(AssumptionViolated):
            wait_limit_law(_solution(1.0, 1.0, interior=False), sigma_A=1.0)


class TestQueueLaw:

    def test_arithmetic(self):
        law = queue_limit_law(_solution(2.0, 0.5), lam=2.0, sigma_A=0.5)
        assert law.center_coeff == pytest.approx(1.0)
        assert law.scale == pytest.approx(math.sqrt(2.0))

    def test_degenerate(self, exp2_solution):
        law = queue_limit_law(exp2_solution, lam=1.0, sigma_A=0.0)
        assert law.scale == 0.0
        assert law.center_coeff == pytest.approx(1.0 / exp2_solution.gamma)

    def test_unit_rate_decomposition(self, exp2_solution):
        wait = wait_limit_law(exp2_solution, sigma_A=0.8)
        queue = queue_limit_law(exp2_solution, lam=1.0, sigma_A=0.8)
        assert queue.scale ** 2 == pytest.approx(wait.scale ** 2 + 0.8 ** 2 / exp2_solution.gamma)

    @pytest.mark.parametrize('lam, sigma_A', [(1.0, 1.0), (2.0, 0.5), (0.7, 1.3)])
    def test_matches_two_normal_construction(self, lam, sigma_A):
        solution = _solution(1.3, 0.9)
        law = queue_limit_law(solution, lam, sigma_A)
        for x in (-2.0, -0.3, 0.0, 0.8, 2.5):
            assert queue_two_normal_cdf(solution, lam, sigma_A, x) == pytest.approx(
                law_cdf(law, x), abs=1e-8)


class TestBoundLaws:

    def test_vanishing_window_recovers_normal(self, exp2_solution):
        law = lower_bound_law(exp2_solution, sigma_A=1.0, epsilon=1e-12)
        scale = math.sqrt(exp2_solution.c_hat)
        for x in (-1.0, 0.0, 0.4, 1.2):
            assert bound_law_cdf(law, x) == pytest.approx(normal_cdf(x / scale), abs=1e-6)

    def test_lower_mix_equal_weights_at_zero(self, exp2_solution):
        law = lower_bound_law(exp2_solution, sigma_A=1.0, epsilon=exp2_solution.c_hat / 2)
        assert law.mix_a == pytest.approx(law.mix_b)
        assert bound_law_cdf(law, 0.0) == pytest.approx(0.75, abs=1e-8)

    def test_upper_mix_equal_weights_at_zero(self, exp2_solution):
        law = upper_bound_law(exp2_solution, sigma_A=1.0, epsilon=exp2_solution.c_hat / 3)
        assert law.mix_a == pytest.approx(law.mix_b)
        assert bound_law_cdf(law, 0.0) == pytest.approx(0.25, abs=1e-8)

    def test_monotone_with_limits(self, exp2_solution):
        epsilon = 0.1 * exp2_solution.c_hat
        for law in (lower_bound_law(exp2_solution, 1.0, epsilon), upper_bound_law(exp2_solution, 1.0, epsilon)):
            grid = np.linspace(-6.0, 6.0, 49)
            values = [bound_law_cdf(law, float(x)) for x in grid]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
            assert values[0] < 1e-6
            assert values[-1] > 1 - 1e-6

    def test_lower_dominates_normal_and_upper(self, exp2_solution):
        epsilon = 0.2 * exp2_solution.c_hat
        lower = lower_bound_law(exp2_solution, 1.0, epsilon)
        upper = upper_bound_law(exp2_solution, 1.0, epsilon)
        scale = math.sqrt(exp2_solution.c_hat)
        for x in np.linspace(-2.0, 2.0, 9):
            f_lower = law_cdf(lower, float(x))
            assert f_lower >= normal_cdf(float(x) / scale) - 1e-9
            assert law_cdf(upper, float(x)) <= f_lower + 1e-9

    def test_normal_law_rejected(self, exp2_solution):
        with pytest.raises(KindMismatch):
            bound_law_cdf(wait_limit_law(exp2_solution, 1.0), 0.0)

    def test_epsilon_must_lie_inside_window(self, exp2_solution):
        with pytest.raises(InvalidParameter):
            lower_bound_law(exp2_solution, 1.0, epsilon=exp2_solution.c_hat)
        with pytest.raises(InvalidParameter):
            upper_bound_law(exp2_solution, 1.0, epsilon=0.0)

    def test_degenerate_mix_is_step(self, exp2_solution):
        law = upper_bound_law(exp2_solution, 0.0, 0.1 * exp2_solution.c_hat)
        assert bound_law_cdf(law, -1e-3) == 0.0
        assert bound_law_cdf(law, 0.0) == 1.0


class TestBrownian:

    def test_constants(self):
        law = brownian_limit_law(sigma=2.0, sigma_A=1.5, beta=0.5)
        assert law.center_coeff == pytest.approx(4.0)
        assert law.scale == pytest.approx(2.0 * 1.5 / (math.sqrt(2.0) * 0.5))

    def test_equals_wait_law_of_gaussian_increments(self):
        sigma, beta, sigma_A = 1.3, 0.4, 0.9
        # N(−β, σ²) 增量: γ = 2β/σ², Λ'(γ) = β
        law = wait_limit_law(_solution(2 * beta / sigma ** 2, beta), sigma_A)
        reference = brownian_limit_law(sigma, sigma_A, beta)
        assert law.center_coeff == pytest.approx(reference.center_coeff)
        assert law.scale == pytest.approx(reference.scale)


class TestQuantile:

    def test_median_is_center(self):
        law = wait_limit_law(_solution(2.0, 0.5), 1.0)
        prediction = predicted_quantile(law, 10_000, 0.5)
        assert prediction.value == law.center_coeff * math.log(10_000)
        assert not prediction.degenerate

    def test_one_sigma(self):
        law = wait_limit_law(_solution(2.0, 0.5), 1.0)
        assert predicted_quantile(law, math.e, 0.8413).value == pytest.approx(1.5, abs=1e-3)

    def test_degenerate_returns_center_with_flag(self, exp2_solution):
        law = wait_limit_law(exp2_solution, 0.0)
        prediction = predicted_quantile(law, 100, 0.9)
        assert prediction.value == pytest.approx(law.center_coeff * math.log(100))
        assert prediction.degenerate
        with pytest.raises(DegenerateLaw):
            predicted_quantile(law, 100, 0.9, strict=True)

    @pytest.mark.parametrize('make_law', [
        lambda s: wait_limit_law(s, 1.0),
        lambda s: queue_limit_law(s, 1.0, 1.0),
        lambda s: lower_bound_law(s, 1.0, 0.1 * s.c_hat),
        lambda s: upper_bound_law(s, 1.0, 0.1 * s.c_hat),
    ], ids=['wait', 'queue', 'lower-bound', 'upper-bound'])
    def test_monotone_in_p_and_n(self, exp2_solution, make_law):
        law = make_law(exp2_solution)
        ps = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99]
        ns = [100, 1_000, 10_000, 100_000, 1_000_000]
        table = np.array([[predicted_quantile(law, n, p).value for p in ps] for n in ns])
        assert np.all(np.diff(table, axis=1) > 0)
        # N >= 100 时中心项 center·log N 的增长压过 √(log N)·z_p 的下降
        assert np.all(np.diff(table, axis=0) > 0)

    @pytest.mark.parametrize('p', [0.0, 1.0, -0.1, 1.5])
    def test_probability_out_of_range(self, p):
        law = wait_limit_law(_solution(2.0, 0.5), 1.0)
        with pytest.raises(OutOfRange):
            predicted_quantile(law, 100, p)

    def test_mix_quantile_inverts_cdf(self, exp2_solution):
        law = lower_bound_law(exp2_solution, 1.0, 0.1 * exp2_solution.c_hat)
        for p in (0.05, 0.5, 0.9):
            z = standardized_quantile(law, p)
            assert law_cdf(law, z) == pytest.approx(p, abs=1e-8)


class TestHeteroSelect:

    @staticmethod
    def _classes(gammas, alphas=None):
        alphas = alphas or [1.0 / len(gammas)] * len(gammas)
        return [ClassSpec(Exponential(2.0), a, _solution(g, 1.0)) for g, a in zip(gammas, alphas)]

    def test_argmin(self):
        selection = hetero_select(self._classes([1.2, 0.8, 2.0], [0.2, 0.3, 0.5]), sigma_A=1.0)
        assert selection.k_star == 1
        assert selection.law.center_coeff == pytest.approx(1.0 / 0.8)

    def test_single_class(self, exp2_solution):
        classes = [ClassSpec(Exponential(2.0), 1.0, exp2_solution)]
        selection = hetero_select(classes, sigma_A=1.0)
        assert selection.k_star == 0
        assert selection.law == wait_limit_law(exp2_solution, 1.0)

    def test_tie_is_ambiguous(self):
        with pytest.raises(AmbiguousMinimum) as excinfo:
            hetero_select(self._classes([1.0, 1.0 + 1e-12]), sigma_A=1.0)
        assert excinfo.value.indices == (0, 1)

    def test_alphas_must_sum_to_one(self):
        with pytest.raises(InvalidParameter):
            hetero_select(self._classes([1.0, 2.0], [0.5, 0.6]), sigma_A=1.0)

    def test_invariant_under_class_permutation(self):
        classes = [
            ClassSpec(Exponential(2.0), 0.2, _solution(1.2, 1.0)),
            ClassSpec(Exponential(3.0), 0.3, _solution(0.8, 1.3)),
            ClassSpec(Exponential(4.0), 0.5, _solution(2.0, 0.7)),
        ]
        base = hetero_select(classes, sigma_A=1.0)
        for order in itertools.permutations(range(len(classes))):
            selection = hetero_select([classes[k] for k in order], sigma_A=1.0)
            assert order[selection.k_star] == base.k_star
            assert selection.law == base.law

    def test_law_independent_of_alphas(self):
        a = hetero_select(self._classes([1.5, 0.9], [0.9, 0.1]), sigma_A=1.0)
        b = hetero_select(self._classes([1.5, 0.9], [0.1, 0.9]), sigma_A=1.0)
        assert a == b
