# -*- coding: utf-8 -*-
"""
Module: lundberg.py
Author: Takeshi
Date: 2026-02-05

Description:
    Cramér–Lundberg 根求解
    平移 CGF: Λ(θ) = log E[exp(θ(S − 1/λ))]
    求 Λ(γ) = 0 的唯一正根、γ 处的一二阶导数、命中常数 ĉ = 1/(γΛ'(γ))，
    以及 Legendre 变换 Λ*(x) = sup_t (tx − Λ(t))
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy import optimize

from defaults.solver_default import SolverConfig
from .dist import OUT_OF_DOMAIN, DistributionSpec, Empirical
from .errors import BoundaryRoot, InvalidParameter, NoRoot, OutsideDomain, Unstable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LundbergSolution:
    """
    Cramér–Lundberg 根及其派生常数

    Attributes:
        gamma (float): Λ 的正根 γ
        lambda_prime_at_gamma (float): Λ'(γ) > 0
        lambda_double_prime_at_gamma (float): Λ''(γ)
        c_hat (float): 命中常数 ĉ = 1/(γΛ'(γ))
        theta_sup (float): Λ 定义域上确界，可能为 inf
        interior (bool): γ 是否位于定义域内部
    """

    gamma: float
    lambda_prime_at_gamma: float
    lambda_double_prime_at_gamma: float
    c_hat: float
    theta_sup: float
    interior: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'lambda_prime': self.lambda_prime_at_gamma,
            'lambda_double_prime': self.lambda_double_prime_at_gamma,
            'c_hat': self.c_hat,
            'interior': self.interior,
            'theta_sup': self.theta_sup if math.isfinite(self.theta_sup) else None,
        }


def _check_lambda(lam: float):
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidParameter('lambda', f"到达率必须为正有限数，实际为 {lam!r}")


def shifted_cgf(service: DistributionSpec, lam: float, theta: float) -> float:
    """Λ(θ) = log_mgf(S, θ) − θ/λ，域外返回 OUT_OF_DOMAIN"""
    _check_lambda(lam)
    value = service.log_mgf(theta)
    if value == OUT_OF_DOMAIN:
        return OUT_OF_DOMAIN
    return value - theta / lam


def shifted_cgf_derivatives(service: DistributionSpec, lam: float, theta: float) -> Tuple[float, float]:
    """
    Λ'(θ) 与 Λ''(θ)

    Raises:
        OutsideDomain: θ >= theta_sup
    """
    _check_lambda(lam)
    if theta >= service.theta_sup:
        raise OutsideDomain(f"θ={theta} 不在 Λ 的定义域内部 (theta_sup={service.theta_sup})")
    d1, d2 = service.log_mgf_derivatives(theta)
    return d1 - 1.0 / lam, d2


def drift(service: DistributionSpec, lam: float) -> float:
    """Λ'(0) = E[S] − 1/λ，稳定性要求其为负"""
    _check_lambda(lam)
    return service.mean - 1.0 / lam


# ==================== 求根 ====================

def _bracket_upward(func: Callable[[float], float], start: float, theta_sup: float,
                    config: SolverConfig) -> Tuple[Optional[float], Optional[float]]:
    """
    从 start 起翻倍，返回 (lo, hi)，满足 func(lo) < 0 < func(hi)
    到达 theta_sup 时返回 (lo, None)，由调用方做边界探测
    """
    lo = None
    hi = start
    for _ in range(config.max_doublings):
        if hi >= theta_sup:
            return lo, None
        value = func(hi)
        if value > 0:
            break
        lo = hi
        hi *= 2.0
        if not math.isfinite(hi):
            return lo, None
    else:
        return lo, None

    # 起点本身已为正，向 0 方向折半找负值
    while lo is None:
        candidate = hi / 2.0
        if candidate == 0.0:
            break
        if func(candidate) < 0:
            lo = candidate
        else:
            hi = candidate
    return lo, hi


def _scan_boundary(func: Callable[[float], float], lo: float, theta_sup: float,
                    config: SolverConfig) -> Tuple[float, Optional[float], float]:
    """以 theta_sup − gap/2^k 逼近定义域边界，返回 (lo, hi 或 None, 最后一次取值)"""
    gap = theta_sup - lo
    last_value = func(lo)
    for k in range(1, config.boundary_steps + 1):
        theta = theta_sup - gap / 2.0 ** k
        if theta <= lo:
            continue
        value = func(theta)
        if value == OUT_OF_DOMAIN:
            break
        if value > 0:
            return lo, theta, value
        lo, last_value = theta, value
    return lo, None, last_value


def _solution_at(service: DistributionSpec, lam: float, gamma: float, interior: bool) -> LundbergSolution:
    d1, d2 = shifted_cgf_derivatives(service, lam, gamma)
    return LundbergSolution(
        gamma=gamma,
        lambda_prime_at_gamma=d1,
        lambda_double_prime_at_gamma=d2,
        c_hat=1.0 / (gamma * d1) if d1 > 0 else math.inf,
        theta_sup=service.theta_sup,
        interior=interior,
    )


def solve_gamma(service: DistributionSpec, lam: float,
                config: Optional[SolverConfig] = None) -> LundbergSolution:
    """
    求 Λ(γ) = 0 的唯一正根

    先从 bracket_start 翻倍夹逼，再二分到 bisect_width，最后在夹逼区间内做牛顿修正。

    Raises:
        Unstable: E[S] >= 1/λ
        NoRoot: Λ 在定义域内恒为负
        BoundaryRoot: 根只在 θ → theta_sup 时出现，异常附带 interior=False 的解
    """
    config = config or SolverConfig()
    mu = drift(service, lam)
    if mu >= 0:
        raise Unstable(f"E[S]={service.mean} >= 1/λ={1.0 / lam}，队列不稳定")
    if service.ess_sup <= 1.0 / lam:
        raise NoRoot(f"S 的支撑上端 {service.ess_sup} <= 1/λ，Λ(θ) 对所有 θ>0 为负")

    theta_sup = service.theta_sup

    def func(theta: float) -> float:
        return shifted_cgf(service, lam, theta)

    lo, hi = _bracket_upward(func, config.bracket_start, theta_sup, config)
    if hi is None:
        if not math.isfinite(theta_sup):
            raise NoRoot("翻倍夹逼直到溢出仍未使 Λ 变号")
        lo, hi, last_value = _scan_boundary(func, lo or 0.0, theta_sup, config)
        if hi is None:
            if last_value >= -config.boundary_tolerance and lo > 0:
                logger.warning(f"Λ 在边界 θ→{theta_sup} 处趋于 0，根不在定义域内部")
                raise BoundaryRoot(f"根位于定义域边界 θ={theta_sup}",
                                   solution=_solution_at(service, lam, lo, interior=False))
            raise NoRoot(f"Λ 在定义域 (0, {theta_sup}) 内恒为负，边界处取值 {last_value}")
    if lo is None:
        raise NoRoot("无法在 0 附近找到 Λ<0 的点")

    logger.debug(f"夹逼区间: [{lo:.6g}, {hi:.6g}]")
    root = optimize.bisect(func, lo, hi, xtol=config.bisect_width, maxiter=config.max_iterations)

    # 牛顿修正，越出夹逼区间或残差变差时保留二分结果
    gamma = root
    residual = abs(func(root))
    if residual > config.residual_tolerance:
        try:
            polished = optimize.newton(
                func, root,
                fprime=lambda t: shifted_cgf_derivatives(service, lam, t)[0],
                tol=config.bisect_width, maxiter=config.max_iterations,
            )
            if lo <= polished <= hi and abs(func(polished)) < residual:
                gamma = float(polished)
        except (RuntimeError, OutsideDomain, ArithmeticError) as e:
            logger.debug(f"牛顿修正失败，保留二分结果: {e}")

    solution = _solution_at(service, lam, float(gamma), interior=gamma < theta_sup)
    logger.debug(f"γ={solution.gamma:.12g}, Λ(γ)={func(solution.gamma):.3e}, "
                 f"Λ'(γ)={solution.lambda_prime_at_gamma:.6g}, ĉ={solution.c_hat:.6g}")
    return solution


# ==================== Legendre 变换 ====================

def _endpoint_limit(service: DistributionSpec, endpoint: float) -> float:
    """x 取支撑端点时 Λ*(x) 的极限: −log P(S = 端点)"""
    if isinstance(service, Empirical):
        mass = float(np.mean(service.points == endpoint))
        if mass > 0:
            return -math.log(mass)
    return math.inf


def legendre(service: DistributionSpec, lam: float, x: float,
             config: Optional[SolverConfig] = None) -> float:
    """
    Λ*(x) = sup_t (tx − Λ(t))

    Λ' 单调，二分求解 Λ'(t) = x，再计算 tx − Λ(t)。
    确定性服务时间只在 x = S − 1/λ 处取 0，其余为 +inf。

    Raises:
        OutsideDomain: 上确界不在定义域内部取到，limit 为极限值
    """
    config = config or SolverConfig()
    mu = drift(service, lam)

    if service.is_degenerate:
        return 0.0 if math.isclose(x, mu, rel_tol=1e-12, abs_tol=1e-12) else math.inf
    if x == mu:
        return 0.0

    lower = service.ess_inf - 1.0 / lam
    upper = service.ess_sup - 1.0 / lam
    if x <= lower or x >= upper:
        endpoint = lower if x <= lower else upper
        limit = _endpoint_limit(service, endpoint + 1.0 / lam) if x == endpoint else math.inf
        raise OutsideDomain(f"x={x} 不在 Λ' 的值域 ({lower}, {upper}) 内", limit=limit)

    def slope_gap(t: float) -> float:
        return shifted_cgf_derivatives(service, lam, t)[0] - x

    theta_sup = service.theta_sup
    t = config.bracket_start if x > mu else -config.bracket_start
    near = 0.0
    for _ in range(config.max_doublings):
        if t >= theta_sup:
            t = None
            break
        gap = slope_gap(t)
        if (gap > 0) == (x > mu):
            break
        near = t
        t *= 2.0
    else:
        t = None

    if t is None:
        # 正方向撞到定义域边界
        far = None
        for k in range(1, config.boundary_steps + 1):
            candidate = theta_sup - (theta_sup - near) / 2.0 ** k
            if slope_gap(candidate) > 0:
                far = candidate
                break
            near = candidate
        if far is None:
            limit = near * x - shifted_cgf(service, lam, near)
            raise OutsideDomain(f"Λ'(t) 在定义域内达不到 x={x}", limit=limit)
        t = far

    lo, hi = (near, t) if x > mu else (t, near)
    t_star = optimize.bisect(slope_gap, lo, hi, xtol=config.bisect_width,
                             maxiter=config.max_iterations)
    value = t_star * x - shifted_cgf(service, lam, t_star)
    logger.debug(f"Λ*({x:.6g}): t*={t_star:.10g}, 值={value:.10g}")
    return float(value)


# ==================== 派生常数 ====================

def hitting_constant(solution: LundbergSolution) -> float:
    """ĉ = 1/(γΛ'(γ))"""
    return 1.0 / (solution.gamma * solution.lambda_prime_at_gamma)


def centering_constant(solution: LundbergSolution) -> float:
    """最大等待时间的一阶中心化系数 1/γ"""
    return 1.0 / solution.gamma


def rate_function_at_hitting(service: DistributionSpec, lam: float, solution: LundbergSolution,
                             config: Optional[SolverConfig] = None) -> float:
    """Λ*(Λ'(γ))·ĉ，对偶关系要求其等于 1"""
    return legendre(service, lam, solution.lambda_prime_at_gamma, config) * hitting_constant(solution)
