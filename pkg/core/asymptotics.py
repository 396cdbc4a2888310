# -*- coding: utf-8 -*-
"""
Module: asymptotics.py
Author: Takeshi
Date: 2026-02-08

Description:
    最大等待时间 / 最大队列长度的极限分布
    - 正态极限: 中心化系数 × log N + √(log N) × scale × X
    - ε 窗口上下界混合分布: a·X₁ ∓ b·|X₂|，CDF 通过对 |X₂| 的一维积分计算
    - 多类别服务器的主导类选择
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

from scipy import integrate, optimize

from defaults.solver_default import SolverConfig
from .dist import DistributionSpec
from .errors import (AmbiguousMinimum, AssumptionViolated, DegenerateLaw, InvalidParameter,
                     KindMismatch, OutOfRange)
from .lundberg import LundbergSolution
from .stats import normal_cdf, normal_pdf, normal_quantile

logger = logging.getLogger(__name__)

# 类别权重和的容差
ALPHA_TOLERANCE = 1e-9


class LimitKind(str, Enum):
    NORMAL = 'normal'
    LOWER_BOUND_MIX = 'lower-bound'
    UPPER_BOUND_MIX = 'upper-bound'


@dataclass(frozen=True)
class LimitLaw:
    """
    一维极限分布

    Attributes:
        kind (LimitKind): 正态或 ε 窗口混合分布
        center_coeff (float): log N 的系数（等待时间为 1/γ，队列长度为 λ/γ）
        scale (float): √(log N)·X 的系数，0 表示退化分布
        epsilon (float): 窗口半宽，仅混合分布使用
        c_hat (float): 命中常数，仅混合分布使用
        sigma_A (float): 到达间隔标准差
    """

    kind: LimitKind
    center_coeff: float
    scale: float
    epsilon: float = 0.0
    c_hat: float = 0.0
    sigma_A: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale >= 0):
            raise InvalidParameter('scale', f"必须为非负有限数，实际为 {self.scale!r}")
        if self.is_mix and not (0.0 < self.epsilon < self.c_hat):
            raise InvalidParameter('epsilon', f"混合分布要求 0 < ε < ĉ，实际 ε={self.epsilon}, ĉ={self.c_hat}")

    @property
    def is_mix(self) -> bool:
        return self.kind is not LimitKind.NORMAL

    @property
    def mix_a(self) -> float:
        """X₁ 的系数 σ_A√(ĉ−ε)"""
        return self.sigma_A * math.sqrt(self.c_hat - self.epsilon)

    @property
    def mix_b(self) -> float:
        """|X₂| 的系数：下界 σ_A√ε，上界 σ_A√(2ε)"""
        if self.kind is LimitKind.LOWER_BOUND_MIX:
            return self.sigma_A * math.sqrt(self.epsilon)
        return self.sigma_A * math.sqrt(2.0 * self.epsilon)

    @property
    def is_degenerate(self) -> bool:
        if self.is_mix:
            return self.sigma_A == 0.0
        return self.scale == 0.0

    def to_dict(self) -> dict:
        data = {'kind': self.kind.value, 'center_coeff': self.center_coeff, 'scale': self.scale}
        if self.is_mix:
            data.update(epsilon=self.epsilon, c_hat=self.c_hat, sigma_A=self.sigma_A)
        return data


@dataclass(frozen=True)
class ClassSpec:
    """一个服务器类别: 服务时间分布、渐近占比 α_k、对应的 Lundberg 解"""

    service: DistributionSpec
    alpha: float
    solution: LundbergSolution

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise InvalidParameter('alpha', f"类别占比必须在 (0, 1] 内，实际为 {self.alpha}")


class HeteroSelection(NamedTuple):
    k_star: int
    law: LimitLaw


class QuantilePrediction(NamedTuple):
    value: float
    degenerate: bool


def _require_interior(solution: LundbergSolution):
    if not solution.interior:
        raise AssumptionViolated(f"γ={solution.gamma} 不在定义域内部，极限定理不适用")


# ==================== 极限分布构造 ====================

def wait_limit_law(solution: LundbergSolution, sigma_A: float) -> LimitLaw:
    """最大等待时间的正态极限: center 1/γ，scale σ_A/√(Λ'(γ)γ)"""
    _require_interior(solution)
    scale = sigma_A / math.sqrt(solution.lambda_prime_at_gamma * solution.gamma)
    return LimitLaw(kind=LimitKind.NORMAL, center_coeff=1.0 / solution.gamma,
                    scale=scale, c_hat=solution.c_hat, sigma_A=sigma_A)


def queue_limit_law(solution: LundbergSolution, lam: float, sigma_A: float) -> LimitLaw:
    """最大队列长度的正态极限: center λ/γ，scale² = λ²σ_A²/(Λ'γ) + λ³σ_A²/γ"""
    _require_interior(solution)
    variance = (lam ** 2 * sigma_A ** 2 / (solution.lambda_prime_at_gamma * solution.gamma)
                + lam ** 3 * sigma_A ** 2 / solution.gamma)
    return LimitLaw(kind=LimitKind.NORMAL, center_coeff=lam / solution.gamma,
                    scale=math.sqrt(variance), c_hat=solution.c_hat, sigma_A=sigma_A)


def lower_bound_law(solution: LundbergSolution, sigma_A: float, epsilon: float) -> LimitLaw:
    """窗口 [(ĉ−ε)log N, ĉ log N) 的下界分布 σ_A√(ĉ−ε)X₁ − σ_A√ε|X₂|"""
    _require_interior(solution)
    return LimitLaw(kind=LimitKind.LOWER_BOUND_MIX, center_coeff=1.0 / solution.gamma,
                    scale=sigma_A * math.sqrt(solution.c_hat), epsilon=epsilon,
                    c_hat=solution.c_hat, sigma_A=sigma_A)


def upper_bound_law(solution: LundbergSolution, sigma_A: float, epsilon: float) -> LimitLaw:
    """窗口 [(ĉ−ε)log N, (ĉ+ε)log N) 的上界分布 σ_A√(ĉ−ε)X₁ + σ_A√(2ε)|X₂|"""
    _require_interior(solution)
    return LimitLaw(kind=LimitKind.UPPER_BOUND_MIX, center_coeff=1.0 / solution.gamma,
                    scale=sigma_A * math.sqrt(solution.c_hat), epsilon=epsilon,
                    c_hat=solution.c_hat, sigma_A=sigma_A)


def brownian_limit_law(sigma: float, sigma_A: float, beta: float) -> LimitLaw:
    """
    Brownian fork-join 队列 max_i(B_i(s) + B_A(s) − βs) 的正态极限

    中心化 σ²/(2β)，尺度 σσ_A/(√2·β)；等价于正态增量 N(−β, σ²) 时的 wait_limit_law
    """
    if not (beta > 0 and sigma > 0 and sigma_A >= 0):
        raise InvalidParameter('beta', "需要 β > 0、σ > 0、σ_A >= 0")
    return LimitLaw(kind=LimitKind.NORMAL, center_coeff=sigma ** 2 / (2.0 * beta),
                    scale=sigma * sigma_A / (math.sqrt(2.0) * beta),
                    c_hat=sigma ** 2 / (2.0 * beta ** 2), sigma_A=sigma_A)


# ==================== CDF ====================

def _step_cdf(x: float) -> float:
    return 1.0 if x >= 0 else 0.0


def bound_law_cdf(law: LimitLaw, x: float, config: Optional[SolverConfig] = None) -> float:
    """
    混合分布 a·X₁ ∓ b·|X₂| 在 x 处的 CDF

    ∫₀^U 2φ(y)·Φ((x ± b·y)/a) dy，[U, ∞) 段的质量 2Φ̄(U) 以端点值补上

    Raises:
        KindMismatch: 传入正态分布
    """
    if not law.is_mix:
        raise KindMismatch("正态极限请使用 law_cdf 的闭式 CDF")
    config = config or SolverConfig()
    if law.is_degenerate:
        return _step_cdf(x)

    a, b = law.mix_a, law.mix_b
    sign = 1.0 if law.kind is LimitKind.LOWER_BOUND_MIX else -1.0
    upper = config.quad_upper

    def integrand(y: float) -> float:
        return 2.0 * normal_pdf(y) * normal_cdf((x + sign * b * y) / a)

    body, _ = integrate.quad(integrand, 0.0, upper, epsabs=config.quad_tolerance, limit=200)
    tail = 2.0 * normal_cdf(-upper) * normal_cdf((x + sign * b * upper) / a)
    return min(1.0, max(0.0, body + tail))


def law_cdf(law: LimitLaw, x: float, config: Optional[SolverConfig] = None) -> float:
    """标准化变量的 CDF；正态为闭式，混合分布走 bound_law_cdf，退化分布为阶跃"""
    if law.is_mix:
        return bound_law_cdf(law, x, config)
    if law.is_degenerate:
        return _step_cdf(x)
    return normal_cdf(x / law.scale)


def queue_two_normal_cdf(solution: LundbergSolution, lam: float, sigma_A: float, x: float,
                         config: Optional[SolverConfig] = None) -> float:
    """
    队列长度的两独立正态构造: λ·s_W·X + λ^{3/2}σ_A·γ^{-1/2}·Z 的 CDF

    s_W 为等待时间极限的尺度；结果应与 queue_limit_law 的闭式正态 CDF 一致
    """
    config = config or SolverConfig()
    wait_scale = lam * wait_limit_law(solution, sigma_A).scale
    count_scale = sigma_A * lam ** 1.5 / math.sqrt(solution.gamma)
    if wait_scale == 0.0:
        return _step_cdf(x) if count_scale == 0.0 else normal_cdf(x / count_scale)

    def integrand(z: float) -> float:
        return normal_pdf(z) * normal_cdf((x - count_scale * z) / wait_scale)

    bound = config.quad_upper
    value, _ = integrate.quad(integrand, -bound, bound, epsabs=config.quad_tolerance, limit=200)
    return min(1.0, max(0.0, value))


# ==================== 分位点 ====================

def _mix_quantile(law: LimitLaw, p: float, config: SolverConfig) -> float:
    def gap(z: float) -> float:
        return bound_law_cdf(law, z, config) - p

    width = law.mix_a + law.mix_b
    lo, hi = -width, width
    while gap(lo) > 0:
        lo *= 2.0
    while gap(hi) < 0:
        hi *= 2.0
    return float(optimize.brentq(gap, lo, hi, xtol=1e-12, maxiter=config.max_iterations))


def standardized_quantile(law: LimitLaw, p: float, config: Optional[SolverConfig] = None) -> float:
    """标准化变量的 p 分位点（已乘 scale）"""
    if not (0.0 < p < 1.0):
        raise OutOfRange(f"概率 p={p} 不在 (0, 1) 内", value=p)
    if law.is_degenerate:
        return 0.0
    if law.is_mix:
        return _mix_quantile(law, p, config or SolverConfig())
    return law.scale * normal_quantile(p)


def predicted_quantile(law: LimitLaw, n_servers: int, p: float,
                       config: Optional[SolverConfig] = None, strict: bool = False) -> QuantilePrediction:
    """
    center·log N + √(log N)·z_p

    退化分布对所有 p 返回中心值并置 degenerate 标志；strict=True 时 p ≠ 0.5 抛出 DegenerateLaw
    """
    if n_servers < 2:
        raise InvalidParameter('n_servers', f"需要 N >= 2，实际为 {n_servers}")
    if not (0.0 < p < 1.0):
        raise OutOfRange(f"概率 p={p} 不在 (0, 1) 内", value=p)
    log_n = math.log(n_servers)
    center = law.center_coeff * log_n
    if law.is_degenerate:
        if p != 0.5:
            if strict:
                raise DegenerateLaw(f"退化分布 (scale=0) 没有 p={p} 的非平凡分位点")
            logger.debug(f"退化分布，p={p} 的分位点取中心值 {center}")
        return QuantilePrediction(center, p != 0.5)
    z = standardized_quantile(law, p, config)
    return QuantilePrediction(center + math.sqrt(log_n) * z, False)


# ==================== 多类别 ====================

def hetero_select(classes: Sequence[ClassSpec], sigma_A: float,
                  config: Optional[SolverConfig] = None) -> HeteroSelection:
    """
    选择 γ 最小的类别 k*（下标从 0 开始，按输入顺序），返回该类的等待时间极限

    α_k 只保证各类规模线性增长，不影响极限分布

    Raises:
        AmbiguousMinimum: 最小的两个 γ 相差不超过容差
    """
    config = config or SolverConfig()
    if not classes:
        raise InvalidParameter('classes', "至少需要一个类别")
    total = math.fsum(c.alpha for c in classes)
    if abs(total - 1.0) > ALPHA_TOLERANCE:
        raise InvalidParameter('alpha', f"类别占比之和为 {total}，应为 1")
    for spec in classes:
        _require_interior(spec.solution)

    order: List[int] = sorted(range(len(classes)), key=lambda k: classes[k].solution.gamma)
    k_star = order[0]
    if len(order) > 1:
        runner_up = order[1]
        gap = classes[runner_up].solution.gamma - classes[k_star].solution.gamma
        if gap <= config.ambiguity_tolerance:
            tied = [k for k in order
                    if classes[k].solution.gamma - classes[k_star].solution.gamma <= config.ambiguity_tolerance]
            raise AmbiguousMinimum(f"类别 {tied} 的 γ 在容差 {config.ambiguity_tolerance} 内相同",
                                   indices=tied)

    logger.debug(f"主导类别 k*={k_star}, γ={classes[k_star].solution.gamma:.10g}")
    return HeteroSelection(k_star, wait_limit_law(classes[k_star].solution, sigma_A))
