# -*- coding: utf-8 -*-
"""
Module: stats.py
Author: Takeshi
Date: 2026-02-07

Description:
    经验分布工具：标准化、KS 距离、最小二乘斜率、正态分布函数
    经验 CDF 约定为右连续: F̂(x) = #{values <= x} / n
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import special
from scipy import stats as sp_stats

from .errors import DegenerateDesign, EmptySample, InvalidParameter, OutOfRange

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


# ==================== 正态分布 ====================

def normal_cdf(x: float) -> float:
    """标准正态分布函数 Φ(x)"""
    return float(special.ndtr(x))


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_quantile(p: float) -> float:
    """
    标准正态分位点 Φ⁻¹(p)，ndtri 初值后做一步牛顿修正

    Raises:
        OutOfRange: p 不在 (0, 1) 内
    """
    if not (0.0 < p < 1.0):
        raise OutOfRange(f"概率 p={p} 不在 (0, 1) 内", value=p)
    q = float(special.ndtri(p))
    density = normal_pdf(q)
    if density > 0:
        q -= (normal_cdf(q) - p) / density
    return q


# ==================== 标准化 ====================

@dataclass(frozen=True)
class StandardizedSample:
    """
    标准化样本 (x − center·log N) / √(log N)

    Attributes:
        values: 标准化后的数值
        n_servers: 服务器数 N
        law: 提供 center_coeff 的极限分布
    """

    values: np.ndarray
    n_servers: int
    law: Any

    @property
    def log_n(self) -> float:
        return math.log(self.n_servers)

    def __len__(self) -> int:
        return int(self.values.size)


def _as_array(samples: Any) -> np.ndarray:
    values = getattr(samples, 'values', samples)
    return np.asarray(values, dtype=float).ravel()


def standardize(samples: Any, law: Any, n_servers: int) -> StandardizedSample:
    """按 (x − center_coeff·log N)/√(log N) 逐元素变换，samples 可为 SampleSet 或数值序列"""
    if n_servers < 2:
        raise InvalidParameter('n_servers', f"标准化要求 N >= 2，实际为 {n_servers}")
    log_n = math.log(n_servers)
    values = (_as_array(samples) - law.center_coeff * log_n) / math.sqrt(log_n)
    return StandardizedSample(values=values, n_servers=n_servers, law=law)


def destandardize(sample: StandardizedSample) -> np.ndarray:
    """standardize 的逆变换"""
    log_n = sample.log_n
    return sample.values * math.sqrt(log_n) + sample.law.center_coeff * log_n


# ==================== 经验分布与 KS ====================

def empirical_cdf(sample: Sequence[float], x: float) -> float:
    values = np.sort(np.asarray(sample, dtype=float))
    if values.size == 0:
        raise EmptySample("经验 CDF 需要非空样本")
    return float(np.searchsorted(values, x, side='right')) / values.size


def ks_distance(sample: Sequence[float], cdf: Callable[[float], float]) -> float:
    """
    单样本 KS 距离 sup|F̂ − F|，两侧阶跃都计入

    cdf 只需接受标量，内部逐点求值后交给 scipy.stats.kstest

    Raises:
        EmptySample: 样本为空
    """
    values = np.asarray(sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySample("KS 距离需要非空样本")

    def vector_cdf(points: Any) -> np.ndarray:
        return np.array([cdf(float(p)) for p in np.atleast_1d(points)])

    return float(sp_stats.kstest(values, vector_cdf).statistic)


def point_mass_distance(sample: Sequence[float], center: float = 0.0, tolerance: float = 1e-9) -> float:
    """
    相对于 center 处点质量的 KS 距离
    容差带内视为命中；带外样本比例（左右两侧取大者）即为距离
    """
    values = np.asarray(sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySample("KS 距离需要非空样本")
    below = float(np.mean(values < center - tolerance))
    above = float(np.mean(values > center + tolerance))
    return max(below, above)


def two_sample_ks(a: Sequence[float], b: Sequence[float]) -> float:
    """两样本 KS 距离 sup|F̂_a − F̂_b|"""
    left = np.asarray(a, dtype=float).ravel()
    right = np.asarray(b, dtype=float).ravel()
    if left.size == 0 or right.size == 0:
        raise EmptySample("两样本 KS 需要两个非空样本")
    return float(sp_stats.ks_2samp(left, right).statistic)


def ks_threshold(n: int, alpha: float = 0.01, m: Optional[int] = None) -> float:
    """
    KS 渐近临界值 c(α)·√(1/n)（单样本）或 c(α)·√((n+m)/(nm))（两样本）
    c(α) = √(−ln(α/2)/2)，α=0.01 时约 1.63
    """
    if not (0.0 < alpha < 1.0):
        raise OutOfRange(f"显著性水平 α={alpha} 不在 (0, 1) 内", value=alpha)
    if n < 1 or (m is not None and m < 1):
        raise EmptySample("临界值需要正的样本量")
    c_alpha = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    if m is None:
        return c_alpha / math.sqrt(n)
    return c_alpha * math.sqrt((n + m) / (n * m))


# ==================== 回归 ====================

class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def fit_slope(points: Iterable[Tuple[float, float]]) -> SlopeFit:
    """
    普通最小二乘拟合 y = slope·x + intercept

    Raises:
        DegenerateDesign: 点数不足两个或所有 x 相同
    """
    pairs = np.asarray(list(points), dtype=float)
    if pairs.ndim != 2 or pairs.shape[0] < 2:
        raise DegenerateDesign("回归至少需要两个点")
    x, y = pairs[:, 0], pairs[:, 1]
    if np.all(x == x[0]):
        raise DegenerateDesign("所有 x 相同，斜率无法确定")

    result = sp_stats.linregress(x, y)
    if np.all(y == y[0]):
        r_squared = 1.0
    else:
        r_squared = float(result.rvalue) ** 2
    return SlopeFit(float(result.slope), float(result.intercept), r_squared)


def tail_slope(sample: Sequence[float], levels: Sequence[float]) -> SlopeFit:
    """
    对数经验尾 log P̂(X > x) 关于 x 的 OLS 斜率
    尾概率为 0 的水平被跳过；指数尾 e^{−γx} 的斜率约为 −γ
    """
    values = np.sort(np.asarray(sample, dtype=float).ravel())
    if values.size == 0:
        raise EmptySample("尾斜率需要非空样本")
    points: List[Tuple[float, float]] = []
    for level in levels:
        tail = 1.0 - np.searchsorted(values, level, side='right') / values.size
        if tail > 0:
            points.append((float(level), math.log(tail)))
    if len(points) < 2:
        raise DegenerateDesign("尾概率为正的水平少于两个")
    logger.debug(f"尾斜率拟合使用 {len(points)} 个水平")
    return fit_slope(points)


def qq_table(sample: Sequence[float], quantile: Callable[[float], float],
             probabilities: Sequence[float]) -> List[Tuple[float, float, float]]:
    """QQ 表行 (p, 经验分位点, 预测分位点)"""
    values = np.asarray(sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySample("QQ 表需要非空样本")
    rows = []
    for p in probabilities:
        rows.append((float(p), float(np.quantile(values, p)), float(quantile(p))))
    return rows
