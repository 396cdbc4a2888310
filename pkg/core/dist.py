# -*- coding: utf-8 -*-
"""
Module: dist.py
Author: Takeshi
Date: 2026-02-04

Description:
    服务时间 / 到达间隔分布模型
    提供精确矩、抽样、对数矩母函数（CGF）及其一二阶导数
    CGF 超出定义域时返回 OUT_OF_DOMAIN（+inf），而不是抛出异常，便于求根时夹逼
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, ClassVar, Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidParameter
from .rng import RngStream

logger = logging.getLogger(__name__)

# CGF 定义域外的标记值
OUT_OF_DOMAIN = math.inf

# 权重和的容差
WEIGHT_TOLERANCE = 1e-12

Size = Optional[Union[int, Tuple[int, ...]]]


class Family(str, Enum):
    DETERMINISTIC = 'deterministic'
    EXPONENTIAL = 'exponential'
    GAMMA = 'gamma'
    UNIFORM = 'uniform'
    HYPEREXPONENTIAL = 'hyperexponential'
    EMPIRICAL = 'empirical'


def _require_positive(field: str, value: float):
    if (isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, float, np.integer, np.floating))
            or not math.isfinite(value) or value <= 0):
        raise InvalidParameter(field, f"必须为正有限数，实际为 {value!r}")


# ==================== 均匀分布 CGF 辅助函数 ====================
# U ~ Uniform(0, 1) 的 K_U(s) = log((e^s - 1) / s)，小 |s| 用级数避免抵消误差

_SERIES_CUTOFF = 1e-3


def _uniform01_cgf(s: float) -> float:
    if abs(s) < _SERIES_CUTOFF:
        return s / 2 + s * s / 24 - s ** 4 / 2880
    if s > 0:
        return s + math.log(-math.expm1(-s)) - math.log(s)
    return math.log(math.expm1(s) / s)


def _uniform01_cgf_d1(s: float) -> float:
    if abs(s) < _SERIES_CUTOFF:
        return 0.5 + s / 12 - s ** 3 / 720
    if s > 0:
        return 1.0 / (-math.expm1(-s)) - 1.0 / s
    return math.exp(s) / math.expm1(s) - 1.0 / s


def _uniform01_cgf_d2(s: float) -> float:
    if abs(s) < _SERIES_CUTOFF:
        return 1.0 / 12 - s * s / 240 + s ** 4 / 6048
    half = abs(s) / 2
    if half > 350:
        return 1.0 / (s * s)
    return 1.0 / (s * s) - 1.0 / (4.0 * math.sinh(half) ** 2)


# ==================== 分布基类 ====================

@dataclass(frozen=True)
class DistributionSpec:
    """
    非负分布的统一接口

    子类为不可变 dataclass，可在线程间共享；RngStream 由调用方独占。

    Methods:
        validate() -> DistributionSpec: 检查参数不变量，返回自身
        moments() -> (mean, variance): 精确均值与方差
        sample(stream) -> float: 单次抽样
        sample_array(stream, size) -> ndarray: 向量化抽样
        log_mgf(theta) -> float: log E[exp(θX)]，域外返回 OUT_OF_DOMAIN
        log_mgf_derivatives(theta) -> (d1, d2): CGF 的一二阶导数
    """

    family: ClassVar[Family]

    def __post_init__(self):
        self._check()

    def _check(self):
        raise NotImplementedError

    def validate(self) -> 'DistributionSpec':
        self._check()
        return self

    def moments(self) -> Tuple[float, float]:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        return self.moments()[0]

    @property
    def theta_sup(self) -> float:
        """CGF 定义域上确界"""
        return math.inf

    @property
    def ess_sup(self) -> float:
        """支撑集上端点"""
        return math.inf

    @property
    def ess_inf(self) -> float:
        """支撑集下端点"""
        return 0.0

    @property
    def is_degenerate(self) -> bool:
        return self.moments()[1] == 0.0

    def sample(self, stream: RngStream) -> float:
        return float(self.sample_array(stream, None))

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        raise NotImplementedError

    def log_mgf(self, theta: float) -> float:
        if theta == 0:
            return 0.0
        if theta >= self.theta_sup:
            return OUT_OF_DOMAIN
        return self._log_mgf(theta)

    def _log_mgf(self, theta: float) -> float:
        raise NotImplementedError

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        """CGF 在 θ 处的一二阶导数，调用方需保证 θ < theta_sup"""
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Deterministic(DistributionSpec):
    value: float
    family: ClassVar[Family] = Family.DETERMINISTIC

    def _check(self):
        _require_positive('value', self.value)

    def moments(self) -> Tuple[float, float]:
        return float(self.value), 0.0

    @property
    def ess_sup(self) -> float:
        return float(self.value)

    @property
    def ess_inf(self) -> float:
        return float(self.value)

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        if size is None:
            return float(self.value)
        return np.full(size, float(self.value))

    def _log_mgf(self, theta: float) -> float:
        return theta * self.value

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        return float(self.value), 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'value': self.value}


@dataclass(frozen=True)
class Exponential(DistributionSpec):
    rate: float
    family: ClassVar[Family] = Family.EXPONENTIAL

    def _check(self):
        _require_positive('rate', self.rate)

    def moments(self) -> Tuple[float, float]:
        return 1.0 / self.rate, 1.0 / self.rate ** 2

    @property
    def theta_sup(self) -> float:
        return float(self.rate)

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        return stream.exponential(1.0 / self.rate, size)

    def _log_mgf(self, theta: float) -> float:
        return -math.log1p(-theta / self.rate)

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        gap = self.rate - theta
        return 1.0 / gap, 1.0 / (gap * gap)

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'rate': self.rate}


@dataclass(frozen=True)
class Gamma(DistributionSpec):
    """Gamma(shape, rate)，numpy 的 gamma 抽样对任意 shape > 0 都是精确的"""

    shape: float
    rate: float
    family: ClassVar[Family] = Family.GAMMA

    def _check(self):
        _require_positive('shape', self.shape)
        _require_positive('rate', self.rate)

    def moments(self) -> Tuple[float, float]:
        return self.shape / self.rate, self.shape / self.rate ** 2

    @property
    def theta_sup(self) -> float:
        return float(self.rate)

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        return stream.gamma(self.shape, 1.0 / self.rate, size)

    def _log_mgf(self, theta: float) -> float:
        return -self.shape * math.log1p(-theta / self.rate)

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        gap = self.rate - theta
        return self.shape / gap, self.shape / (gap * gap)

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'shape': self.shape, 'rate': self.rate}


@dataclass(frozen=True)
class Uniform(DistributionSpec):
    lo: float
    hi: float
    family: ClassVar[Family] = Family.UNIFORM

    def _check(self):
        _require_positive('lo', self.lo)
        _require_positive('hi', self.hi)
        if not self.lo < self.hi:
            raise InvalidParameter('hi', f"需要 lo < hi，实际 lo={self.lo}, hi={self.hi}")

    def moments(self) -> Tuple[float, float]:
        width = self.hi - self.lo
        return (self.lo + self.hi) / 2, width * width / 12

    @property
    def ess_sup(self) -> float:
        return float(self.hi)

    @property
    def ess_inf(self) -> float:
        return float(self.lo)

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        return stream.uniform(self.lo, self.hi, size)

    def _log_mgf(self, theta: float) -> float:
        width = self.hi - self.lo
        return theta * self.lo + _uniform01_cgf(theta * width)

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        width = self.hi - self.lo
        s = theta * width
        return self.lo + width * _uniform01_cgf_d1(s), width * width * _uniform01_cgf_d2(s)

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'lo': self.lo, 'hi': self.hi}


@dataclass(frozen=True)
class HyperExponential(DistributionSpec):
    weights: Tuple[float, ...]
    rates: Tuple[float, ...]
    family: ClassVar[Family] = Family.HYPEREXPONENTIAL

    def __post_init__(self):
        object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))
        object.__setattr__(self, 'rates', tuple(float(r) for r in self.rates))
        super().__post_init__()

    def _check(self):
        if not self.weights or len(self.weights) != len(self.rates):
            raise InvalidParameter('weights', "weights 与 rates 长度必须一致且非空")
        for i, w in enumerate(self.weights):
            _require_positive(f'weights[{i}]', w)
        for i, r in enumerate(self.rates):
            _require_positive(f'rates[{i}]', r)
        total = math.fsum(self.weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidParameter('weights', f"权重和为 {total}，应为 1")

    def moments(self) -> Tuple[float, float]:
        mean = math.fsum(w / r for w, r in zip(self.weights, self.rates))
        second = math.fsum(2.0 * w / (r * r) for w, r in zip(self.weights, self.rates))
        return mean, second - mean * mean

    @property
    def theta_sup(self) -> float:
        return min(self.rates)

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        # 每个元素固定消耗两个相邻均匀数，样本值与块大小无关
        shape = () if size is None else ((int(size),) if isinstance(size, (int, np.integer)) else tuple(size))
        u = stream.random((*shape, 2))
        cumulative = np.cumsum(self.weights)
        phase = np.minimum(np.searchsorted(cumulative, u[..., 0], side='right'), len(self.rates) - 1)
        return -np.log1p(-u[..., 1]) / np.asarray(self.rates)[phase]

    def _mgf_terms(self, theta: float) -> Tuple[float, float, float]:
        m0 = m1 = m2 = 0.0
        for w, r in zip(self.weights, self.rates):
            gap = r - theta
            m0 += w * r / gap
            m1 += w * r / gap ** 2
            m2 += 2.0 * w * r / gap ** 3
        return m0, m1, m2

    def _log_mgf(self, theta: float) -> float:
        return math.log(self._mgf_terms(theta)[0])

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        m0, m1, m2 = self._mgf_terms(theta)
        d1 = m1 / m0
        return d1, m2 / m0 - d1 * d1

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value,
                'weights': list(self.weights), 'rates': list(self.rates)}


@dataclass(frozen=True, eq=False)
class Empirical(DistributionSpec):
    """
    经验分布：有放回均匀重抽样，CGF 为经验 CGF
    指数权重统一做最大值平移，防止溢出
    """

    points: np.ndarray
    family: ClassVar[Family] = Family.EMPIRICAL

    def __post_init__(self):
        array = np.array(self.points, dtype=float).ravel()
        array.setflags(write=False)
        object.__setattr__(self, 'points', array)
        super().__post_init__()

    def _check(self):
        if self.points.size == 0:
            raise InvalidParameter('points', "经验样本不能为空")
        if not np.all(np.isfinite(self.points)) or np.any(self.points < 0):
            raise InvalidParameter('points', "经验样本必须为非负有限数")

    def moments(self) -> Tuple[float, float]:
        return float(np.mean(self.points)), float(np.var(self.points))

    @property
    def ess_sup(self) -> float:
        return float(np.max(self.points))

    @property
    def ess_inf(self) -> float:
        return float(np.min(self.points))

    def sample_array(self, stream: RngStream, size: Size) -> Any:
        # 每个元素消耗一个均匀数；integers 的 32 位缓冲会让样本依赖调用的块大小
        n = self.points.size
        index = np.minimum((stream.random(size) * n).astype(np.int64), n - 1)
        return self.points[index]

    def _log_mgf(self, theta: float) -> float:
        return float(logsumexp(theta * self.points) - math.log(self.points.size))

    def tilted_weights(self, theta: float) -> np.ndarray:
        """指数倾斜后的概率权重"""
        exponent = theta * self.points
        weights = np.exp(exponent - np.max(exponent))
        return weights / np.sum(weights)

    def log_mgf_derivatives(self, theta: float) -> Tuple[float, float]:
        weights = self.tilted_weights(theta)
        d1 = float(np.dot(weights, self.points))
        centred = self.points - d1
        return d1, float(np.dot(weights, centred * centred))

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'points': self.points.tolist()}


# ==================== 到达过程摘要 ====================

@dataclass(frozen=True)
class ArrivalSummary:
    """到达率 λ = 1/E[A]，σ_A = Std(A)"""

    lam: float
    sigma_A: float
    mean: float


def arrival_summary(spec: DistributionSpec) -> ArrivalSummary:
    mean, variance = spec.moments()
    if mean <= 0:
        raise InvalidParameter('arrival', "到达间隔均值必须为正")
    return ArrivalSummary(lam=1.0 / mean, sigma_A=math.sqrt(max(variance, 0.0)), mean=mean)


# ==================== JSON 编解码 ====================

_FAMILY_CLASSES = {
    Family.DETERMINISTIC: Deterministic,
    Family.EXPONENTIAL: Exponential,
    Family.GAMMA: Gamma,
    Family.UNIFORM: Uniform,
    Family.HYPEREXPONENTIAL: HyperExponential,
    Family.EMPIRICAL: Empirical,
}

_FAMILY_KEYS = {
    Family.DETERMINISTIC: ('value',),
    Family.EXPONENTIAL: ('rate',),
    Family.GAMMA: ('shape', 'rate'),
    Family.UNIFORM: ('lo', 'hi'),
    Family.HYPEREXPONENTIAL: ('weights', 'rates'),
    Family.EMPIRICAL: ('points',),
}


def distribution_from_dict(data: Dict[str, Any]) -> DistributionSpec:
    """
    从 JSON 字典构造分布

    Example:
        >>> distribution_from_dict({"family": "exponential", "rate": 2.0})
        Exponential(rate=2.0)

    Raises:
        InvalidParameter: 未知族、缺少键或出现未知键
    """
    if not isinstance(data, dict) or 'family' not in data:
        raise InvalidParameter('family', "分布描述必须是含 family 键的对象")
    try:
        family = Family(str(data['family']).lower())
    except ValueError:
        raise InvalidParameter('family', f"未知分布族: {data['family']}")

    keys = _FAMILY_KEYS[family]
    unknown = set(data) - set(keys) - {'family'}
    if unknown:
        raise InvalidParameter(sorted(unknown)[0], f"{family.value} 不接受该键")
    missing = [k for k in keys if k not in data]
    if missing:
        raise InvalidParameter(missing[0], f"{family.value} 缺少该键")

    return _FAMILY_CLASSES[family](**{k: data[k] for k in keys})


def validate(spec: DistributionSpec) -> DistributionSpec:
    return spec.validate()


def moments(spec: DistributionSpec) -> Tuple[float, float]:
    return spec.moments()


def sample(spec: DistributionSpec, stream: RngStream) -> float:
    return spec.sample(stream)


def log_mgf(spec: DistributionSpec, theta: float) -> float:
    return spec.log_mgf(theta)
