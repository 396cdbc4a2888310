# -*- coding: utf-8 -*-
"""
Module: sim.py
Author: Takeshi
Date: 2026-02-10

Description:
    N 服务器 fork-join 队列的蒙特卡洛抽样
    - 最大等待时间: 随机游走上确界表示 / Lindley 递推，两种构造互相校验
    - 最大队列长度: 分布 Little 定律 N_A(W) / 直接按任务回溯
    - 命中时间: 最大部分和首次达到给定水平的步数
    所有服务器共享同一到达序列；服务时间按 (类别, 服务器组) 分子流抽取
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from defaults.sim_default import SimConfig
from .dist import (ArrivalSummary, Deterministic, DistributionSpec, arrival_summary,
                   distribution_from_dict)
from .errors import HorizonTooShort, InvalidParameter, Unstable
from .lundberg import LundbergSolution
from .rng import ReplicationStreams, RngStream

logger = logging.getLogger(__name__)


# ==================== 配置类型 ====================

@dataclass(frozen=True)
class ServerClass:
    """同一服务时间分布的一组服务器"""

    service: DistributionSpec
    size: int

    def to_dict(self) -> Dict[str, Any]:
        return {'service': self.service.to_dict(), 'size': self.size}


@dataclass(frozen=True)
class ForkJoinConfig:
    """
    fork-join 队列配置

    Attributes:
        n_servers (int): 服务器总数 N
        arrival (DistributionSpec): 到达间隔分布，所有服务器共享
        classes (Tuple[ServerClass, ...]): 各类服务器，规模之和为 N，同构队列只有一类

    Properties:
        lam: 到达率 1/E[A]
        sigma_A: 到达间隔标准差
    """

    n_servers: int
    arrival: DistributionSpec
    classes: Tuple[ServerClass, ...]

    def __post_init__(self):
        object.__setattr__(self, 'classes', tuple(self.classes))
        if not self.classes:
            raise InvalidParameter('classes', "至少需要一个服务器类别")
        for k, server_class in enumerate(self.classes):
            if server_class.size < 1:
                raise InvalidParameter(f'classes[{k}].size', f"类别规模必须 >= 1，实际为 {server_class.size}")
        total = sum(c.size for c in self.classes)
        if total != self.n_servers:
            raise InvalidParameter('n_servers', f"类别规模之和 {total} 不等于 N={self.n_servers}")
        for k, server_class in enumerate(self.classes):
            if server_class.service.mean >= self.arrival.mean:
                raise Unstable(f"第 {k} 类 E[S]={server_class.service.mean} >= E[A]={self.arrival.mean}")

    @property
    def summary(self) -> ArrivalSummary:
        return arrival_summary(self.arrival)

    @property
    def lam(self) -> float:
        return self.summary.lam

    @property
    def sigma_A(self) -> float:
        return self.summary.sigma_A

    @classmethod
    def homogeneous(cls, n_servers: int, service: DistributionSpec,
                    arrival: DistributionSpec) -> 'ForkJoinConfig':
        return cls(n_servers=n_servers, arrival=arrival, classes=(ServerClass(service, n_servers),))

    @classmethod
    def from_alphas(cls, n_servers: int, services: Sequence[DistributionSpec], alphas: Sequence[float],
                    arrival: DistributionSpec) -> 'ForkJoinConfig':
        """按 α_k·N 取整分配类别规模，最大余数法修正使总和为 N"""
        sizes = class_sizes(n_servers, alphas)
        return cls(n_servers=n_servers, arrival=arrival,
                   classes=tuple(ServerClass(s, m) for s, m in zip(services, sizes)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_servers': self.n_servers,
            'arrival': self.arrival.to_dict(),
            'classes': [c.to_dict() for c in self.classes],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ForkJoinConfig':
        classes = tuple(ServerClass(distribution_from_dict(c['service']), int(c['size']))
                        for c in data['classes'])
        return cls(n_servers=int(data['n_servers']),
                   arrival=distribution_from_dict(data['arrival']), classes=classes)


def class_sizes(n_servers: int, alphas: Sequence[float]) -> List[int]:
    """
    最大余数法: 先取 floor(α_k·N)，剩余名额按小数部分从大到小分配，并列时取靠前的类别

    Example:
        >>> class_sizes(10, [0.25, 0.25, 0.5])
        [3, 2, 5]
    """
    if not alphas:
        raise InvalidParameter('alphas', "至少需要一个类别占比")
    total = math.fsum(alphas)
    if abs(total - 1.0) > 1e-9:
        raise InvalidParameter('alphas', f"类别占比之和为 {total}，应为 1")
    quotas = [a * n_servers for a in alphas]
    sizes = [int(math.floor(q)) for q in quotas]
    remaining = n_servers - sum(sizes)
    order = sorted(range(len(alphas)), key=lambda k: (-(quotas[k] - sizes[k]), k))
    for k in order[:remaining]:
        sizes[k] += 1
    for k, size in enumerate(sizes):
        if size < 1:
            raise InvalidParameter(f'alphas[{k}]', f"N={n_servers} 时该类别规模为 0")
    return sizes


@dataclass(frozen=True)
class Horizon:
    """随机游走上确界 / Lindley 递推的截断步数 K"""

    steps: int
    safety_factor: float = 10.0

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidParameter('steps', f"截断步数必须 >= 1，实际为 {self.steps}")

    def doubled(self) -> 'Horizon':
        return Horizon(self.steps * 2, self.safety_factor)

    def to_dict(self) -> Dict[str, Any]:
        return {'steps': self.steps, 'safety_factor': self.safety_factor}


def default_horizon(solution: LundbergSolution, n_servers: int,
                    sim_config: Optional[SimConfig] = None) -> Horizon:
    """K = max(min_steps, ceil(safety_factor · ĉ · log N))"""
    sim_config = sim_config or SimConfig()
    raw = sim_config.safety_factor * solution.c_hat * math.log(n_servers)
    steps = max(sim_config.min_steps, int(math.ceil(raw)))
    return Horizon(steps=steps, safety_factor=sim_config.safety_factor)


@dataclass(frozen=True)
class Censored:
    """截尾的命中时间: 在 steps 步内没有达到水平"""

    steps: int


class Statistic(str, Enum):
    MAX_WAIT_SUP = 'max-wait-sup'
    MAX_WAIT_LINDLEY = 'max-wait-lindley'
    MAX_QUEUE_LITTLE = 'max-queue-little'
    MAX_QUEUE_DIRECT = 'max-queue-direct'
    HITTING_TIME = 'hitting-time'

    @property
    def kind(self) -> str:
        if self in (Statistic.MAX_WAIT_SUP, Statistic.MAX_WAIT_LINDLEY):
            return 'MaxWait'
        if self in (Statistic.MAX_QUEUE_LITTLE, Statistic.MAX_QUEUE_DIRECT):
            return 'MaxQueue'
        return 'HittingTime'


@dataclass
class SampleSet:
    """
    带完整来源信息的重复实验样本

    values[r] 是第 r 次重复的结果；censored[r] 为 True 时 values[r] 记为截断步数
    """

    values: np.ndarray
    censored: np.ndarray
    master_seed: int
    replications: int
    config_digest: str
    horizon: Horizon
    statistic: Statistic
    n_servers: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def uncensored(self) -> np.ndarray:
        return self.values[~self.censored]

    @property
    def censored_fraction(self) -> float:
        if self.values.size == 0:
            return 0.0
        return float(np.mean(self.censored))

    @property
    def mean(self) -> float:
        """未截尾样本的均值，全部截尾时为 nan"""
        kept = self.uncensored
        return float(np.mean(kept)) if kept.size else math.nan

    def manifest(self) -> Dict[str, Any]:
        return {
            'master_seed': self.master_seed,
            'replications': self.replications,
            'config_digest': self.config_digest,
            'horizon': self.horizon.to_dict(),
            'statistic': self.statistic.value,
            'kind': self.statistic.kind,
            'n_servers': self.n_servers,
            'censored_fraction': self.censored_fraction,
            **self.extra,
        }


def config_digest(config: ForkJoinConfig, statistic: Statistic, horizon: Horizon,
                  extra: Optional[Dict[str, Any]] = None) -> str:
    """配置的 sha256 摘要（规范化 JSON，键排序）"""
    document = {
        'config': config.to_dict(),
        'statistic': statistic.value,
        'horizon': horizon.to_dict(),
        'extra': extra or {},
    }
    canonical = json.dumps(document, sort_keys=True, separators=(',', ':'), ensure_ascii=True)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


# ==================== 随机块 ====================

def _arrival_block(config: ForkJoinConfig, streams: ReplicationStreams, rows: int) -> np.ndarray:
    return np.asarray(config.arrival.sample_array(streams.arrivals, rows), dtype=float)


def _service_block(config: ForkJoinConfig, streams: ReplicationStreams, rows: int) -> np.ndarray:
    """
    (rows, N) 的服务时间块
    每个组总是抽满 group_width 列再截取，组内第 c 列固定对应同一台服务器
    """
    width = streams.group_width
    parts = []
    for k, server_class in enumerate(config.classes):
        groups = -(-server_class.size // width)
        blocks = [server_class.service.sample_array(streams.service_group(k, g), (rows, width))
                  for g in range(groups)]
        parts.append(np.hstack(blocks)[:, :server_class.size])
    return np.hstack(parts) if len(parts) > 1 else parts[0]


def _lindley_block(waits: np.ndarray, arrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """
    一个块内逐步的 Lindley 等待时间，第 j 行为第 j 步之后的值

    P = w0 + 累积和，W_n = P_n − min(0, min_{j<=n} P_j)，与逐步 max(0, ·) 递推等价
    """
    paths = np.cumsum(services - arrivals[:, None], axis=0) + waits
    return paths - np.minimum(np.minimum.accumulate(paths, axis=0), 0.0)


def _chunks(steps: int, rows: int):
    start = 0
    while start < steps:
        size = min(rows, steps - start)
        yield start, size
        start += size


# ==================== 最大等待时间 ====================

def sample_max_wait_sup(config: ForkJoinConfig, horizon: Horizon, streams: ReplicationStreams,
                        sim_config: Optional[SimConfig] = None) -> float:
    """
    max_i max_{0<=k<=K} Σ_{j<=k} (S_i(j) − A(j))

    k=0 的空和贡献 0，结果非负；按 chunk_rows 分块累加，不构造 N×K 矩阵
    """
    sim_config = sim_config or SimConfig()
    sums = np.zeros(config.n_servers)
    best = 0.0
    for _, rows in _chunks(horizon.steps, sim_config.chunk_rows):
        arrivals = _arrival_block(config, streams, rows)
        services = _service_block(config, streams, rows)
        paths = np.cumsum(services - arrivals[:, None], axis=0) + sums
        best = max(best, float(paths.max()))
        sums = paths[-1]
    return best


def sample_max_wait_lindley(config: ForkJoinConfig, horizon: Horizon, streams: ReplicationStreams,
                            sim_config: Optional[SimConfig] = None) -> float:
    """W_i(n+1) = max(0, W_i(n) + S_i(n) − A(n))，W_i(1) = 0，返回 max_i W_i(K+1)"""
    sim_config = sim_config or SimConfig()
    waits = np.zeros(config.n_servers)
    for _, rows in _chunks(horizon.steps, sim_config.chunk_rows):
        arrivals = _arrival_block(config, streams, rows)
        services = _service_block(config, streams, rows)
        waits = _lindley_block(waits, arrivals, services)[-1]
    return float(waits.max())


def sample_window_maxima(config: ForkJoinConfig, horizon: Horizon, boundaries: Sequence[int],
                         streams: ReplicationStreams, sim_config: Optional[SimConfig] = None) -> np.ndarray:
    """
    同一条路径上各步窗口 [b_m, b_{m+1}) 内的最大部分和

    boundaries 严格递增，首项 0、末项不超过 K+1；k=0 的空和属于第一个窗口。
    没有任何步的窗口取 -inf
    """
    sim_config = sim_config or SimConfig()
    edges = [int(b) for b in boundaries]
    if len(edges) < 2 or edges[0] != 0 or any(b >= c for b, c in zip(edges, edges[1:])):
        raise InvalidParameter('boundaries', f"窗口边界必须从 0 开始严格递增，实际为 {edges}")
    if edges[-1] > horizon.steps + 1:
        raise InvalidParameter('boundaries', f"窗口边界超出截断步数 K={horizon.steps}")

    maxima = np.full(len(edges) - 1, -np.inf)
    maxima[0] = 0.0
    sums = np.zeros(config.n_servers)
    for start, rows in _chunks(min(horizon.steps, edges[-1] - 1), sim_config.chunk_rows):
        arrivals = _arrival_block(config, streams, rows)
        services = _service_block(config, streams, rows)
        paths = np.cumsum(services - arrivals[:, None], axis=0) + sums
        row_max = paths.max(axis=1)
        steps = np.arange(start + 1, start + rows + 1)
        window = np.searchsorted(edges, steps, side='right') - 1
        for m in np.unique(window):
            maxima[m] = max(maxima[m], float(row_max[window == m].max()))
        sums = paths[-1]
    return maxima


def window_max_wait(config: ForkJoinConfig, horizon: Horizon, k1: int, k2: int,
                    streams: ReplicationStreams, sim_config: Optional[SimConfig] = None) -> float:
    """步窗口 [k1, k2) 内的最大部分和"""
    if not 0 <= k1 < k2:
        raise InvalidParameter('k1', f"需要 0 <= k1 < k2，实际 k1={k1}, k2={k2}")
    edges = [0, k1, k2] if k1 > 0 else [0, k2]
    maxima = sample_window_maxima(config, horizon, edges, streams, sim_config)
    return float(maxima[-1])


# ==================== 最大队列长度 ====================

def count_arrivals(arrival: DistributionSpec, t: float, stream: RngStream, chunk: int = 1024) -> int:
    """
    N_A(t): 满足 Σ_{j<=n} Â(j) <= t 的最大 n，Â 为新抽取的独立到达间隔

    确定性到达不消耗随机数
    """
    if t <= 0:
        return 0
    if isinstance(arrival, Deterministic):
        step = float(arrival.value)
        n = int(math.floor(t / step))
        while (n + 1) * step <= t:
            n += 1
        while n > 0 and n * step > t:
            n -= 1
        return n

    count = 0
    elapsed = 0.0
    while True:
        epochs = np.cumsum(arrival.sample_array(stream, chunk)) + elapsed
        hits = int(np.searchsorted(epochs, t, side='right'))
        if hits < chunk:
            return count + hits
        count += chunk
        elapsed = float(epochs[-1])


def sample_max_queue_little(config: ForkJoinConfig, horizon: Horizon, streams: ReplicationStreams,
                            sim_config: Optional[SimConfig] = None) -> int:
    """N_A(max_i W_i)，到达计数使用独立的辅助子流"""
    sim_config = sim_config or SimConfig()
    wait = sample_max_wait_sup(config, horizon, streams, sim_config)
    return count_arrivals(config.arrival, wait, streams.auxiliary, sim_config.arrival_chunk)


def sample_max_queue_direct(config: ForkJoinConfig, horizon: Horizon, streams: ReplicationStreams,
                            sim_config: Optional[SimConfig] = None) -> int:
    """
    按任务回溯的最大队列长度

    前推 K 个任务（共享到达），记录每个任务在各队列中的最大等待时间 M(m) 和到达时刻 τ_m。
    观测时刻 t 取第 K+1 个任务到达前的瞬间，第 j 个最近任务为 K−j+1，已过时间
    T(j) = t − τ_{K−j+1}；返回满足 M(K−j+1) >= T(j) 的最大 j。
    队列长度不计正在服务的任务。

    Raises:
        HorizonTooShort: j 等于 K，最早的任务仍在排队
    """
    sim_config = sim_config or SimConfig()
    steps = horizon.steps
    max_waits = np.empty(steps)
    epochs = np.empty(steps + 1)
    epochs[0] = 0.0
    waits = np.zeros(config.n_servers)
    for start, rows in _chunks(steps, sim_config.chunk_rows):
        arrivals = _arrival_block(config, streams, rows)
        services = _service_block(config, streams, rows)
        block = _lindley_block(waits, arrivals, services)
        # 第 m 个任务看到的是它到达前的等待时间
        max_waits[start] = waits.max()
        max_waits[start + 1:start + rows] = block[:-1].max(axis=1)
        epochs[start + 1:start + rows + 1] = epochs[start] + np.cumsum(arrivals)
        waits = block[-1]

    elapsed = epochs[steps] - epochs[:steps]
    waiting = np.nonzero(max_waits >= elapsed)[0]
    if waiting.size == 0:
        return 0
    queue = steps - int(waiting[0])
    if queue >= steps:
        raise HorizonTooShort(f"队列长度达到截断步数 K={steps}，尚未进入稳态", steps=steps)
    return queue


# ==================== 命中时间 ====================

def sample_hitting_time(config: ForkJoinConfig, level: float, horizon: Horizon,
                        streams: ReplicationStreams,
                        sim_config: Optional[SimConfig] = None) -> Union[int, Censored]:
    """
    τ = inf{k >= 0: max_i Σ_{j<=k} (S_i(j) − A(j)) >= level}

    确定性到达时增量即为 S_i(j) − 1/λ；K 步内未达到返回 Censored(K)
    """
    if level < 0:
        raise InvalidParameter('level', f"水平必须非负，实际为 {level}")
    if level == 0:
        return 0
    sim_config = sim_config or SimConfig()
    sums = np.zeros(config.n_servers)
    for start, rows in _chunks(horizon.steps, sim_config.chunk_rows):
        arrivals = _arrival_block(config, streams, rows)
        services = _service_block(config, streams, rows)
        paths = np.cumsum(services - arrivals[:, None], axis=0) + sums
        reached = np.nonzero(paths.max(axis=1) >= level)[0]
        if reached.size:
            return start + int(reached[0]) + 1
        sums = paths[-1]
    return Censored(horizon.steps)
