# -*- coding: utf-8 -*-
"""
Module: rng.py
Author: Takeshi
Date: 2026-02-04

Description:
    可拆分的随机数流
    子流推导规则（跨版本保持不变）：
        substream(seed, r)            -> SeedSequence(entropy=seed, spawn_key=(r,))
        到达间隔                       -> spawn_key=(r, 0)
        辅助流（Little 计数等）        -> spawn_key=(r, 1)
        第 k 类第 g 组服务器的服务时间  -> spawn_key=(r, 2, k, g)
    位生成器固定为 PCG64
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

RngStream = np.random.Generator

ARRIVAL_KEY = 0
AUXILIARY_KEY = 1
SERVICE_KEY = 2

_SEED_MASK = (1 << 64) - 1


def make_stream(master_seed: int, *key: int) -> RngStream:
    """按 (master_seed, key) 构造确定性的随机流"""
    seq = np.random.SeedSequence(entropy=int(master_seed) & _SEED_MASK,
                                 spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class ReplicationStreams:
    """
    单次重复实验拥有的全部随机流

    到达和各组服务时间来自不同子流，改变 N 时到达序列不会被打乱；
    同一类内第 i 台服务器固定属于第 i // group_width 组，组内按列取数，
    因此服务器数组随 N 嵌套。
    """

    master_seed: int
    replication: int
    group_width: int = 64
    _services: Dict[Tuple[int, int], RngStream] = field(default_factory=dict, repr=False)
    _arrivals: RngStream = field(default=None, repr=False)
    _auxiliary: RngStream = field(default=None, repr=False)

    @property
    def arrivals(self) -> RngStream:
        if self._arrivals is None:
            self._arrivals = make_stream(self.master_seed, self.replication, ARRIVAL_KEY)
        return self._arrivals

    @property
    def auxiliary(self) -> RngStream:
        if self._auxiliary is None:
            self._auxiliary = make_stream(self.master_seed, self.replication, AUXILIARY_KEY)
        return self._auxiliary

    def service_group(self, class_index: int, group: int) -> RngStream:
        key = (class_index, group)
        if key not in self._services:
            self._services[key] = make_stream(
                self.master_seed, self.replication, SERVICE_KEY, class_index, group
            )
        return self._services[key]


def derive_seed(master_seed: int, *key: int) -> int:
    """由 (master_seed, key) 派生另一个 64 位主种子，用于需要互不相交样本的对照实验"""
    seq = np.random.SeedSequence(entropy=int(master_seed) & _SEED_MASK,
                                 spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def substream(master_seed: int, replication: int, group_width: int = 64) -> ReplicationStreams:
    """第 replication 次重复实验的独立子流集合"""
    return ReplicationStreams(master_seed=master_seed, replication=replication,
                              group_width=group_width)
