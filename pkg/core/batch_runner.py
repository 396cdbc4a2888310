# -*- coding: utf-8 -*-
"""
Module: batch_runner.py
Author: Takeshi
Date: 2026-02-11

Description:
    重复实验调度
    第 r 次重复只使用 substream(master_seed, r) 派生的随机流，结果写入下标 r，
    因此任意并行度（包括 1）得到逐位相同的 SampleSet
"""

import concurrent.futures
import logging
import time
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from defaults.sim_default import SimConfig
from .errors import HorizonTooShort, InvalidParameter, ReplicationError
from .rng import substream
from .sim import (Censored, ForkJoinConfig, Horizon, SampleSet, Statistic, config_digest,
                  sample_hitting_time, sample_max_queue_direct, sample_max_queue_little,
                  sample_max_wait_lindley, sample_max_wait_sup)

logger = logging.getLogger(__name__)

_SAMPLERS: Dict[Statistic, Callable] = {
    Statistic.MAX_WAIT_SUP: sample_max_wait_sup,
    Statistic.MAX_WAIT_LINDLEY: sample_max_wait_lindley,
    Statistic.MAX_QUEUE_LITTLE: sample_max_queue_little,
    Statistic.MAX_QUEUE_DIRECT: sample_max_queue_direct,
}


class BatchRunner:
    """
    单个 (配置, 统计量) 的重复实验执行器

    Attributes:
        config: fork-join 队列配置
        statistic: 要抽样的统计量
        horizon: 截断步数
        level: 命中时间的目标水平，仅 HITTING_TIME 使用
        sim_config: 模拟配置（分块大小、子流分组宽度）
    """

    def __init__(self, config: ForkJoinConfig, statistic: Statistic, horizon: Horizon,
                 level: Optional[float] = None, sim_config: Optional[SimConfig] = None):
        if statistic is Statistic.HITTING_TIME and level is None:
            raise InvalidParameter('level', "命中时间需要指定水平")
        self.config = config
        self.statistic = statistic
        self.horizon = horizon
        self.level = level
        self.sim_config = sim_config or SimConfig()

    def replicate(self, master_seed: int, index: int) -> Tuple[float, bool]:
        """执行第 index 次重复，返回 (值, 是否截尾)"""
        streams = substream(master_seed, index, self.sim_config.group_width)
        try:
            if self.statistic is Statistic.HITTING_TIME:
                result = sample_hitting_time(self.config, self.level, self.horizon, streams, self.sim_config)
                if isinstance(result, Censored):
                    return float(result.steps), True
                return float(result), False
            return float(_SAMPLERS[self.statistic](self.config, self.horizon, streams, self.sim_config)), False
        except HorizonTooShort as e:
            return float(e.steps), True

    def run(self, master_seed: int, replications: int, parallelism: int = 1) -> SampleSet:
        if replications < 1:
            raise InvalidParameter('replications', f"重复次数必须 >= 1，实际为 {replications}")
        parallelism = max(1, int(parallelism))

        values = np.empty(replications)
        censored = np.zeros(replications, dtype=bool)
        started = time.perf_counter()

        if parallelism == 1:
            for r in range(replications):
                values[r], censored[r] = self._guarded(master_seed, r)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=parallelism) as executor:
                future_to_index = {
                    executor.submit(self._guarded, master_seed, r): r
                    for r in range(replications)
                }
                failures = []
                for future in concurrent.futures.as_completed(future_to_index):
                    r = future_to_index[future]
                    try:
                        values[r], censored[r] = future.result()
                    except ReplicationError as e:
                        failures.append(e)
                if failures:
                    raise min(failures, key=lambda e: e.index)

        elapsed = time.perf_counter() - started
        sample_set = SampleSet(
            values=values,
            censored=censored,
            master_seed=master_seed,
            replications=replications,
            config_digest=config_digest(self.config, self.statistic, self.horizon,
                                        {'level': self.level} if self.level is not None else None),
            horizon=self.horizon,
            statistic=self.statistic,
            n_servers=self.config.n_servers,
            extra={'level': self.level} if self.level is not None else {},
        )
        logger.debug(f"{self.statistic.value}: {replications} 次重复完成，耗时 {elapsed:.2f}s，"
                     f"截尾比例 {sample_set.censored_fraction:.4f}")
        if sample_set.censored_fraction > 0:
            logger.warning(f"{self.statistic.value}: {int(censored.sum())}/{replications} 次重复被截尾")
        return sample_set

    def _guarded(self, master_seed: int, index: int) -> Tuple[float, bool]:
        try:
            return self.replicate(master_seed, index)
        except Exception as e:
            logger.error(f"❌ 第 {index} 次重复失败: {e}")
            raise ReplicationError(index, e) from e


def run_batch(config: ForkJoinConfig, statistic: Statistic, horizon: Horizon, master_seed: int,
              replications: int, parallelism: int = 1, level: Optional[float] = None,
              sim_config: Optional[SimConfig] = None) -> SampleSet:
    """
    并行执行 replications 次重复，结果按重复编号排列

    Raises:
        ReplicationError: 编号最小的失败重复，附带原始异常
    """
    runner = BatchRunner(config, statistic, horizon, level=level, sim_config=sim_config)
    return runner.run(master_seed, replications, parallelism)
