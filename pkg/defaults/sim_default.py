# -*- coding: utf-8 -*-
"""
Module: sim_default.py
Author: Takeshi
Date: 2026-02-09

Description:
    蒙特卡洛模拟默认配置
"""

from dataclasses import dataclass


@dataclass
class SimConfig:
    """
    蒙特卡洛模拟配置类

    控制截断步数、分块抽样大小、随机子流的分组方式和重复实验的并行度。
    修改 group_width 会改变服务时间的子流划分，同一种子下的结果不再可比。

    Attributes:
        safety_factor (float): 截断安全系数
            截断步数 K = max(min_steps, ceil(safety_factor · ĉ · log N))
            命中时间的量级为 ĉ·log N，超出 (ĉ+ε)log N 的窗口贡献可忽略
            默认: 10.0

        min_steps (int): 截断步数下限
            默认: 1000

        chunk_rows (int): 上确界抽样的分块行数
            每块抽取 (chunk_rows, N) 的服务时间矩阵后累加，内存为 O(chunk_rows · N)
            设置太大占用内存，设置太小 numpy 调用开销上升
            默认: 256

        group_width (int): 服务器分组宽度
            第 k 类第 i 台服务器的服务时间来自子流 (r, 2, k, i // group_width)
            默认: 64

        parallelism (int): 重复实验的默认并行线程数
            结果与并行度无关，只影响耗时
            默认: 1

        arrival_chunk (int): 到达计数时每次抽取的到达间隔个数
            默认: 1024

    Methods:
        to_dict() -> dict:
            将配置转换为字典格式

        from_dict(config_dict: dict) -> 'SimConfig':
            从字典创建配置实例，缺失字段使用默认值

        get_default_config() -> 'SimConfig':
            获取默认配置实例

    Example:
        >>> config = SimConfig(safety_factor=20.0, parallelism=8)
        >>> SimConfig.from_dict(config.to_dict()).parallelism
        8
    """

    safety_factor: float = 10.0     # 截断安全系数
    min_steps: int = 1000           # 截断步数下限
    chunk_rows: int = 256           # 分块行数
    group_width: int = 64           # 服务器分组宽度
    parallelism: int = 1            # 并行线程数
    arrival_chunk: int = 1024       # 到达计数分块

    @classmethod
    def from_dict(cls, config_dict: dict) -> 'SimConfig':
        """从字典创建配置实例，字典中没有的字段使用默认值"""
        default_instance = cls()

        return cls(
            safety_factor=config_dict.get('safety_factor', default_instance.safety_factor),
            min_steps=config_dict.get('min_steps', default_instance.min_steps),
            chunk_rows=config_dict.get('chunk_rows', default_instance.chunk_rows),
            group_width=config_dict.get('group_width', default_instance.group_width),
            parallelism=config_dict.get('parallelism', default_instance.parallelism),
            arrival_chunk=config_dict.get('arrival_chunk', default_instance.arrival_chunk),
        )

    def to_dict(self) -> dict:
        return {
            'safety_factor': self.safety_factor,
            'min_steps': self.min_steps,
            'chunk_rows': self.chunk_rows,
            'group_width': self.group_width,
            'parallelism': self.parallelism,
            'arrival_chunk': self.arrival_chunk,
        }

    @classmethod
    def get_default_config(cls) -> 'SimConfig':
        return cls()
