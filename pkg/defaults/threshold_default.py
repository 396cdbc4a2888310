# -*- coding: utf-8 -*-
"""
Module: threshold_default.py
Author: Takeshi
Date: 2026-02-09

Description:
    统计校验阈值默认配置
"""

import math
from dataclasses import dataclass


@dataclass
class ThresholdConfig:
    """
    统计校验阈值配置类

    极限定理的收敛速度只有 1/√(log N)，这里的阈值都偏宽松。
    两样本 KS 阈值以 n=1e5 时的 0.0073 为基准，其余样本量按 c(α)·√(2/n) 缩放。

    Attributes:
        ks_alpha (float): KS 检验的显著性水平
            默认: 0.01

        sampler_ks (float): 两种抽样器等价性（两样本 KS）在 n=1e5 时的阈值
            默认: 0.0073

        theorem_ks (float): 标准化最大等待时间与正态极限的 KS 阈值
            默认: 0.10

        shape_trend_allowance (float): N 增大时极限形状 KS 距离允许的上升量
            默认: 0.01

        queue_ks (float): 最大队列长度与正态极限的 KS 阈值
            默认: 0.12

        hetero_ks (float): 多类别主导类极限的 KS 阈值
            默认: 0.12

        censored_limit (float): 截尾比例上限
            默认: 0.01

        sandwich_band (float): 上下界分布夹逼检查的容差带
            默认: 0.05

        truncation_tolerance (float): 截断步数加倍后均值的相对变化上限
            默认: 0.005

        point_mass_tolerance (float): 退化分布的命中容差带
            默认: 1e-9

        hitting_tolerance (float): 命中时间均值 / log N 与 ĉ 的相对误差上限
            默认: 0.15

        tail_slope_tolerance (float): 尾斜率与 −γ 的相对误差上限
            默认: 0.05

        centering_tolerance (float): 均值对 log N 斜率与 1/γ 的相对误差上限
            默认: 0.10

        residual_tolerance (float): 根残差 |Λ(γ)| 上限
            默认: 1e-12

        duality_tolerance (float): |Λ*(Λ'(γ)) − γΛ'(γ)| 上限
            默认: 1e-8

        derivative_tolerance (float): 解析导数与中心差分的相对误差上限
            默认: 1e-5
    """

    ks_alpha: float = 0.01
    sampler_ks: float = 0.0073
    theorem_ks: float = 0.10
    shape_trend_allowance: float = 0.01
    queue_ks: float = 0.12
    hetero_ks: float = 0.12
    censored_limit: float = 0.01
    sandwich_band: float = 0.05
    truncation_tolerance: float = 0.005
    point_mass_tolerance: float = 1e-9
    hitting_tolerance: float = 0.15
    tail_slope_tolerance: float = 0.05
    centering_tolerance: float = 0.10
    residual_tolerance: float = 1e-12
    duality_tolerance: float = 1e-8
    derivative_tolerance: float = 1e-5

    def sampler_ks_for(self, n: int) -> float:
        """样本量 n（每组）下的两样本 KS 阈值，按 √(1e5/n) 缩放基准值"""
        return self.sampler_ks * math.sqrt(1e5 / max(n, 1))

    def shape_ks_for(self, base: float, n: int, reference_n: int = 2000) -> float:
        """
        单样本 KS 阈值从参考样本量 reference_n 换算到 n
        保留基准值中的偏差余量，只替换抽样噪声项 c(α)/√n
        """
        c_alpha = math.sqrt(-math.log(self.ks_alpha / 2.0) / 2.0)
        return base + c_alpha * (1.0 / math.sqrt(max(n, 1)) - 1.0 / math.sqrt(reference_n))

    @classmethod
    def from_dict(cls, config_dict: dict) -> 'ThresholdConfig':
        default_instance = cls()

        return cls(
            ks_alpha=config_dict.get('ks_alpha', default_instance.ks_alpha),
            sampler_ks=config_dict.get('sampler_ks', default_instance.sampler_ks),
            theorem_ks=config_dict.get('theorem_ks', default_instance.theorem_ks),
            shape_trend_allowance=config_dict.get('shape_trend_allowance',
                                                  default_instance.shape_trend_allowance),
            queue_ks=config_dict.get('queue_ks', default_instance.queue_ks),
            hetero_ks=config_dict.get('hetero_ks', default_instance.hetero_ks),
            censored_limit=config_dict.get('censored_limit', default_instance.censored_limit),
            sandwich_band=config_dict.get('sandwich_band', default_instance.sandwich_band),
            truncation_tolerance=config_dict.get('truncation_tolerance', default_instance.truncation_tolerance),
            point_mass_tolerance=config_dict.get('point_mass_tolerance', default_instance.point_mass_tolerance),
            hitting_tolerance=config_dict.get('hitting_tolerance', default_instance.hitting_tolerance),
            tail_slope_tolerance=config_dict.get('tail_slope_tolerance', default_instance.tail_slope_tolerance),
            centering_tolerance=config_dict.get('centering_tolerance', default_instance.centering_tolerance),
            residual_tolerance=config_dict.get('residual_tolerance', default_instance.residual_tolerance),
            duality_tolerance=config_dict.get('duality_tolerance', default_instance.duality_tolerance),
            derivative_tolerance=config_dict.get('derivative_tolerance', default_instance.derivative_tolerance),
        )

    def to_dict(self) -> dict:
        return {
            'ks_alpha': self.ks_alpha,
            'sampler_ks': self.sampler_ks,
            'theorem_ks': self.theorem_ks,
            'shape_trend_allowance': self.shape_trend_allowance,
            'queue_ks': self.queue_ks,
            'hetero_ks': self.hetero_ks,
            'censored_limit': self.censored_limit,
            'sandwich_band': self.sandwich_band,
            'truncation_tolerance': self.truncation_tolerance,
            'point_mass_tolerance': self.point_mass_tolerance,
            'hitting_tolerance': self.hitting_tolerance,
            'tail_slope_tolerance': self.tail_slope_tolerance,
            'centering_tolerance': self.centering_tolerance,
            'residual_tolerance': self.residual_tolerance,
            'duality_tolerance': self.duality_tolerance,
            'derivative_tolerance': self.derivative_tolerance,
        }

    @classmethod
    def get_default_config(cls) -> 'ThresholdConfig':
        return cls()
