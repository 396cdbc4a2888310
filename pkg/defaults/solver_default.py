# -*- coding: utf-8 -*-
"""
Module: solver_default.py
Author: Takeshi
Date: 2026-02-05

Description:
    数值求解默认配置（求根、Legendre 变换、数值积分）
"""

from dataclasses import dataclass
from typing import Any, Dict


@dataclass
class SolverConfig:
    """
    数值求解配置类

    Attributes:
        bracket_start (float): 夹逼起点 θ
            从该正数开始每次翻倍，直到 Λ > 0 或到达定义域边界
            默认: 1e-8

        max_doublings (int): 最大翻倍次数
            超过仍未变号即判定 NoRoot；θ 溢出为 inf 时提前停止
            默认: 2000

        boundary_steps (int): 定义域边界探测次数
            θ 到达 theta_sup 后，以 theta_sup - gap/2^k 逐步逼近边界
            默认: 60

        boundary_tolerance (float): 边界根判定容差
            逼近边界时 Λ 仍 < 0 但已高于 -boundary_tolerance，判定为 BoundaryRoot
            默认: 1e-8

        bisect_width (float): 二分终止区间宽度
            默认: 1e-14

        residual_tolerance (float): 牛顿修正的残差目标 |Λ(γ)|
            默认: 1e-14

        max_iterations (int): 二分 / 牛顿最大迭代次数
            默认: 200

        quad_upper (float): 半正态变量积分上限
            [quad_upper, ∞) 的尾部质量 2Φ̄(8) < 1e-15 以解析方式补上
            默认: 8.0

        quad_tolerance (float): 自适应积分绝对误差
            默认: 1e-10

        ambiguity_tolerance (float): 多类别 γ 并列判定的绝对容差
            默认: 1e-9
    """

    bracket_start: float = 1e-8
    max_doublings: int = 2000
    boundary_steps: int = 60
    boundary_tolerance: float = 1e-8
    bisect_width: float = 1e-14
    residual_tolerance: float = 1e-14
    max_iterations: int = 200
    quad_upper: float = 8.0
    quad_tolerance: float = 1e-10
    ambiguity_tolerance: float = 1e-9

    def to_dict(self) -> Dict[str, Any]:
        return {
            'bracket_start': self.bracket_start,
            'max_doublings': self.max_doublings,
            'boundary_steps': self.boundary_steps,
            'boundary_tolerance': self.boundary_tolerance,
            'bisect_width': self.bisect_width,
            'residual_tolerance': self.residual_tolerance,
            'max_iterations': self.max_iterations,
            'quad_upper': self.quad_upper,
            'quad_tolerance': self.quad_tolerance,
            'ambiguity_tolerance': self.ambiguity_tolerance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SolverConfig':
        """从字典创建配置实例，缺失字段使用默认值"""
        default_instance = cls()

        return cls(
            bracket_start=data.get('bracket_start', default_instance.bracket_start),
            max_doublings=data.get('max_doublings', default_instance.max_doublings),
            boundary_steps=data.get('boundary_steps', default_instance.boundary_steps),
            boundary_tolerance=data.get('boundary_tolerance', default_instance.boundary_tolerance),
            bisect_width=data.get('bisect_width', default_instance.bisect_width),
            residual_tolerance=data.get('residual_tolerance', default_instance.residual_tolerance),
            max_iterations=data.get('max_iterations', default_instance.max_iterations),
            quad_upper=data.get('quad_upper', default_instance.quad_upper),
            quad_tolerance=data.get('quad_tolerance', default_instance.quad_tolerance),
            ambiguity_tolerance=data.get('ambiguity_tolerance', default_instance.ambiguity_tolerance),
        )

    @classmethod
    def get_default_config(cls) -> 'SolverConfig':
        return cls()
