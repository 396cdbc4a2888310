# -*- coding: utf-8 -*-
"""
Module: errors.py
Author: Takeshi
Date: 2026-02-03

Description:
    计算模块统一异常体系
    每个异常带有固定的 reason 字符串（等于类名），命令行报告直接引用
"""

import math
from typing import Any, Optional, Sequence


class ForkJoinError(Exception):
    """所有领域错误的基类"""

    @property
    def reason(self) -> str:
        return type(self).__name__


class InvalidParameter(ForkJoinError):
    """分布参数非法"""

    def __init__(self, field: str, reason: str):
        super().__init__(f"参数 {field} 非法: {reason}")
        self.field = field
        self.detail = reason


class OutsideDomain(ForkJoinError):
    """θ 超出 Λ 的有效域，limit 为上确界极限值"""

    def __init__(self, message: str, limit: float = math.inf):
        super().__init__(message)
        self.limit = limit


class Unstable(ForkJoinError):
    """E[S] >= 1/λ，队列不稳定"""
    pass


class NoRoot(ForkJoinError):
    """Λ 在整个定义域内为负，不存在正根"""
    pass


class BoundaryRoot(ForkJoinError):
    """根只在 θ 趋近定义域上界时出现（interior=False）"""

    def __init__(self, message: str, solution: Any = None):
        super().__init__(message)
        self.solution = solution


class AssumptionViolated(ForkJoinError):
    """γ 不在定义域内部，极限定理不适用"""
    pass


class KindMismatch(ForkJoinError):
    """极限分布类型与操作不匹配"""
    pass


class AmbiguousMinimum(ForkJoinError):
    """多个类别的 γ 在容差内相同"""

    def __init__(self, message: str, indices: Sequence[int] = ()):
        super().__init__(message)
        self.indices = tuple(indices)


class DegenerateLaw(ForkJoinError):
    """退化分布（scale=0）无法给出非中位数分位点"""
    pass


class HorizonTooShort(ForkJoinError):
    """截断步数不足，结果被截尾"""

    def __init__(self, message: str, steps: int = 0):
        super().__init__(message)
        self.steps = steps


class ReplicationError(ForkJoinError):
    """单次重复实验失败，附带重复编号"""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"第 {index} 次重复失败: {cause}")
        self.index = index
        self.cause = cause

    @property
    def reason(self) -> str:
        if isinstance(self.cause, ForkJoinError):
            return self.cause.reason
        return type(self).__name__


class EmptySample(ForkJoinError):
    """样本为空"""
    pass


class DegenerateDesign(ForkJoinError):
    """回归设计退化（所有 x 相同）"""
    pass


class OutOfRange(ForkJoinError):
    """概率参数不在 (0, 1) 内"""

    def __init__(self, message: str, value: Optional[float] = None):
        super().__init__(message)
        self.value = value
