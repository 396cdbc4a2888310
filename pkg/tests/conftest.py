# -*- coding: utf-8 -*-
"""
测试公共夹具
仓库根目录加入 sys.path（与 main.py 相同），包以 core / defaults / managers 导入
"""

import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import pytest

from core.dist import Deterministic, Exponential
from core.lundberg import solve_gamma
from core.rng import make_stream
from core.sim import ForkJoinConfig, Horizon
from defaults.config_manager import reset_config_manager
from defaults.sim_default import SimConfig


@pytest.fixture
def exp2():
    """服务时间 Exp(2)，λ=1 时 γ≈1.5936"""
    return Exponential(rate=2.0)


@pytest.fixture
def exp1():
    return Exponential(rate=1.0)


@pytest.fixture
def exp2_solution(exp2):
    return solve_gamma(exp2, 1.0)


@pytest.fixture
def rng():
    return make_stream(12345)


@pytest.fixture
def small_sim_config():
    return SimConfig(chunk_rows=32, group_width=8)


@pytest.fixture
def small_config(exp2, exp1):
    """N=20 的 Exp(2)/Exp(1) 队列"""
    return ForkJoinConfig.homogeneous(20, exp2, exp1)


@pytest.fixture
def deterministic_config():
    """Deterministic(0.4) 服务、Deterministic(1.0) 到达，所有增量为 −0.6"""
    return ForkJoinConfig.homogeneous(5, Deterministic(0.4), Deterministic(1.0))


@pytest.fixture
def short_horizon():
    return Horizon(steps=200)


@pytest.fixture(autouse=True)
def _fresh_config_manager():
    reset_config_manager()
    yield
    reset_config_manager()
