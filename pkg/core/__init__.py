# -*- coding: utf-8 -*-
"""
核心计算模块
"""

from .errors import ForkJoinError
from .dist import (DistributionSpec, Deterministic, Exponential, Gamma, Uniform,
                   HyperExponential, Empirical, distribution_from_dict, arrival_summary)
from .lundberg import LundbergSolution, solve_gamma, legendre, hitting_constant
from .asymptotics import LimitKind, LimitLaw, ClassSpec, wait_limit_law, queue_limit_law, hetero_select
from .sim import ForkJoinConfig, Horizon, SampleSet, Statistic, default_horizon
from .batch_runner import BatchRunner, run_batch
