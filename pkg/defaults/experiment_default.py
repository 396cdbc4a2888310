# -*- coding: utf-8 -*-
"""
Module: experiment_default.py
Author: Takeshi
Date: 2026-02-13

Description:
    实验配置（命令行 --config 指向的 JSON 文档）
    解析为分布、fork-join 配置和截断步数，非法文档统一抛出 ConfigError
"""

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from core.dist import DistributionSpec, arrival_summary, distribution_from_dict
from core.errors import ForkJoinError
from .config_manager import ConfigError
from .threshold_default import ThresholdConfig

logger = logging.getLogger(__name__)

LAW_CHOICES = ('wait', 'queue', 'lower-bound', 'upper-bound')
STATISTIC_CHOICES = ('max-wait-sup', 'max-wait-lindley', 'max-queue-little',
                     'max-queue-direct', 'hitting-time')


@dataclass
class VerifySizes:
    """
    verify 命令的缩减规模

    Attributes:
        sweep_size (int): 随机参数扫描的 (服务分布, λ) 组数
            默认: 100
        n_servers (int): 抽样器等价性检查的 N
            默认: 100
        steps (int): 抽样器等价性检查的截断步数 K
            默认: 500
        replications (int): 每个随机检查的重复次数
            默认: 2000
        tail_replications (int): 尾斜率检查的重复次数
            默认: 50000
        centering_replications (int): 中心化斜率与命中时间检查在每个 N 上的重复次数
            默认: 400
        horizon_floor (int): 按 safety·ĉ·log N 缩放的截断步数下限
            默认: 50
        theorem_servers (int): 中心极限形状与夹逼检查的 N
            默认: 10000
        trend_servers (int): 等待时间形状检查的对照 N，其 KS 距离不应明显小于 theorem_servers 处
            默认: 100
        theorem_replications (int): 中心极限形状与夹逼检查的重复次数
            默认: 400
        asymptotic (bool): 是否运行 N=theorem_servers 的极限分布检查（耗时较长）
            默认: False
    """

    sweep_size: int = 100
    n_servers: int = 100
    steps: int = 500
    replications: int = 2000
    tail_replications: int = 50000
    centering_replications: int = 400
    horizon_floor: int = 50
    trend_servers: int = 100
    theorem_servers: int = 10000
    theorem_replications: int = 400
    asymptotic: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VerifySizes':
        default_instance = cls()
        values = {}
        for f in fields(cls):
            raw = data.get(f.name, getattr(default_instance, f.name))
            values[f.name] = bool(raw) if f.type in (bool, 'bool') else int(raw)
        sizes = cls(**values)
        for f in fields(cls):
            if f.type in (int, 'int') and getattr(sizes, f.name) < 1:
                raise ConfigError(f"verify.{f.name} 必须 >= 1")
        if sizes.trend_servers >= sizes.theorem_servers:
            raise ConfigError(f"verify.trend_servers ({sizes.trend_servers}) 必须小于 "
                              f"theorem_servers ({sizes.theorem_servers})")
        return sizes


@dataclass
class ExperimentConfig:
    """
    单次命令的实验配置

    Attributes:
        service (dict): 服务时间分布，如 {"family": "exponential", "rate": 2.0}
        services (List[dict]): 多类别时各类的服务时间分布
        alphas (List[float]): 多类别占比，和为 1
        arrival (dict): 到达间隔分布；gamma 命令可以只给 lambda
        lam (float): 到达率，JSON 键为 "lambda"，仅在没有 arrival 时使用
        n_servers (int): 服务器数 N
            默认: 10000
        n_grid (List[int]): N 网格，严格递增（verify 的中心化检查使用）
        replications (int): 重复次数 R
            默认: 2000
        master_seed (int): 主种子，--seed 覆盖
            默认: 0
        horizon_steps (int): 截断步数 K，缺省时按 safety·ĉ·log N 计算
        statistic (str): 统计量；simulate 缺省为 max-wait-sup，compare 缺省按 law 选择
        law (str): compare 的极限分布 wait / queue / lower-bound / upper-bound
            默认: 'wait'
        epsilon (float): 上下界分布的 ε，缺省为 epsilon_fraction·ĉ
        epsilon_fraction (float): 默认: 0.1
        level (float): 命中时间水平，缺省为 (1/γ)·log N
        samples (str): compare 读取的已有样本 CSV，缺省时现场模拟
        run_compare (bool): hetero 是否接着对主导类极限做 compare
        output_dir (str): 输出目录，--out 覆盖
            默认: 'results'
        parallelism (int): 并行度，--parallelism 覆盖，缺省用 SIM_CONFIG
        thresholds (ThresholdConfig): 阈值覆盖，缺省用 THRESHOLD_CONFIG
        verify (VerifySizes): verify 命令的规模
    """

    service: Optional[Dict[str, Any]] = None
    services: List[Dict[str, Any]] = field(default_factory=list)
    alphas: List[float] = field(default_factory=list)
    arrival: Optional[Dict[str, Any]] = None
    lam: Optional[float] = None
    n_servers: int = 10000
    n_grid: List[int] = field(default_factory=list)
    replications: int = 2000
    master_seed: int = 0
    horizon_steps: Optional[int] = None
    statistic: Optional[str] = None
    law: str = 'wait'
    epsilon: Optional[float] = None
    epsilon_fraction: float = 0.1
    level: Optional[float] = None
    samples: Optional[str] = None
    run_compare: bool = False
    output_dir: str = 'results'
    parallelism: Optional[int] = None
    thresholds: Optional[ThresholdConfig] = None
    verify: VerifySizes = field(default_factory=VerifySizes)

    _KEYS = ('service', 'services', 'alphas', 'arrival', 'lambda', 'n_servers', 'n_grid',
             'replications', 'master_seed', 'horizon_steps', 'statistic', 'law', 'epsilon',
             'epsilon_fraction', 'level', 'samples', 'run_compare', 'output_dir', 'parallelism',
             'thresholds', 'verify')

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """从字典创建配置实例，缺失字段使用默认值，未知键只记录警告"""
        if not isinstance(data, dict):
            raise ConfigError("实验配置顶层必须是对象")
        for key in data:
            if key not in cls._KEYS:
                logger.warning(f"未知配置项: {key}")

        verify_data = data.get('verify') or {}
        if not isinstance(verify_data, dict):
            raise ConfigError("verify 必须是对象")

        default_instance = cls()
        try:
            config = cls(
                service=data.get('service', default_instance.service),
                services=list(data.get('services', default_instance.services)),
                alphas=[float(a) for a in data.get('alphas', default_instance.alphas)],
                arrival=data.get('arrival', default_instance.arrival),
                lam=_optional_float(data.get('lambda', default_instance.lam)),
                n_servers=int(data.get('n_servers', default_instance.n_servers)),
                n_grid=[int(n) for n in data.get('n_grid', default_instance.n_grid)],
                replications=int(data.get('replications', default_instance.replications)),
                master_seed=int(data.get('master_seed', default_instance.master_seed)),
                horizon_steps=_optional_int(data.get('horizon_steps', default_instance.horizon_steps)),
                statistic=_optional_str(data.get('statistic', default_instance.statistic)),
                law=str(data.get('law', default_instance.law)),
                epsilon=_optional_float(data.get('epsilon', default_instance.epsilon)),
                epsilon_fraction=float(data.get('epsilon_fraction', default_instance.epsilon_fraction)),
                level=_optional_float(data.get('level', default_instance.level)),
                samples=data.get('samples', default_instance.samples),
                run_compare=bool(data.get('run_compare', default_instance.run_compare)),
                output_dir=str(data.get('output_dir', default_instance.output_dir)),
                parallelism=_optional_int(data.get('parallelism', default_instance.parallelism)),
                thresholds=(ThresholdConfig.from_dict(data['thresholds'])
                            if isinstance(data.get('thresholds'), dict) else None),
                verify=VerifySizes.from_dict(verify_data),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"实验配置字段类型错误: {e}") from e
        config.validate()
        return config

    @classmethod
    def load(cls, path: str) -> 'ExperimentConfig':
        """读取 JSON 文件

        Raises:
            ConfigError: 文件不存在或不是合法 JSON
        """
        config_path = Path(path)
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"实验配置文件不存在: {config_path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"实验配置不是合法 JSON: {config_path}: {e}") from e
        return cls.from_dict(data)

    def validate(self) -> 'ExperimentConfig':
        if self.replications < 1:
            raise ConfigError(f"replications 必须 >= 1，实际为 {self.replications}")
        if self.n_servers < 1:
            raise ConfigError(f"n_servers 必须 >= 1，实际为 {self.n_servers}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n_grid 必须严格递增: {self.n_grid}")
        if self.n_grid and self.n_grid[0] < 2:
            raise ConfigError("n_grid 中的 N 必须 >= 2")
        if self.statistic is not None and self.statistic not in STATISTIC_CHOICES:
            raise ConfigError(f"未知统计量: {self.statistic}，可选 {STATISTIC_CHOICES}")
        if self.law not in LAW_CHOICES:
            raise ConfigError(f"未知极限分布: {self.law}，可选 {LAW_CHOICES}")
        if self.services and self.alphas and len(self.services) != len(self.alphas):
            raise ConfigError("services 与 alphas 长度不一致")
        if self.horizon_steps is not None and self.horizon_steps < 1:
            raise ConfigError("horizon_steps 必须 >= 1")
        if self.parallelism is not None and self.parallelism < 1:
            raise ConfigError("parallelism 必须 >= 1")
        if not (0.0 < self.epsilon_fraction < 1.0):
            raise ConfigError("epsilon_fraction 必须在 (0, 1) 内")
        return self

    # ============== 解析为领域类型 ==============

    def service_spec(self) -> DistributionSpec:
        if self.service is None:
            if len(self.services) == 1:
                return _parse_distribution('services[0]', self.services[0])
            raise ConfigError("缺少 service")
        return _parse_distribution('service', self.service)

    def service_specs(self) -> List[DistributionSpec]:
        if not self.services:
            return [self.service_spec()]
        return [_parse_distribution(f'services[{k}]', s) for k, s in enumerate(self.services)]

    def class_alphas(self) -> List[float]:
        if self.alphas:
            return list(self.alphas)
        count = max(1, len(self.services))
        return [1.0 / count] * count

    def arrival_spec(self) -> Optional[DistributionSpec]:
        if self.arrival is None:
            return None
        return _parse_distribution('arrival', self.arrival)

    def arrival_rate(self) -> float:
        """到达率 λ：优先由 arrival 的均值得出，否则取 lambda"""
        spec = self.arrival_spec()
        if spec is not None:
            return arrival_summary(spec).lam
        if self.lam is None or not self.lam > 0:
            raise ConfigError("需要 arrival 或正的 lambda")
        return float(self.lam)

    def arrival_sigma(self) -> float:
        spec = self.arrival_spec()
        return arrival_summary(spec).sigma_A if spec is not None else 0.0

    def require_arrival(self) -> DistributionSpec:
        spec = self.arrival_spec()
        if spec is None:
            raise ConfigError("该命令需要 arrival 分布")
        return spec

    def to_dict(self) -> Dict[str, Any]:
        return {
            'service': self.service,
            'services': self.services,
            'alphas': self.alphas,
            'arrival': self.arrival,
            'lambda': self.lam,
            'n_servers': self.n_servers,
            'n_grid': self.n_grid,
            'replications': self.replications,
            'master_seed': self.master_seed,
            'horizon_steps': self.horizon_steps,
            'statistic': self.statistic,
            'law': self.law,
            'epsilon': self.epsilon,
            'epsilon_fraction': self.epsilon_fraction,
            'level': self.level,
            'samples': self.samples,
            'run_compare': self.run_compare,
            'output_dir': self.output_dir,
            'parallelism': self.parallelism,
            'thresholds': self.thresholds.to_dict() if self.thresholds else None,
            'verify': self.verify.to_dict(),
        }

    @classmethod
    def get_default_config(cls) -> 'ExperimentConfig':
        return cls()


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _optional_int(value: Any) -> Optional[int]:
    return None if value is None else int(value)


def _optional_str(value: Any) -> Optional[str]:
    return None if value is None else str(value)


def _parse_distribution(name: str, data: Any) -> DistributionSpec:
    try:
        return distribution_from_dict(data)
    except ForkJoinError as e:
        raise ConfigError(f"{name}: {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: 参数类型错误: {e}") from e
