# -*- coding: utf-8 -*-
"""
Module: log_default.py
Author: Takeshi
Date: 2026-02-12

Description:
    日志配置: 控制台（stderr）、轮转文件、以及写到输出目录的单次运行日志
"""


from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

_CONSOLE_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'
_FILE_FORMAT = '%(asctime)s %(levelname)-7s [%(threadName)s] %(name)s: %(message)s'


def _check_level(owner: str, level: str) -> str:
    level = str(level).upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"{owner}.level 必须是 {LOG_LEVELS} 之一，实际为 {level!r}")
    return level


def _from_fields(cls, data: Dict[str, Any]):
    """按字段名取值，缺失字段使用默认值，未知键忽略"""
    default_instance = cls()
    return cls(**{f.name: data.get(f.name, getattr(default_instance, f.name)) for f in fields(cls)})


@dataclass
class ConsoleLogConfig:
    """
    控制台日志配置（写 stderr，stdout 只留给报告）

    Attributes:
        enabled (bool): 默认: True
        level (str): 默认: 'INFO'，命令行 --verbose / --quiet 覆盖为 DEBUG / WARNING
        format (str): 日志格式
        date_format (str): 默认: '%H:%M:%S'，单次命令的日志不需要日期
        color_enabled (bool): 使用 colorlog 着色，未安装时退回普通格式
            默认: True
        log_color (Dict[str, str]): 各级别颜色
    """

    enabled: bool = True
    level: str = 'INFO'
    format: str = _CONSOLE_FORMAT
    date_format: str = '%H:%M:%S'
    color_enabled: bool = True
    log_color: Dict[str, str] = field(default_factory=lambda: {
        'DEBUG': 'cyan',
        'INFO': 'green',
        'WARNING': 'yellow',
        'ERROR': 'red',
        'CRITICAL': 'red,bg_white',
    })

    def __post_init__(self):
        self.level = _check_level('console', self.level)

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data['log_color'] = dict(self.log_color)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConsoleLogConfig':
        return _from_fields(cls, data)


@dataclass
class FileLogConfig:
    """
    轮转文件日志，长时间的 verify 运行可以开启 DEBUG 文件保留求根和抽样细节

    Attributes:
        enabled (bool): 默认: True
        level (str): 默认: 'INFO'
        filename (str): 目录不存在时自动创建
            默认: 'logs/forkjoin_info.log'
        max_size_mb (int): 达到后轮转
            默认: 10
        backup_count (int): 默认: 3
    """

    enabled: bool = True
    level: str = 'INFO'
    format: str = _FILE_FORMAT
    date_format: str = '%Y-%m-%d %H:%M:%S'
    filename: str = 'logs/forkjoin_info.log'
    max_size_mb: int = 10
    backup_count: int = 3

    def __post_init__(self):
        self.level = _check_level('file', self.level)
        if self.max_size_mb < 1 or self.backup_count < 0:
            raise ValueError(f"{self.filename}: max_size_mb 必须 >= 1，backup_count 必须 >= 0")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FileLogConfig':
        return _from_fields(cls, data)


@dataclass
class LogConfig:
    """
    完整的日志配置

    Attributes:
        console (ConsoleLogConfig): 控制台
        file (List[FileLogConfig]): 轮转文件列表，默认两项均关闭
        run_log (bool): 是否在输出目录写 <command>.log，与报告、样本放在一起
            默认: True
        run_log_level (str): 默认: 'DEBUG'

    Example:
        >>> config = LogConfig.get_default_config().with_console_level('WARNING')
    """

    console: ConsoleLogConfig = field(default_factory=ConsoleLogConfig)
    file: List[FileLogConfig] = field(default_factory=list)
    run_log: bool = True
    run_log_level: str = 'DEBUG'

    def __post_init__(self):
        self.run_log_level = _check_level('run_log', self.run_log_level)

    def with_console_level(self, level: str) -> 'LogConfig':
        """返回控制台级别被替换的副本"""
        return replace(self, console=replace(self.console, level=level))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'console': self.console.to_dict(),
            'file': [f.to_dict() for f in self.file],
            'run_log': self.run_log,
            'run_log_level': self.run_log_level,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LogConfig':
        default_instance = cls()
        return cls(
            console=ConsoleLogConfig.from_dict(data.get('console', {})),
            file=[FileLogConfig.from_dict(item) for item in data.get('file', [])],
            run_log=bool(data.get('run_log', default_instance.run_log)),
            run_log_level=data.get('run_log_level', default_instance.run_log_level),
        )

    @classmethod
    def get_default_config(cls) -> 'LogConfig':
        """文件日志默认关闭，需要时在设置文件中开启"""
        return cls(
            file=[
                FileLogConfig(enabled=False, level='DEBUG', filename='logs/forkjoin_debug.log',
                              max_size_mb=50, backup_count=1),
                FileLogConfig(enabled=False, level='INFO', filename='logs/forkjoin_info.log',
                              max_size_mb=20, backup_count=3),
            ]
        )
