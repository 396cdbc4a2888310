# -*- coding: utf-8 -*-
"""
Module: config_manager.py
Author: Takeshi
Date: 2026-02-12

Description:
    配置管理器，中心化管理日志、求解器、模拟和校验阈值配置
"""


import copy
import json
import logging
import re
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict

logger = logging.getLogger(__name__)

# 导入所有配置类
from .log_default import LogConfig
from .sim_default import SimConfig
from .solver_default import SolverConfig
from .threshold_default import ThresholdConfig

# 默认设置文件
SETTINGS_FILE = 'data/settings.json'


class ConfigError(Exception):
    """配置相关错误"""
    pass


# 配置类型映射
_CONFIG_CLASSES = {
    'LOG_CONFIG': LogConfig,
    'SOLVER_CONFIG': SolverConfig,
    'SIM_CONFIG': SimConfig,
    'THRESHOLD_CONFIG': ThresholdConfig,
}

# 配置保存顺序
CONFIG_SAVE_ORDER = [
    'SOLVER_CONFIG',
    'SIM_CONFIG',
    'THRESHOLD_CONFIG',
    'LOG_CONFIG',
]


class ConfigManager:
    """配置管理器 - 使用dataclass自带的转换方法

        统一管理全局设置文件中的各个配置段，缺失的段和字段回退到默认值。
        实验本身的参数（分布、N、重复次数）不在这里，由命令行的实验配置文件提供。

        Config Types:
            - LOG_CONFIG: 日志输出
            - SOLVER_CONFIG: 求根、Legendre 变换和数值积分
            - SIM_CONFIG: 截断步数、分块大小、并行度
            - THRESHOLD_CONFIG: 统计校验阈值

        Example:
            >>> manager = get_config_manager()
            >>> solver = manager.get_config('SOLVER_CONFIG')
            >>> manager.update_config('SIM_CONFIG', 'parallelism', 8)
            >>> manager.update_config('LOG_CONFIG', 'console.level', 'INFO')
            >>> manager.save()
        """

    def __init__(self, config_path: str = SETTINGS_FILE):
        """初始化配置管理器

        Args:
            config_path: 设置文件路径，文件不存在时全部使用默认值
        """
        self.config_path = Path(config_path)
        self.config_dir = self.config_path.parent

        self._configs = {}
        self._load_configs()

    def _load_configs(self):
        """加载所有配置

        1. 首先设置所有配置的默认值
        2. 如果设置文件存在，从中加载用户配置
        3. 未知配置段记录警告后忽略

        Raises:
            ConfigError: 设置文件不是合法 JSON 对象
        """
        for name, cls in _CONFIG_CLASSES.items():
            self._configs[name] = cls.get_default_config()

        if not self.config_path.exists():
            logger.debug(f"设置文件不存在，使用默认配置: {self.config_path}")
            return

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                file_data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"读取设置文件失败 {self.config_path}: {e}") from e

        if not isinstance(file_data, dict):
            raise ConfigError(f"设置文件顶层必须是对象: {self.config_path}")

        for config_name, config_data in file_data.items():
            if config_name in _CONFIG_CLASSES:
                self._apply_config_data(config_name, config_data)
            else:
                logger.warning(f"未知配置项: {config_name}")

        logger.info(f"配置加载成功: {self.config_path}")

    def _apply_config_data(self, config_name: str, config_data: Any):
        """应用配置数据，类型不匹配时抛出 ConfigError"""
        if not isinstance(config_data, dict):
            raise ConfigError(f"{config_name}: 期望字典，得到 {type(config_data).__name__}")
        try:
            self._configs[config_name] = _CONFIG_CLASSES[config_name].from_dict(config_data)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"解析配置 {config_name} 失败: {e}") from e

    # ============== 核心公共接口 ==============

    def get_config(self, config_name: str) -> Any:
        """获取配置对象的深拷贝

        Raises:
            ConfigError: 当配置名不存在时
        """
        if config_name not in self._configs:
            raise ConfigError(f"未知配置: {config_name}")

        return copy.deepcopy(self._configs[config_name])

    def get_config_dict(self, config_name: str) -> Dict[str, Any]:
        """获取配置的字典表示"""
        config = self.get_config(config_name)
        return self._to_dict(config)

    def set_config_from_dict(self, config_name: str, config_dict: Any):
        """从字典设置配置

        Example:
            >>> manager.set_config_from_dict('SIM_CONFIG', {'parallelism': 4})
        """
        if config_name not in _CONFIG_CLASSES:
            raise ConfigError(f"未知配置: {config_name}")
        if not isinstance(config_dict, dict):
            raise ConfigError(f"{config_name} 必须是字典")
        self._apply_config_data(config_name, config_dict)

    def _to_dict(self, obj: Any) -> Any:
        """递归转换对象为字典: 优先 to_dict()，其次列表、dataclass、字典"""
        if obj is None:
            return None

        if hasattr(obj, 'to_dict') and callable(obj.to_dict):
            return obj.to_dict()

        if isinstance(obj, list):
            return [self._to_dict(item) for item in obj]

        if is_dataclass(obj):
            return asdict(obj)

        if isinstance(obj, dict):
            return {key: self._to_dict(value) for key, value in obj.items()}

        return obj

    def update_config(self, config_name: str, field_path: str, value: Any) -> Any:
        """
        按路径更新配置字段

        Parameters
        ----------
        config_name : str
            'LOG_CONFIG' / 'SOLVER_CONFIG' / 'SIM_CONFIG' / 'THRESHOLD_CONFIG'

        field_path : str
            字段路径，点号与方括号均可:
            'parallelism'、'console.level'、'file[0].enabled'

        value : Any
            新值，只更新内存，需调用 save() 持久化

        Raises
        ------
        ConfigError
            配置名不存在、路径无法解析或列表索引越界

        Examples
        --------
        >>> manager.update_config('THRESHOLD_CONFIG', 'theorem_ks', 0.08)
        0.08
        >>> manager.update_config('LOG_CONFIG', 'file[1].enabled', False)
        False
        """
        if config_name not in self._configs:
            raise ConfigError(f"未知配置: {config_name}")

        obj = copy.deepcopy(self._configs[config_name])

        # 解析路径（支持 . 和 []）
        parts = [part for part in re.split(r'\.|\[|\]', field_path) if part]
        if not parts:
            raise ConfigError(f"路径为空: {field_path!r}")

        current = obj
        for i, part in enumerate(parts[:-1]):
            current = self._resolve_attribute(current, part)
            if current is None:
                raise ConfigError(f"路径错误: {'.'.join(parts[:i+1])} 不存在")

        self._set_attribute(current, parts[-1], value)
        # 经 from_dict 重建一次，非法值不会留在内存中
        self._apply_config_data(config_name, self._to_dict(obj))

        logger.debug(f"更新 {config_name}.{field_path} = {value}")
        return value

    def _resolve_attribute(self, obj: Any, attr_name: str) -> Any:
        """解析对象属性，支持列表索引、dataclass 属性和字典键"""
        if attr_name.isdigit() and isinstance(obj, (list, tuple)):
            index = int(attr_name)
            if 0 <= index < len(obj):
                return obj[index]
            raise ConfigError(f"列表索引 {index} 超出范围 (0-{len(obj)-1})")

        if hasattr(obj, attr_name):
            return getattr(obj, attr_name)

        if isinstance(obj, dict) and attr_name in obj:
            return obj[attr_name]

        raise ConfigError(f"属性不存在: {attr_name} (类型: {type(obj).__name__})")

    def _set_attribute(self, obj: Any, attr_name: str, value: Any):
        """设置对象属性，支持列表索引、dataclass 属性和字典键"""
        if attr_name.isdigit() and isinstance(obj, list):
            index = int(attr_name)
            if 0 <= index < len(obj):
                obj[index] = value
                return
            raise ConfigError(f"列表索引 {index} 超出范围")

        if is_dataclass(obj) and hasattr(obj, attr_name):
            setattr(obj, attr_name, value)
            return

        if isinstance(obj, dict):
            obj[attr_name] = value
            return

        raise ConfigError(f"无法设置属性: {attr_name} (类型: {type(obj).__name__})")

    def save(self) -> bool:
        """按 CONFIG_SAVE_ORDER 保存所有配置到设置文件

        Returns:
            bool: 保存是否成功，失败只记录错误不抛出
        """
        try:
            save_data = {name: self._to_dict(self._configs[name]) for name in CONFIG_SAVE_ORDER}

            self.config_dir.mkdir(parents=True, exist_ok=True)
            temp_file = self.config_path.with_suffix(self.config_path.suffix + '.tmp')
            with open(temp_file, 'w', encoding='utf-8') as f:
                json.dump(save_data, f, ensure_ascii=False, indent=4)
            temp_file.replace(self.config_path)

            logger.info(f"配置已保存: {self.config_path}")
            return True

        except (OSError, TypeError, ValueError) as e:
            logger.error(f"❌ 保存配置失败: {e}")
            return False

    def reload(self) -> bool:
        """从设置文件重新加载，未保存的修改被丢弃；文件不合法时保留当前配置并抛出 ConfigError"""
        previous = self._configs
        self._configs = {}
        try:
            self._load_configs()
        except ConfigError:
            self._configs = previous
            raise
        return True


# ============== 全局单例 ==============

_config_manager_instance = None

def get_config_manager(config_path: str = SETTINGS_FILE) -> ConfigManager:
    """获取配置管理器单例，首次调用时的路径生效"""
    global _config_manager_instance
    if _config_manager_instance is None:
        _config_manager_instance = ConfigManager(config_path)
    return _config_manager_instance


def reset_config_manager():
    """丢弃单例，下次 get_config_manager 重新加载"""
    global _config_manager_instance
    _config_manager_instance = None
