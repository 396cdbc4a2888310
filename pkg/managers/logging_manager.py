# -*- coding: utf-8 -*-
"""
Module: logging_manager.py
Author: Takeshi
Date: 2026-02-12

Description:
    日志管理器
    - 控制台处理器写 stderr，stdout 只留给命令的单行 JSON 报告
    - 轮转文件处理器按 LOG_CONFIG.file 逐个安装
    - 运行日志写到输出目录的 <command>.log，随报告一起归档
    只管理自己安装的处理器，shutdown 后根日志器恢复原状
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import List, Optional

from defaults.log_default import ConsoleLogConfig, FileLogConfig, LogConfig

logger = logging.getLogger(__name__)


def _console_formatter(config: ConsoleLogConfig) -> logging.Formatter:
    if config.color_enabled:
        try:
            import colorlog
            return colorlog.ColoredFormatter('%(log_color)s' + config.format,
                                             datefmt=config.date_format,
                                             log_colors=config.log_color)
        except ImportError:
            logger.debug("提示: 安装 colorlog 库可获得彩色控制台输出: pip install colorlog")
    return logging.Formatter(config.format, datefmt=config.date_format)


class LoggingManager:
    """
    日志管理器

    Example:
        >>> manager = LoggingManager()
        >>> manager.setup_logging(LogConfig.get_default_config())
        >>> manager.add_run_log('results/gamma.log')
        >>> manager.shutdown()
    """

    def __init__(self):
        self.is_initialized = False
        self.log_config: Optional[LogConfig] = None
        self._handlers: List[logging.Handler] = []
        self._previous_level: Optional[int] = None

    def setup_logging(self, log_config: LogConfig):
        """安装控制台与文件处理器；重复调用会先移除上一次安装的处理器"""
        if self.is_initialized:
            self.shutdown()

        root_logger = logging.getLogger()
        self._previous_level = root_logger.level
        # 根日志器放行全部级别，由各处理器自己过滤
        root_logger.setLevel(logging.DEBUG)
        self.log_config = log_config

        if log_config.console.enabled:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(_console_formatter(log_config.console))
            self._install(handler, log_config.console.level)

        for file_config in log_config.file:
            if file_config.enabled:
                self._add_rotating_file(file_config)

        self.is_initialized = True
        logger.debug(f"日志系统初始化完成: 控制台 {log_config.console.level}, "
                     f"{len(self._handlers)} 个处理器")

    def add_run_log(self, path: str) -> Optional[Path]:
        """在输出目录追加本次运行的日志文件；run_log 关闭时不做任何事"""
        if self.log_config is None or not self.log_config.run_log:
            return None
        log_path = Path(path)
        try:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            handler = logging.FileHandler(log_path, mode='w', encoding='utf-8')
        except OSError as e:
            logger.error(f"❌ 无法创建运行日志 {log_path}: {e}")
            return None
        handler.setFormatter(logging.Formatter(FileLogConfig().format, datefmt=FileLogConfig().date_format))
        self._install(handler, self.log_config.run_log_level)
        logger.debug(f"运行日志: {log_path}")
        return log_path

    def _add_rotating_file(self, config: FileLogConfig):
        log_path = Path(config.filename)
        try:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            handler = logging.handlers.RotatingFileHandler(
                filename=log_path,
                maxBytes=config.max_size_mb * 1024 * 1024,
                backupCount=config.backup_count,
                encoding='utf-8',
            )
        except PermissionError as e:
            logger.error(f"❌ 权限错误，无法创建日志文件 {log_path}: {e}")
            return
        except OSError as e:
            logger.error(f"❌ 配置文件日志失败: {log_path}, 错误: {e}")
            return

        handler.setFormatter(logging.Formatter(config.format, datefmt=config.date_format))
        self._install(handler, config.level)
        logger.debug(f"✅ 文件日志已配置: {log_path} (级别: {config.level})")

    def _install(self, handler: logging.Handler, level: str):
        handler.setLevel(getattr(logging, level))
        logging.getLogger().addHandler(handler)
        self._handlers.append(handler)

    @property
    def handlers(self) -> List[logging.Handler]:
        return list(self._handlers)

    def shutdown(self):
        """移除本管理器安装的处理器并恢复根日志级别"""
        root_logger = logging.getLogger()
        for handler in self._handlers:
            root_logger.removeHandler(handler)
            handler.close()
        self._handlers.clear()
        if self._previous_level is not None:
            root_logger.setLevel(self._previous_level)
            self._previous_level = None
        self.is_initialized = False
