# -*- coding: utf-8 -*-
"""
Module: main.py
Author: Takeshi
Date: 2026-02-16

Description:
    ForkJoinExtremes 命令行入口
    子命令: gamma / simulate / compare / hetero / verify
    报告以单行 JSON 打印到标准输出，并写入输出目录的 <command>.json
    退出码: 0 成功；1 配置错误；2 领域错误或统计检查失败

    此程序是自由软件：您可以根据自由软件基金会发布的 GNU 通用公共许可证条款重新发布和/或修改它；
    可以是该许可证的第3版，也可以是（在您的选择下）任何更新的版本。
    如果没有收到许可证副本，请参阅 <http://www.gnu.org/licenses/>。
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)

from defaults.app_info import AppInfo
from defaults.config_manager import SETTINGS_FILE, ConfigError, get_config_manager, reset_config_manager
from defaults.experiment_default import ExperimentConfig
from managers import EXIT_CONFIG, CommandManager, LoggingManager
from managers.result_writer import report_to_text

logger = logging.getLogger(__name__)

COMMANDS = ('gamma', 'simulate', 'compare', 'hetero', 'verify')

# 只有 verify 可以不带实验配置（使用内置参考模型）
_CONFIG_OPTIONAL = ('verify',)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='forkjoin', description=AppInfo.DESCRIPTION)
    parser.add_argument('--version', action='version', version=AppInfo.version_string())

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='实验配置 JSON 文件')
    common.add_argument('--out', help='输出目录（覆盖配置中的 output_dir）')
    common.add_argument('--seed', type=int, help='主种子（覆盖配置中的 master_seed）')
    common.add_argument('--parallelism', type=int, help='并行线程数')
    common.add_argument('--settings', default=SETTINGS_FILE, help='全局设置文件')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='控制台输出 DEBUG 日志')
    verbosity.add_argument('--quiet', action='store_true', help='控制台只输出 WARNING 及以上')

    subparsers = parser.add_subparsers(dest='command', required=True)
    help_texts = {
        'gamma': '求解 Lundberg 根 γ 及 Λ\'(γ)、Λ\'\'(γ)、ĉ',
        'simulate': '蒙特卡洛模拟最大等待时间、最大队列长度或命中时间',
        'compare': '样本与极限分布的 KS 距离和 QQ 表',
        'hetero': '多类别服务器的主导类别和极限分布',
        'verify': '运行完整的数值与统计校验',
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=help_texts[name])
    return parser


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """读取实验配置并应用命令行覆盖

    Raises:
        ConfigError: 缺少必需的 --config、文件无法解析或覆盖值非法
    """
    if args.config:
        experiment = ExperimentConfig.load(args.config)
    elif args.command in _CONFIG_OPTIONAL:
        experiment = ExperimentConfig.get_default_config()
    else:
        raise ConfigError(f"{args.command} 需要 --config")

    if args.seed is not None:
        experiment.master_seed = args.seed
    if args.out:
        experiment.output_dir = args.out
    if args.parallelism is not None:
        experiment.parallelism = args.parallelism
    return experiment.validate()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    logging_manager = LoggingManager()
    try:
        reset_config_manager()
        config_manager = get_config_manager(args.settings)
        log_config = config_manager.get_config('LOG_CONFIG')
        if args.verbose:
            log_config = log_config.with_console_level('DEBUG')
        elif args.quiet:
            log_config = log_config.with_console_level('WARNING')
        logging_manager.setup_logging(log_config)

        experiment = load_experiment(args)
        logging_manager.add_run_log(os.path.join(experiment.output_dir, f'{args.command}.log'))
        report, exit_code = CommandManager(experiment, config_manager).execute(args.command)
        print(report_to_text(report))
        return exit_code

    except ConfigError as e:
        logger.error(f"❌ 配置错误: {e}")
        print(report_to_text({'command': args.command, 'status': 'error',
                              'reason': 'ConfigError', 'message': str(e), 'exit_code': EXIT_CONFIG}))
        return EXIT_CONFIG

    finally:
        logging_manager.shutdown()


if __name__ == "__main__":
    sys.exit(main())
