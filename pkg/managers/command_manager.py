# -*- coding: utf-8 -*-
"""
Module: command_manager.py
Author: Takeshi
Date: 2026-02-15

Description:
    命令行五个子命令的实现: gamma / simulate / compare / hetero / verify
    每个命令返回 (报告, 退出码)，报告同时写入输出目录
    退出码: 0 成功；2 领域错误或统计检查失败（报告仍然写出）
    配置错误（ConfigError）不在这里处理，由 main 转换为退出码 1
"""

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.asymptotics import (ClassSpec, LimitLaw, hetero_select, law_cdf, lower_bound_law,
                              predicted_quantile, queue_limit_law, upper_bound_law, wait_limit_law)
from core.batch_runner import run_batch
from core.dist import DistributionSpec, Exponential
from core.errors import BoundaryRoot, ForkJoinError, NoRoot
from core.lundberg import (LundbergSolution, centering_constant, drift, rate_function_at_hitting,
                           solve_gamma)
from core.sim import ForkJoinConfig, Horizon, SampleSet, Statistic, default_horizon
from core.stats import ks_distance, point_mass_distance, qq_table, standardize
from defaults.config_manager import ConfigError, ConfigManager
from defaults.experiment_default import ExperimentConfig
from defaults.sim_default import SimConfig
from defaults.solver_default import SolverConfig
from defaults.threshold_default import ThresholdConfig
from .result_writer import ResultWriter
from .verify_suite import VerifySuite, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILURE = 2

QQ_PROBABILITIES = tuple(np.round(np.linspace(0.01, 0.99, 99), 2))

# compare 在未指定统计量时按极限分布选择
_LAW_STATISTICS = {
    'wait': Statistic.MAX_WAIT_SUP,
    'queue': Statistic.MAX_QUEUE_LITTLE,
    'lower-bound': Statistic.MAX_WAIT_SUP,
    'upper-bound': Statistic.MAX_WAIT_SUP,
}

# verify 在配置未给出分布时使用的参考模型
VERIFY_SERVICE = Exponential(rate=2.0)
VERIFY_ARRIVAL = Exponential(rate=1.0)

Report = Dict[str, Any]


class CommandManager:
    """
    命令执行器

    Attributes:
        experiment: 已应用命令行覆盖（种子、输出目录、并行度）的实验配置
        config_manager: 全局设置
        writer: 输出目录下的结果读写
    """

    def __init__(self, experiment: ExperimentConfig, config_manager: ConfigManager):
        self.experiment = experiment
        self.config_manager = config_manager
        self.solver_config: SolverConfig = config_manager.get_config('SOLVER_CONFIG')
        self.sim_config: SimConfig = config_manager.get_config('SIM_CONFIG')
        self.thresholds: ThresholdConfig = (experiment.thresholds
                                            or config_manager.get_config('THRESHOLD_CONFIG'))
        self.parallelism = experiment.parallelism or self.sim_config.parallelism
        self.writer = ResultWriter(experiment.output_dir)

        self._commands: Dict[str, Callable[[], Tuple[Report, int]]] = {
            'gamma': self.cmd_gamma,
            'simulate': self.cmd_simulate,
            'compare': self.cmd_compare,
            'hetero': self.cmd_hetero,
            'verify': self.cmd_verify,
        }

    @property
    def commands(self) -> List[str]:
        return list(self._commands)

    def execute(self, command: str) -> Tuple[Report, int]:
        """执行命令；ForkJoinError 转换为带 reason 的报告和退出码 2"""
        if command not in self._commands:
            raise ValueError(f"未知命令: {command}")
        logger.info(f"🚀 执行命令 {command}，种子 {self.experiment.master_seed}")
        try:
            report, code = self._commands[command]()
        except ForkJoinError as e:
            logger.error(f"❌ {command} 失败: {e.reason}: {e}")
            report, code = self._error_report(command, e), EXIT_FAILURE

        report.setdefault('command', command)
        report['exit_code'] = code
        self.writer.write_json(f'{command}.json', report)
        return report, code

    def _error_report(self, command: str, error: ForkJoinError) -> Report:
        report: Report = {'command': command, 'status': 'error', 'reason': error.reason, 'message': str(error)}
        if isinstance(error, BoundaryRoot) and error.solution is not None:
            # gamma 的报告把解的字段放在顶层，其余命令嵌套在 solution 下
            if command == 'gamma':
                report.update(error.solution.to_dict())
            else:
                report['solution'] = error.solution.to_dict()
        indices = getattr(error, 'indices', None)
        if indices:
            report['indices'] = list(indices)
        index = getattr(error, 'index', None)
        if index is not None:
            report['replication'] = index
        return report

    # ============== 公共步骤 ==============

    def _fork_join_config(self, n_servers: Optional[int] = None) -> ForkJoinConfig:
        arrival = self.experiment.require_arrival()
        n_servers = n_servers or self.experiment.n_servers
        if len(self.experiment.services) > 1:
            return ForkJoinConfig.from_alphas(n_servers, self.experiment.service_specs(),
                                              self.experiment.class_alphas(), arrival)
        return ForkJoinConfig.homogeneous(n_servers, self.experiment.service_spec(), arrival)

    def _horizon(self, config: ForkJoinConfig) -> Horizon:
        """显式 horizon_steps 优先；否则按 ĉ 最大的类别计算；没有 γ 时退回 min_steps"""
        if self.experiment.horizon_steps is not None:
            return Horizon(self.experiment.horizon_steps, self.sim_config.safety_factor)

        solutions = []
        for server_class in config.classes:
            try:
                solutions.append(solve_gamma(server_class.service, config.lam, self.solver_config))
            except BoundaryRoot as e:
                solutions.append(e.solution)
            except NoRoot as e:
                logger.warning(f"没有 γ ({e})，截断步数取下限 {self.sim_config.min_steps}")
        if not solutions:
            return Horizon(self.sim_config.min_steps, self.sim_config.safety_factor)
        slowest = max(solutions, key=lambda s: s.c_hat)
        return default_horizon(slowest, config.n_servers, self.sim_config)

    def _simulate(self, config: ForkJoinConfig, statistic: Statistic,
                  horizon: Optional[Horizon] = None) -> SampleSet:
        horizon = horizon or self._horizon(config)
        level = None
        if statistic is Statistic.HITTING_TIME:
            level = self.experiment.level
            if level is None:
                solution = solve_gamma(config.classes[0].service, config.lam, self.solver_config)
                level = math.log(config.n_servers) / solution.gamma
        logger.info(f"模拟 {statistic.value}: N={config.n_servers}, K={horizon.steps}, "
                    f"R={self.experiment.replications}, 并行度 {self.parallelism}")
        return run_batch(config, statistic, horizon, self.experiment.master_seed,
                         self.experiment.replications, self.parallelism, level=level,
                         sim_config=self.sim_config)

    def _select_law(self, solution: LundbergSolution, lam: float, sigma_A: float) -> LimitLaw:
        law = self.experiment.law
        if law == 'wait':
            return wait_limit_law(solution, sigma_A)
        if law == 'queue':
            return queue_limit_law(solution, lam, sigma_A)
        epsilon = self.experiment.epsilon
        if epsilon is None:
            epsilon = self.experiment.epsilon_fraction * solution.c_hat
        if law == 'lower-bound':
            return lower_bound_law(solution, sigma_A, epsilon)
        return upper_bound_law(solution, sigma_A, epsilon)

    def _law_threshold(self) -> float:
        return self.thresholds.queue_ks if self.experiment.law == 'queue' else self.thresholds.theorem_ks

    def _compare_values(self, values: np.ndarray, law: LimitLaw, n_servers: int,
                        threshold: float, qq_name: str) -> Report:
        """标准化、KS 距离、QQ 表；退化极限按点质量比较，要求全部落在容差带内"""
        standardized = standardize(values, law, n_servers)
        if law.is_degenerate:
            distance = point_mass_distance(standardized.values, 0.0, self.thresholds.point_mass_tolerance)
            threshold = 0.0
            logger.warning("极限分布退化 (scale=0)，按点质量比较")
        else:
            distance = ks_distance(standardized.values, lambda x: law_cdf(law, x, self.solver_config))

        rows = qq_table(values, lambda p: predicted_quantile(law, n_servers, p, self.solver_config).value,
                        QQ_PROBABILITIES)
        qq_path = self.writer.write_qq(rows, qq_name)
        passed = distance <= threshold
        logger.info(f"{'✅' if passed else '❌'} KS={distance:.4f}，阈值 {threshold:.4f}")
        return {
            'law': law.to_dict(),
            'ks_distance': distance,
            'threshold': threshold,
            'passed': passed,
            'degenerate': law.is_degenerate,
            'n': int(values.size),
            'n_servers': n_servers,
            'qq': str(qq_path),
        }

    # ============== 命令 ==============

    def cmd_gamma(self) -> Tuple[Report, int]:
        service = self.experiment.service_spec()
        lam = self.experiment.arrival_rate()
        solution = solve_gamma(service, lam, self.solver_config)
        report = {
            'command': 'gamma',
            'status': 'ok',
            'service': service.to_dict(),
            'lambda': lam,
            'drift': drift(service, lam),
            **solution.to_dict(),
            'centering_constant': centering_constant(solution),
            'duality_product': rate_function_at_hitting(service, lam, solution, self.solver_config),
        }
        logger.info(f"✅ γ={solution.gamma:.10g}, ĉ={solution.c_hat:.6g}")
        return report, EXIT_OK

    def cmd_simulate(self) -> Tuple[Report, int]:
        config = self._fork_join_config()
        statistic = Statistic(self.experiment.statistic or Statistic.MAX_WAIT_SUP.value)
        samples = self._simulate(config, statistic)
        csv_path = self.writer.write_samples(samples, f'samples_{statistic.value}.csv', config.to_dict())

        report = {
            'command': 'simulate',
            'status': 'ok',
            'statistic': statistic.value,
            'samples': str(csv_path),
            'manifest': samples.manifest(),
            'mean': samples.mean,
            'censored_fraction': samples.censored_fraction,
        }
        # 命中时间的截尾是正常取值；其他统计量的截尾表示截断步数不足
        if statistic is not Statistic.HITTING_TIME and samples.censored_fraction > self.thresholds.censored_limit:
            report.update(status='failed', reason='HorizonTooShort')
            logger.error(f"❌ 截尾比例 {samples.censored_fraction:.4f} 超过 {self.thresholds.censored_limit}")
            return report, EXIT_FAILURE
        return report, EXIT_OK

    def cmd_compare(self) -> Tuple[Report, int]:
        service = self.experiment.service_spec()
        lam = self.experiment.arrival_rate()
        sigma_A = self.experiment.arrival_sigma()
        solution = solve_gamma(service, lam, self.solver_config)
        law = self._select_law(solution, lam, sigma_A)

        if self.experiment.samples:
            try:
                values, censored, manifest = ResultWriter.read_samples(self.experiment.samples)
            except (OSError, ValueError, IndexError) as e:
                raise ConfigError(f"读取样本文件失败 {self.experiment.samples}: {e}") from e
            n_servers = int(manifest.get('n_servers') or self.experiment.n_servers)
            source = self.experiment.samples
        else:
            config = self._fork_join_config()
            statistic = Statistic(self.experiment.statistic or _LAW_STATISTICS[self.experiment.law].value)
            samples = self._simulate(config, statistic)
            source = self.writer.write_samples(samples, f'samples_{statistic.value}.csv', config.to_dict())
            values, censored, n_servers = samples.values, samples.censored, config.n_servers

        kept = values[~censored]
        comparison = self._compare_values(kept, law, n_servers, self._law_threshold(),
                                          f'qq_{self.experiment.law}.csv')
        report = {
            'command': 'compare',
            'status': 'ok' if comparison['passed'] else 'failed',
            'samples': str(source),
            'censored_fraction': float(np.mean(censored)) if censored.size else 0.0,
            **comparison,
        }
        if not comparison['passed']:
            report['reason'] = 'ThresholdExceeded'
            return report, EXIT_FAILURE
        return report, EXIT_OK

    def cmd_hetero(self) -> Tuple[Report, int]:
        services: List[DistributionSpec] = self.experiment.service_specs()
        alphas = self.experiment.class_alphas()
        lam = self.experiment.arrival_rate()
        sigma_A = self.experiment.arrival_sigma()

        classes = [ClassSpec(service, alpha, solve_gamma(service, lam, self.solver_config))
                   for service, alpha in zip(services, alphas)]
        report: Report = {
            'command': 'hetero',
            'lambda': lam,
            'classes': [{'index': k, 'service': c.service.to_dict(), 'alpha': c.alpha,
                         'solution': c.solution.to_dict()} for k, c in enumerate(classes)],
        }
        selection = hetero_select(classes, sigma_A, self.solver_config)
        report.update(status='ok', k_star=selection.k_star, law=selection.law.to_dict())
        logger.info(f"✅ 主导类别 k*={selection.k_star}")

        if not self.experiment.run_compare:
            return report, EXIT_OK

        config = self._fork_join_config()
        horizon = (Horizon(self.experiment.horizon_steps, self.sim_config.safety_factor)
                   if self.experiment.horizon_steps is not None
                   else default_horizon(classes[selection.k_star].solution, config.n_servers, self.sim_config))
        samples = self._simulate(config, Statistic.MAX_WAIT_SUP, horizon)
        source = self.writer.write_samples(samples, 'samples_hetero.csv', config.to_dict())
        comparison = self._compare_values(samples.uncensored, selection.law, config.n_servers,
                                          self.thresholds.hetero_ks, 'qq_hetero.csv')
        comparison['samples'] = str(source)
        report['compare'] = comparison
        if not comparison['passed']:
            report.update(status='failed', reason='ThresholdExceeded')
            return report, EXIT_FAILURE
        return report, EXIT_OK

    def cmd_verify(self) -> Tuple[Report, int]:
        service = self.experiment.service_spec() if (self.experiment.service or self.experiment.services) \
            else VERIFY_SERVICE
        arrival = self.experiment.arrival_spec() or VERIFY_ARRIVAL
        suite = VerifySuite(
            service, arrival,
            sizes=self.experiment.verify,
            thresholds=self.thresholds,
            solver_config=self.solver_config,
            sim_config=self.sim_config,
            master_seed=self.experiment.master_seed,
            parallelism=self.parallelism,
            n_grid=self.experiment.n_grid or None,
            epsilon_fraction=self.experiment.epsilon_fraction,
        )
        results = suite.run()
        summary = summarize(results)
        report = {
            'command': 'verify',
            'status': 'ok' if summary['passed'] else 'failed',
            'service': service.to_dict(),
            'arrival': arrival.to_dict(),
            'master_seed': self.experiment.master_seed,
            'solution': suite.solution.to_dict() if suite.solution else None,
            **summary,
        }
        return report, EXIT_OK if summary['passed'] else EXIT_FAILURE
