# -*- coding: utf-8 -*-
"""命令行子命令与退出码"""

import json
import math

import pytest

from core.dist import Exponential
from core.errors import BoundaryRoot
from core.lundberg import solve_gamma
from defaults.config_manager import ConfigError, ConfigManager
from defaults.experiment_default import ExperimentConfig
from main import main
from managers.command_manager import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, CommandManager

EXP2 = {'family': 'exponential', 'rate': 2.0}
EXP1 = {'family': 'exponential', 'rate': 1.0}


@pytest.fixture
def run_command(tmp_path):
    """用临时输出目录和默认全局设置执行命令，返回 (报告, 退出码)"""
    settings = str(tmp_path / 'settings.json')

    def run(command, data, out='out'):
        data = dict(data, output_dir=str(tmp_path / out))
        experiment = ExperimentConfig.from_dict(data)
        return CommandManager(experiment, ConfigManager(settings)).execute(command)

    return run


def _write_samples(directory, values, n_servers):
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / 'given.csv'
    rows = ['replication,value,censored'] + [f'{r},{v!r},0' for r, v in enumerate(values)]
    csv_path.write_text('\n'.join(rows) + '\n', encoding='utf-8')
    (directory / 'given.manifest.json').write_text(json.dumps({'n_servers': n_servers}), encoding='utf-8')
    return str(csv_path)


class TestGamma:

    def test_exponential(self, run_command, tmp_path):
        report, code = run_command('gamma', {'service': EXP2, 'lambda': 1.0})
        assert code == EXIT_OK
        assert report['gamma'] == pytest.approx(1.5936, abs=1e-4)
        assert report['c_hat'] == pytest.approx(0.4296, abs=1e-4)
        assert report['lambda_prime'] * report['gamma'] * report['c_hat'] == pytest.approx(1.0, abs=1e-12)
        assert report['lambda_double_prime'] > 0
        assert report['interior'] is True
        assert 'solution' not in report
        assert report['duality_product'] == pytest.approx(1.0, abs=1e-8)
        written = json.loads((tmp_path / 'out' / 'gamma.json').read_text(encoding='utf-8'))
        assert written['exit_code'] == EXIT_OK

    @pytest.mark.parametrize('service, reason', [
        ({'family': 'deterministic', 'value': 0.4}, 'NoRoot'),
        ({'family': 'exponential', 'rate': 0.5}, 'Unstable'),
    ])
    def test_domain_errors(self, run_command, service, reason):
        report, code = run_command('gamma', {'service': service, 'lambda': 1.0})
        assert code == EXIT_FAILURE
        assert report['status'] == 'error'
        assert report['reason'] == reason

    def test_boundary_root_keeps_flat_solution(self, run_command, monkeypatch):
        solution = solve_gamma(Exponential(2.0), 1.0)

        def raise_boundary(*args, **kwargs):
            raise BoundaryRoot("根位于定义域边界", solution=solution)

        monkeypatch.setattr('managers.command_manager.solve_gamma', raise_boundary)
        report, code = run_command('gamma', {'service': EXP2, 'lambda': 1.0})
        assert code == EXIT_FAILURE
        assert report['reason'] == 'BoundaryRoot'
        assert report['gamma'] == pytest.approx(solution.gamma)
        assert 'solution' not in report


class TestSimulate:

    def test_deterministic_system_never_waits(self, run_command, tmp_path):
        report, code = run_command('simulate', {
            'service': {'family': 'deterministic', 'value': 0.4},
            'arrival': {'family': 'deterministic', 'value': 1.0},
            'n_servers': 5, 'replications': 20,
        })
        assert code == EXIT_OK
        assert report['mean'] == 0.0
        assert report['censored_fraction'] == 0.0
        lines = (tmp_path / 'out' / 'samples_max-wait-sup.csv').read_text(encoding='utf-8').splitlines()
        assert len(lines) == 21
        assert all(line.split(',')[1] == '0.0' for line in lines[1:])

    def test_same_seed_same_file(self, run_command, tmp_path):
        data = {'service': EXP2, 'arrival': EXP1, 'n_servers': 20, 'replications': 30,
                'horizon_steps': 200, 'master_seed': 9}
        run_command('simulate', data, out='a')
        run_command('simulate', dict(data, parallelism=3), out='b')
        name = 'samples_max-wait-sup.csv'
        assert (tmp_path / 'a' / name).read_text() == (tmp_path / 'b' / name).read_text()

    def test_requires_arrival(self, run_command):
        with pytest.raises(ConfigError):
            run_command('simulate', {'service': EXP2, 'lambda': 1.0})


class TestCompare:

    def test_far_samples_fail(self, run_command, tmp_path):
        samples = _write_samples(tmp_path / 'given', [1000.0] * 50, 20)
        report, code = run_command('compare', {'service': EXP2, 'arrival': EXP1, 'samples': samples})
        assert code == EXIT_FAILURE
        assert report['reason'] == 'ThresholdExceeded'
        assert report['ks_distance'] == pytest.approx(1.0, abs=1e-6)
        qq = (tmp_path / 'out' / 'qq_wait.csv').read_text(encoding='utf-8').splitlines()
        assert qq[0] == 'p,empirical_quantile,predicted_quantile'
        assert len(qq) == 100

    def test_degenerate_law_uses_point_mass(self, run_command, tmp_path, exp2):
        center = (1.0 / solve_gamma(exp2, 1.0).gamma) * math.log(20)
        samples = _write_samples(tmp_path / 'given', [center] * 30, 20)
        report, code = run_command('compare', {
            'service': EXP2, 'arrival': {'family': 'deterministic', 'value': 1.0}, 'samples': samples,
        })
        assert code == EXIT_OK
        assert report['degenerate']
        assert report['threshold'] == 0.0
        assert report['ks_distance'] == 0.0

    def test_bound_law_rejects_bad_epsilon(self, run_command, tmp_path):
        samples = _write_samples(tmp_path / 'given', [1.0] * 10, 20)
        report, code = run_command('compare', {
            'service': EXP2, 'arrival': EXP1, 'samples': samples, 'law': 'lower-bound', 'epsilon': 5.0,
        })
        assert code == EXIT_FAILURE
        assert report['reason'] == 'InvalidParameter'


class TestHetero:

    def test_slowest_class_dominates(self, run_command):
        report, code = run_command('hetero', {
            'services': [EXP2, {'family': 'exponential', 'rate': 4.0}], 'alphas': [0.5, 0.5], 'arrival': EXP1,
        })
        assert code == EXIT_OK
        assert report['k_star'] == 0
        assert report['law']['center_coeff'] == pytest.approx(1.0 / 1.5936, abs=1e-3)

    def test_single_class_matches_gamma(self, run_command):
        report, code = run_command('hetero', {'services': [EXP2], 'arrival': EXP1})
        gamma_report, _ = run_command('gamma', {'service': EXP2, 'arrival': EXP1}, out='g')
        assert code == EXIT_OK
        assert report['k_star'] == 0
        class_solution = report['classes'][0]['solution']
        assert class_solution == {key: gamma_report[key] for key in class_solution}

    def test_tie_is_ambiguous(self, run_command):
        report, code = run_command('hetero', {'services': [EXP2, EXP2], 'lambda': 1.0})
        assert code == EXIT_FAILURE
        assert report['reason'] == 'AmbiguousMinimum'
        assert report['indices'] == [0, 1]


class TestVerify:

    def test_no_root_service_skips(self, run_command):
        report, code = run_command('verify', {
            'service': {'family': 'deterministic', 'value': 0.4}, 'arrival': EXP1,
            'verify': {'sweep_size': 4, 'n_servers': 5, 'steps': 100, 'replications': 50,
                       'tail_replications': 100, 'centering_replications': 10},
        })
        checks = {c['name']: c for c in report['checks']}
        for name in ('derivative_consistency', 'window_contribution', 'tail_slope', 'centering_slope'):
            assert checks[name]['status'] == 'skip'
            assert checks[name]['reason'] == 'NoRoot'
        assert report['solution'] is None
        assert code in (EXIT_OK, EXIT_FAILURE)


class TestMain:

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        code = main(['gamma', '--settings', str(tmp_path / 'settings.json'), '--quiet'])
        assert code == EXIT_CONFIG
        report = json.loads(capsys.readouterr().out.strip())
        assert report['reason'] == 'ConfigError'

    def test_unparseable_config(self, tmp_path, capsys):
        bad = tmp_path / 'exp.json'
        bad.write_text('{"service": ', encoding='utf-8')
        code = main(['gamma', '--config', str(bad), '--settings', str(tmp_path / 'settings.json'), '--quiet'])
        assert code == EXIT_CONFIG

    def test_gamma_prints_one_line(self, tmp_path, capsys):
        config = tmp_path / 'exp.json'
        config.write_text(json.dumps({'service': EXP2, 'lambda': 1.0}), encoding='utf-8')
        code = main(['gamma', '--config', str(config), '--out', str(tmp_path / 'out'),
                     '--settings', str(tmp_path / 'settings.json'), '--quiet'])
        assert code == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 1
        assert json.loads(out[0])['gamma'] == pytest.approx(1.5936, abs=1e-4)
        assert (tmp_path / 'out' / 'gamma.json').exists()

    def test_override_must_be_valid(self, tmp_path):
        config = tmp_path / 'exp.json'
        config.write_text(json.dumps({'service': EXP2, 'lambda': 1.0}), encoding='utf-8')
        code = main(['gamma', '--config', str(config), '--parallelism', '0',
                     '--settings', str(tmp_path / 'settings.json'), '--quiet'])
        assert code == EXIT_CONFIG
