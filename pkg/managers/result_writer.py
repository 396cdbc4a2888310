# -*- coding: utf-8 -*-
"""
Module: result_writer.py
Author: Takeshi
Date: 2026-02-14

Description:
    实验结果落盘
    - 样本: CSV（表头 replication,value,censored）+ 同名 .manifest.json
    - QQ 表: CSV（表头 p,empirical_quantile,predicted_quantile）
    - 报告: JSON
    全部 UTF-8，逗号分隔，小数点为 '.'，不依赖 locale
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from core.sim import SampleSet

logger = logging.getLogger(__name__)

SAMPLE_HEADER = ('replication', 'value', 'censored')
QQ_HEADER = ('p', 'empirical_quantile', 'predicted_quantile')
MANIFEST_SUFFIX = '.manifest.json'


def _format_number(value: float) -> str:
    """repr 保证往返精确；非有限值写成 JSON 同样能识别的字面量"""
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)


def _json_safe(obj: Any) -> Any:
    """把 numpy 标量和非有限浮点数转成标准 JSON 可表示的值"""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def manifest_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + MANIFEST_SUFFIX)


class ResultWriter:
    """输出目录下的结果文件读写"""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)

    def _target(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def _atomic_write_text(self, path: Path, writer) -> Path:
        temp_file = path.with_suffix(path.suffix + '.tmp')
        with open(temp_file, 'w', encoding='utf-8', newline='') as f:
            writer(f)
        temp_file.replace(path)
        return path

    # ============== 样本 ==============

    def write_samples(self, sample_set: SampleSet, name: str,
                      config: Optional[Dict[str, Any]] = None) -> Path:
        """写样本 CSV 和清单，返回 CSV 路径"""
        csv_path = self._target(name)

        def write_rows(f):
            w = csv.writer(f, lineterminator='\n')
            w.writerow(SAMPLE_HEADER)
            for r, (value, censored) in enumerate(zip(sample_set.values, sample_set.censored)):
                w.writerow((r, _format_number(value), int(bool(censored))))

        self._atomic_write_text(csv_path, write_rows)

        manifest = sample_set.manifest()
        if config is not None:
            manifest['config'] = config
        self.write_json(manifest_path(csv_path).name, manifest)
        logger.info(f"✅ 样本已写入: {csv_path} ({len(sample_set)} 行)")
        return csv_path

    @staticmethod
    def read_samples(path: str) -> Tuple[np.ndarray, np.ndarray, Dict[str, Any]]:
        """
        读取样本 CSV 和同名清单（清单缺失时返回空字典）

        Raises:
            FileNotFoundError: CSV 不存在
            ValueError: 表头不符
        """
        csv_path = Path(path)
        values = []
        censored = []
        with open(csv_path, 'r', encoding='utf-8', newline='') as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != SAMPLE_HEADER:
                raise ValueError(f"样本文件表头应为 {','.join(SAMPLE_HEADER)}: {csv_path}")
            for row in reader:
                if not row:
                    continue
                values.append(float(row[1]))
                censored.append(row[2].strip() in ('1', 'true', 'True'))

        manifest: Dict[str, Any] = {}
        sidecar = manifest_path(csv_path)
        if sidecar.exists():
            with open(sidecar, 'r', encoding='utf-8') as f:
                manifest = json.load(f)
        else:
            logger.warning(f"样本清单不存在: {sidecar}")
        return np.asarray(values, dtype=float), np.asarray(censored, dtype=bool), manifest

    # ============== QQ 表 / 报告 ==============

    def write_qq(self, rows: Iterable[Sequence[float]], name: str) -> Path:
        csv_path = self._target(name)

        def write_rows(f):
            w = csv.writer(f, lineterminator='\n')
            w.writerow(QQ_HEADER)
            for p, empirical, predicted in rows:
                w.writerow((_format_number(p), _format_number(empirical), _format_number(predicted)))

        self._atomic_write_text(csv_path, write_rows)
        logger.debug(f"QQ 表已写入: {csv_path}")
        return csv_path

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        path = self._target(name)

        def dump(f):
            json.dump(_json_safe(data), f, ensure_ascii=False, indent=2, sort_keys=False)
            f.write('\n')

        self._atomic_write_text(path, dump)
        logger.debug(f"JSON 已写入: {path}")
        return path


def report_to_text(report: Dict[str, Any]) -> str:
    """报告的单行 JSON 文本（标准输出使用）"""
    return json.dumps(_json_safe(report), ensure_ascii=False)
