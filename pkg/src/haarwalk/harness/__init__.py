"""Experiment presets, ensemble runs and artifact emission."""
from __future__ import annotations

import logging
from pathlib import Path

from .config import ConfigError, ExperimentConfig, apply_overrides, load_config, parse_config
from .converge import detect_convergence
from .emit import HarnessIOError, emit_csv, emit_json, emit_svg, read_csv, summary
from .presets import PRESETS, preset_document
from .runner import COLUMNS, ResultTable, run_experiment, worker_count

log = logging.getLogger(__name__)


def preset_config(preset_id: str, overrides=None) -> ExperimentConfig:
    try:
        doc = preset_document(preset_id)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    return parse_config(apply_overrides(doc, overrides or {}))


def write_outputs(table: ResultTable, csv_path=None, json_path=None, svg_path=None) -> None:
    out = table.config.output
    csv_path = csv_path or out.get("csv_path")
    json_path = json_path or out.get("json_path")
    svg_path = svg_path or out.get("svg_path")
    if csv_path:
        emit_csv(table, csv_path)
    if json_path:
        emit_json(summary(table), json_path)
    if svg_path:
        emit_svg(table, svg_path)


def run_preset(preset_id: str, overrides=None, out_dir=None, workers: int | None = None) -> ResultTable:
    """Expand a preset, run it, and (with ``out_dir``) write <id>.csv/.json/.svg there."""
    cfg = preset_config(preset_id, overrides)
    log.info("preset %s resolved to %s", preset_id, cfg.to_dict())
    table = run_experiment(cfg, workers=workers)
    if out_dir is not None:
        d = Path(out_dir)
        write_outputs(table, d / f"{preset_id}.csv", d / f"{preset_id}.json", d / f"{preset_id}.svg")
    return table


__all__ = [
    "COLUMNS", "ConfigError", "ExperimentConfig", "HarnessIOError", "PRESETS", "ResultTable",
    "apply_overrides", "detect_convergence", "emit_csv", "emit_json", "emit_svg", "load_config",
    "parse_config", "preset_config", "read_csv", "run_experiment", "run_preset", "summary",
    "worker_count", "write_outputs",
]
