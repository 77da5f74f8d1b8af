"""Helpers shared by the subcommands"""

import json
from pathlib import Path
from typing import Optional

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import ExperimentConfig, RunRecord


def load_experiment_config(path: str) -> ExperimentConfig:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigurationError(f"config file {config_path} does not exist")
    return ExperimentConfig.model_validate_json(config_path.read_text(encoding="utf-8"))


def output_root(flag: Optional[str], config: Optional[ExperimentConfig] = None) -> Path:
    """--output wins over the config's output_dir; there is no implicit default"""
    root = flag or (config.output_dir if config else None)
    if not root:
        raise ConfigurationError("no output directory: pass --output or set output_dir in the config")
    return Path(root)


def run_summary(record: RunRecord) -> dict:
    last = {e.split.value: e for e in record.evals}
    return {
        "experiment": record.config.name,
        "seed": record.seed,
        "status": record.status,
        "episodes": len(record.episodes),
        "final_train_success": last["train"].success_rate if "train" in last else None,
        "final_test_success": last["test"].success_rate if "test" in last else None,
        "final_train_return": last["train"].mean_return if "train" in last else None,
        "checkpoint": record.checkpoint,
    }


def print_json(payload) -> None:
    print(json.dumps(payload, indent=2, default=str))
