"""Model construction from a small JSON-able config, embedded in checkpoints"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from pkgnet.core.checkpoint import load_checkpoint, save_checkpoint
from pkgnet.core.module import Module
from pkgnet.errors import CheckpointError, ConfigurationError
from pkgnet.networks.baseline import (
    PACMAN_FILTERS,
    PACMAN_HIDDEN,
    SOKOBAN_FILTERS,
    SOKOBAN_HIDDEN,
    BaselineModel,
)
from pkgnet.networks.pkgnet import PKGNetModel

logger = logging.getLogger(__name__)

MODEL_KINDS = ("pkgnet", "pkgnet-no-sidebranch", "baseline")
WIDTH = 64


def model_config(
    kind: str,
    environment: str,
    alphabet: Sequence[str],
    edge_width: int,
    num_actions: int,
    value_head: bool = False,
) -> Dict:
    if kind not in MODEL_KINDS:
        raise ConfigurationError(f"unknown model kind {kind!r}; expected one of {list(MODEL_KINDS)}")
    if environment not in ("sokoban", "pacman"):
        raise ConfigurationError(f"unknown environment {environment!r}")
    return {
        "kind": kind,
        "environment": environment,
        "alphabet": list(alphabet),
        "edge_width": int(edge_width),
        "num_actions": int(num_actions),
        "value_head": bool(value_head),
    }


def build_model(config: Dict, rng: np.random.Generator) -> Module:
    kind, environment = config["kind"], config["environment"]
    hidden = PACMAN_HIDDEN if environment == "pacman" else SOKOBAN_HIDDEN
    if kind == "baseline":
        filters = PACMAN_FILTERS if environment == "pacman" else SOKOBAN_FILTERS
        model = BaselineModel(
            rng, config["alphabet"], config["num_actions"], filters, hidden, config["value_head"]
        )
    else:
        model = PKGNetModel(
            rng,
            vertex_width=len(config["alphabet"]),
            edge_width=config["edge_width"],
            num_actions=config["num_actions"],
            width=WIDTH,
            hidden=hidden,
            side_branch=kind == "pkgnet",
            value_head=config["value_head"],
        )
    logger.info(f"Built {kind} model for {environment} with {model.parameter_count()} parameters")
    return model


def save_model(path: Union[str, Path], model: Module, config: Dict, experiment: Optional[Dict] = None) -> None:
    extra = {"model": config}
    if experiment is not None:
        extra["experiment"] = experiment
    save_checkpoint(path, model.state_dict(), extra)


def load_model(path: Union[str, Path]) -> Tuple[Module, Dict]:
    """
    Rebuild a model from a checkpoint; parameters come from the file, not the init stream

    Returns the model and the checkpoint's config block ({"model": ..., "experiment": ...}).
    """
    params, extra = load_checkpoint(path)
    config = (extra or {}).get("model")
    if config is None:
        raise CheckpointError(f"checkpoint {path} carries no model config")
    model = build_model(config, np.random.default_rng(0))
    model.load_state_dict(params)
    return model, extra
