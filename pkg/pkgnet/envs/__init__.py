"""Symbolic grid-world environments"""
from pkgnet.envs.grid import Action, SymbolGrid, StepResult, encode_onehot, encode_onehot_batch
from pkgnet.envs.sokoban import (
    SokobanEnv,
    SokobanState,
    SokobanVariation,
    VARIATIONS,
    generate_sokoban_mazes,
    get_variation,
    load_mazes,
    save_mazes,
    sokoban_step,
)
from pkgnet.envs.pacman import PacmanEnv, PacmanLayout, PacmanState, load_layout, pacman_step

__all__ = [
    "Action",
    "SymbolGrid",
    "StepResult",
    "encode_onehot",
    "encode_onehot_batch",
    "SokobanEnv",
    "SokobanState",
    "SokobanVariation",
    "VARIATIONS",
    "generate_sokoban_mazes",
    "get_variation",
    "load_mazes",
    "save_mazes",
    "sokoban_step",
    "PacmanEnv",
    "PacmanLayout",
    "PacmanState",
    "load_layout",
    "pacman_step"
]
