"""Environments, maze sets and knowledge graphs for an experiment config"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from pkgnet.envs import pacman, sokoban
from pkgnet.envs.grid import Action, StepResult, SymbolGrid
from pkgnet.errors import ConfigurationError
from pkgnet.knowledge.builders import build_pacman_kg, complete_sokoban_kg
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.knowledge.variants import scene_graph
from pkgnet.models.experiment import Environment, EvalSplit, ExperimentConfig
from pkgnet.networks.factory import model_config

logger = logging.getLogger(__name__)

StepFn = Callable[[object, int, np.random.Generator], StepResult]


@dataclass
class Split:
    """Start states of one evaluation set and the graph the agent reads there"""
    starts: List[object]
    grids: List[SymbolGrid]
    kg: KnowledgeGraph


@dataclass
class World:
    config: ExperimentConfig
    agent: str
    alphabet: Tuple[str, ...]
    complete_kg: KnowledgeGraph
    train: Split
    test: Split
    forbidden: frozenset
    max_steps: int
    step: StepFn

    def split(self, name: EvalSplit) -> Split:
        return self.train if EvalSplit(name) == EvalSplit.TRAIN else self.test

    def make_env(self, rng: np.random.Generator):
        """Training environment over the training split"""
        if self.config.environment == Environment.SOKOBAN:
            variation = sokoban.get_variation(self.config.variation)
            return sokoban.SokobanEnv(variation, [s.grid for s in self.train.starts], rng, self.max_steps)
        return pacman.PacmanEnv(self.train.starts[0].layout, rng, self.max_steps)

    def model_config(self, value_head: bool) -> dict:
        return model_config(
            self.config.model.value,
            self.config.environment.value,
            self.alphabet,
            self.train.kg.edge_width,
            len(Action),
            value_head,
        )

    def check_leakage(self, grid: SymbolGrid) -> None:
        leaked = grid.symbols() & self.forbidden
        if leaked:
            raise ConfigurationError(f"test-only symbols {sorted(leaked)} appeared in a training grid")


def _sokoban_world(config: ExperimentConfig, variation_name: Optional[str] = None, maze_seed: Optional[int] = None,
                   num_train: Optional[int] = None, num_test: Optional[int] = None) -> World:
    variation = sokoban.get_variation(variation_name or config.variation)
    max_steps = config.max_steps or sokoban.MAX_STEPS
    complete = complete_sokoban_kg(variation)
    train_grids, test_grids = sokoban.generate_sokoban_mazes(
        variation,
        config.maze_seed if maze_seed is None else maze_seed,
        num_train or config.num_train_mazes,
        num_test or config.num_test_mazes,
    )
    overlap = set(train_grids) & set(test_grids)
    if overlap:
        raise ConfigurationError(f"{len(overlap)} mazes appear in both the train and test sets")

    def step(state, action, rng):
        return sokoban.sokoban_step(state, action, variation, max_steps)

    return World(
        config=config,
        agent=sokoban.AGENT,
        alphabet=complete.registry,
        complete_kg=complete,
        train=Split([sokoban.SokobanState(g) for g in train_grids], train_grids,
                    scene_graph(complete, config.kg_variant, variation.symbols("train"))),
        test=Split([sokoban.SokobanState(g) for g in test_grids], test_grids,
                   scene_graph(complete, config.kg_variant, variation.symbols("test"))),
        forbidden=frozenset(variation.test_only_symbols()),
        max_steps=max_steps,
        step=step,
    )


def _pacman_world(config: ExperimentConfig) -> World:
    max_steps = config.max_steps or pacman.MAX_STEPS
    kg = build_pacman_kg()
    train_layout = pacman.load_layout(config.layout)
    test_layout = pacman.load_layout(config.test_layout) if config.test_layout else train_layout

    def step(state, action, rng):
        return pacman.pacman_step(state, action, rng, max_steps)

    def split(layout):
        start = pacman.PacmanState.initial(layout)
        return Split([start], [start.render()], kg)

    return World(
        config=config,
        agent=pacman.PLAYER,
        alphabet=tuple(pacman.ALPHABET),
        complete_kg=kg,
        train=split(train_layout),
        test=split(test_layout),
        forbidden=frozenset(),
        max_steps=max_steps,
        step=step,
    )


def build_world(config: ExperimentConfig, **overrides) -> World:
    if config.environment == Environment.SOKOBAN:
        world = _sokoban_world(config, **overrides)
    else:
        world = _pacman_world(config)
    logger.info(
        f"World for {config.name}: {len(world.train.grids)} train / {len(world.test.grids)} test starts, "
        f"graph {world.train.kg.num_vertices} vertices / {len(world.train.kg.edges)} edges"
    )
    return world
