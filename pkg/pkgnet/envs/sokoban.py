"""Ball-and-bucket Sokoban on a walled 10×10 arena"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from pkgnet.envs.grid import BLANK, Action, SymbolGrid, StepResult, shift
from pkgnet.errors import ConfigurationError

logger = logging.getLogger(__name__)

AGENT = "A"
WALL = "+"
SIZE = 10
MAX_STEPS = 100
PAIR_REWARD = 3.0
STEP_PENALTY = -0.1
NUM_TRAIN_MAZES = 100
NUM_TEST_MAZES = 20

Pair = Tuple[str, str]


@dataclass(frozen=True)
class SokobanVariation:
    """Rewarded ball→bucket pairs for the training and test games"""
    name: str
    train_pairs: Tuple[Pair, ...]
    test_pairs: Tuple[Pair, ...]

    def __post_init__(self):
        train_balls = {ball for ball, _ in self.train_pairs}
        leaked = sorted(train_balls & {ball for ball, _ in self.test_pairs})
        if leaked:
            raise ConfigurationError(f"variation {self.name}: test balls {leaked} also appear in training")

    @property
    def rewarded(self) -> Dict[str, str]:
        return dict(self.train_pairs + self.test_pairs)

    def groups(self, split: str) -> Dict[str, List[str]]:
        """bucket -> rewarded balls for 'train' or 'test'"""
        pairs = self.train_pairs if split == "train" else self.test_pairs
        grouped: Dict[str, List[str]] = {}
        for ball, bucket in pairs:
            grouped.setdefault(bucket, []).append(ball)
        return grouped

    def symbols(self, split: str) -> List[str]:
        """Agent, balls, buckets and wall appearing in `split` mazes, in registry order"""
        pairs = self.train_pairs if split == "train" else self.test_pairs
        balls = [ball for ball, _ in pairs]
        buckets = list(dict.fromkeys(bucket for _, bucket in pairs))
        return [AGENT] + balls + buckets + [WALL]

    def all_symbols(self) -> List[str]:
        balls = [ball for ball, _ in self.train_pairs + self.test_pairs]
        buckets = list(dict.fromkeys(bucket for _, bucket in self.train_pairs + self.test_pairs))
        return [AGENT] + balls + buckets + [WALL]

    def test_only_symbols(self) -> set:
        return set(self.symbols("test")) - set(self.symbols("train"))


def _pairs(groups: Sequence[Tuple[str, str]]) -> Tuple[Pair, ...]:
    return tuple((ball, bucket) for balls, bucket in groups for ball in balls)


VARIATIONS: Dict[str, SokobanVariation] = {
    v.name: v for v in (
        SokobanVariation("one-one", _pairs([("b", "B")]), _pairs([("c", "B")])),
        SokobanVariation("two-one", _pairs([("bc", "B")]), _pairs([("d", "B")])),
        SokobanVariation("five-two", _pairs([("bcdef", "B")]), _pairs([("gh", "B")])),
        SokobanVariation(
            "buckets",
            _pairs([("b", "B"), ("c", "C"), ("d", "D"), ("e", "E"), ("f", "F")]),
            _pairs([("g", "G"), ("h", "H"), ("i", "I"), ("j", "J"), ("k", "K")]),
        ),
        SokobanVariation(
            "buckets-repeat",
            _pairs([("bcd", "B"), ("efg", "C"), ("hij", "D"), ("klm", "E"), ("nop", "F")]),
            _pairs([("qrs", "G"), ("tuv", "H"), ("wxy", "I"), ("345", "J"), ("678", "K")]),
        ),
    )
}


def get_variation(name: str) -> SokobanVariation:
    try:
        return VARIATIONS[name]
    except KeyError:
        raise ConfigurationError(f"unknown Sokoban variation {name!r}; known: {sorted(VARIATIONS)}")


@dataclass(frozen=True)
class SokobanState:
    grid: SymbolGrid
    steps: int = 0


def empty_arena(size: int = SIZE) -> SymbolGrid:
    rows = [WALL * size] + [WALL + BLANK * (size - 2) + WALL for _ in range(size - 2)] + [WALL * size]
    return SymbolGrid.from_rows(rows)


def _place(variation: SokobanVariation, split: str, rng: np.random.Generator, size: int) -> SymbolGrid:
    entities = [AGENT]
    for bucket, balls in variation.groups(split).items():
        entities.append(bucket)
        entities.append(balls[int(rng.integers(len(balls)))])
    interior = [(r, c) for r in range(1, size - 1) for c in range(1, size - 1)]
    if len(entities) > len(interior):
        raise ConfigurationError(
            f"variation {variation.name}: {len(entities)} entities do not fit in {len(interior)} interior cells"
        )
    chosen = rng.choice(len(interior), size=len(entities), replace=False)
    return empty_arena(size).replace({interior[i]: symbol for i, symbol in zip(chosen, entities)})


def generate_sokoban_mazes(
    variation: SokobanVariation,
    seed: int,
    num_train: int = NUM_TRAIN_MAZES,
    num_test: int = NUM_TEST_MAZES,
    size: int = SIZE,
) -> Tuple[List[SymbolGrid], List[SymbolGrid]]:
    """Training and test maze sets, deterministic per seed"""
    train_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(0,))))
    test_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1,))))
    train = [_place(variation, "train", train_rng, size) for _ in range(num_train)]
    test = [_place(variation, "test", test_rng, size) for _ in range(num_test)]
    logger.info(f"Generated {len(train)} train and {len(test)} test mazes for {variation.name} (seed {seed})")
    return train, test


def save_mazes(path: Union[str, Path], mazes: Sequence[SymbolGrid]) -> Path:
    """Write one maze per line as a JSON list of row strings"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for grid in mazes:
            fh.write(json.dumps(grid.rows()) + "\n")
    return path


def load_mazes(path: Union[str, Path]) -> List[SymbolGrid]:
    with open(path, encoding="utf-8") as fh:
        return [SymbolGrid.from_rows(json.loads(line)) for line in fh if line.strip()]


def sokoban_step(
    state: Union[SokobanState, SymbolGrid],
    action,
    variation: SokobanVariation,
    max_steps: int = MAX_STEPS,
) -> StepResult:
    """
    Move the agent one cell, pushing a ball if one is in the way

    Walls and buckets block the agent. A ball moves into an empty cell or,
    when the cell holds its rewarded bucket, disappears for PAIR_REWARD.
    Anything else behind the ball blocks the push.
    """
    action = Action.parse(action)
    if isinstance(state, SymbolGrid):
        state = SokobanState(state)
    grid = state.grid
    rewarded = variation.rewarded
    agent = grid.find(AGENT)
    if len(agent) != 1:
        raise ConfigurationError(f"grid must contain exactly one agent, found {len(agent)}")
    agent = agent[0]

    reward = STEP_PENALTY
    events: List[str] = []
    target = shift(agent, action)
    occupant = grid[target]
    updates: Dict[Tuple[int, int], str] = {}

    if occupant == BLANK:
        updates = {agent: BLANK, target: AGENT}
    elif occupant in rewarded:
        beyond = shift(target, action)
        behind = grid[beyond]
        if behind == BLANK:
            updates = {agent: BLANK, target: AGENT, beyond: occupant}
            events.append("push")
        elif behind == rewarded[occupant]:
            updates = {agent: BLANK, target: AGENT}
            reward += PAIR_REWARD
            events.append("pair")
        else:
            events.append("blocked")
    else:
        if occupant != WALL:
            events.append("bucket_push_attempt")
        events.append("blocked")

    next_grid = grid.replace(updates) if updates else grid
    steps = state.steps + 1
    success = not any(next_grid.count(ball) for ball in rewarded)
    return StepResult(
        state=SokobanState(next_grid, steps),
        grid=next_grid,
        reward=reward,
        done=success or steps >= max_steps,
        success=success,
        truncated=not success and steps >= max_steps,
        events=events,
    )


class SokobanEnv:
    """Episodic wrapper cycling over a fixed maze set"""

    def __init__(self, variation: SokobanVariation, mazes: Sequence[SymbolGrid],
                 rng: Optional[np.random.Generator] = None, max_steps: int = MAX_STEPS):
        if not mazes:
            raise ConfigurationError("SokobanEnv needs at least one maze")
        self.variation = variation
        self.mazes = list(mazes)
        self.rng = rng or np.random.default_rng(0)
        self.max_steps = max_steps
        self.state: Optional[SokobanState] = None

    @property
    def num_actions(self) -> int:
        return len(Action)

    def reset(self, index: Optional[int] = None) -> SymbolGrid:
        if index is None:
            index = int(self.rng.integers(len(self.mazes)))
        self.state = SokobanState(self.mazes[index])
        return self.state.grid

    def step(self, action) -> StepResult:
        if self.state is None:
            raise ConfigurationError("step() called before reset()")
        result = sokoban_step(self.state, action, self.variation, self.max_steps)
        self.state = result.state
        return result
