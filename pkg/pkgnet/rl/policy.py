"""Action selection"""

from enum import Enum
from typing import Optional

import numpy as np

from pkgnet.core.ops import sample_categorical
from pkgnet.core.tensor import no_grad
from pkgnet.envs.grid import SymbolGrid
from pkgnet.knowledge.graph import KnowledgeGraph


class ActMode(str, Enum):
    EPSILON_GREEDY = "epsilon-greedy"
    CATEGORICAL = "categorical"
    GREEDY = "greedy"


def greedy_action(q_values: np.ndarray) -> int:
    """argmax with ties going to the lowest index"""
    return int(np.argmax(q_values))


def act(
    model,
    kg: Optional[KnowledgeGraph],
    grid: SymbolGrid,
    rng: np.random.Generator,
    mode: ActMode = ActMode.GREEDY,
    epsilon: float = 0.0,
) -> int:
    if mode == ActMode.EPSILON_GREEDY and rng.random() < epsilon:
        return int(rng.integers(model.num_actions))
    with no_grad():
        logits = model(kg, grid).q.data[0]
    if mode == ActMode.CATEGORICAL:
        return int(sample_categorical(logits, rng)[0])
    return greedy_action(logits)
