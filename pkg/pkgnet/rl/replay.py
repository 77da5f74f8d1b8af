"""Experience replay: uniform ring buffer and proportional prioritized replay"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from pkgnet.envs.grid import SymbolGrid
from pkgnet.errors import ContractError
from pkgnet.rl.sum_tree import SumTree


@dataclass(frozen=True)
class Transition:
    state: SymbolGrid
    action: int
    reward: float
    next_state: SymbolGrid
    done: bool


@dataclass
class Batch:
    transitions: List[Transition]
    indices: np.ndarray
    weights: np.ndarray

    @property
    def states(self) -> List[SymbolGrid]:
        return [t.state for t in self.transitions]

    @property
    def next_states(self) -> List[SymbolGrid]:
        return [t.next_state for t in self.transitions]

    @property
    def actions(self) -> np.ndarray:
        return np.array([t.action for t in self.transitions], dtype=np.int64)

    @property
    def rewards(self) -> np.ndarray:
        return np.array([t.reward for t in self.transitions], dtype=np.float32)

    @property
    def dones(self) -> np.ndarray:
        return np.array([t.done for t in self.transitions], dtype=np.float32)


class ReplayBuffer:
    """Fixed-capacity FIFO; the oldest transition is overwritten first"""

    def __init__(self, capacity: int, rng: np.random.Generator):
        if capacity < 1:
            raise ContractError(f"replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.rng = rng
        self.storage: List[Optional[Transition]] = [None] * capacity
        self.cursor = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def __contains__(self, transition: Any) -> bool:
        return any(t == transition for t in self.storage[:self.size] if t is not None)

    def add(self, transition: Transition) -> int:
        index = self.cursor
        self.storage[index] = transition
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        return index

    def sample(self, batch_size: int, beta: float = 0.0) -> Batch:
        if self.size == 0:
            raise ContractError("cannot sample from an empty replay buffer")
        indices = self.rng.integers(self.size, size=batch_size)
        return Batch([self.storage[i] for i in indices], indices, np.ones(batch_size, dtype=np.float32))

    def update_priorities(self, indices: Sequence[int], td_errors: np.ndarray) -> None:
        """Uniform replay ignores priorities"""


class PrioritizedReplayBuffer(ReplayBuffer):
    """
    Proportional prioritized replay

    Stored priority is (|TD error| + ε)^α; new transitions enter at the
    largest priority seen so far. Sampling is stratified over the sum tree
    and importance weights (N·P(i))^-β are normalised by their maximum over
    the buffer.
    """

    def __init__(self, capacity: int, rng: np.random.Generator, alpha: float = 0.6, epsilon: float = 1e-3):
        super().__init__(capacity, rng)
        self.alpha = alpha
        self.epsilon = epsilon
        self.tree = SumTree(capacity)
        self.max_priority = 1.0

    def add(self, transition: Transition) -> int:
        index = super().add(transition)
        self.tree.update(index, self.max_priority)
        return index

    def probabilities(self) -> np.ndarray:
        leaves = self.tree.leaves()[:self.size]
        return leaves / leaves.sum()

    def sample(self, batch_size: int, beta: float = 0.4) -> Batch:
        if self.size == 0:
            raise ContractError("cannot sample from an empty replay buffer")
        total = self.tree.total
        segment = total / batch_size
        draws = (np.arange(batch_size) + self.rng.random(batch_size)) * segment
        indices = np.array([min(self.tree.find(v), self.size - 1) for v in draws], dtype=np.int64)

        leaves = self.tree.leaves()[:self.size]
        probs = np.array([self.tree[i] for i in indices]) / total
        smallest = leaves[leaves > 0].min() / total
        weights = (self.size * probs) ** -beta / (self.size * smallest) ** -beta
        return Batch([self.storage[i] for i in indices], indices, weights.astype(np.float32))

    def update_priorities(self, indices: Sequence[int], td_errors: np.ndarray) -> None:
        priorities = (np.abs(np.asarray(td_errors, dtype=np.float64)) + self.epsilon) ** self.alpha
        for index, priority in zip(indices, priorities):
            self.tree.update(int(index), float(priority))
        self.max_priority = max(self.max_priority, float(priorities.max(initial=0.0)))
