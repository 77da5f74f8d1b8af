"""Deep Q-learning update with an optional prioritized replay buffer"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pkgnet.core import ops
from pkgnet.core.module import Module
from pkgnet.core.optim import Adam
from pkgnet.core.tensor import no_grad
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.models.experiment import TrainConfig
from pkgnet.rl.replay import Batch, ReplayBuffer

logger = logging.getLogger(__name__)


def td_targets(target_model: Module, kg: Optional[KnowledgeGraph], batch: Batch, gamma: float) -> np.ndarray:
    """y = r + γ·max_a Q_target(s', a)·(1 - done)"""
    with no_grad():
        next_q = target_model(kg, batch.next_states).q.data
    return (batch.rewards + gamma * next_q.max(axis=-1) * (1.0 - batch.dones)).astype(np.float32)


def dqn_loss(model: Module, target_model: Module, kg: Optional[KnowledgeGraph], batch: Batch, gamma: float):
    """(weighted MSE loss tensor, TD errors)"""
    targets = td_targets(target_model, kg, batch, gamma)
    q = ops.take_along_last(model(kg, batch.states).q, batch.actions)
    return ops.mse_loss(q, targets, batch.weights), q.data - targets


def dqn_step(
    model: Module,
    target_model: Module,
    kg: Optional[KnowledgeGraph],
    buffer: ReplayBuffer,
    optimizer: Adam,
    config: TrainConfig,
    beta: float = 0.4,
) -> Optional[float]:
    """
    One gradient step on a sampled minibatch

    Returns None without touching anything while the buffer holds fewer
    than max(batch_size, warmup_steps) transitions.
    """
    if len(buffer) < max(config.batch_size, config.warmup_steps):
        return None
    batch = buffer.sample(config.batch_size, beta)
    optimizer.zero_grad()
    loss, td_errors = dqn_loss(model, target_model, kg, batch, config.gamma)
    loss.backward()
    optimizer.step()
    buffer.update_priorities(batch.indices, td_errors)
    return loss.item()


@dataclass
class DQNLearner:
    """Owns the online/target pair and syncs the target every `target_sync` updates"""
    model: Module
    target_model: Module
    optimizer: Adam
    config: TrainConfig
    updates: int = 0

    @classmethod
    def create(cls, model: Module, target_model: Module, config: TrainConfig) -> "DQNLearner":
        target_model.copy_from(model)
        return cls(model, target_model, Adam(model.parameters(), config.learning_rate), config)

    def learn(self, kg: Optional[KnowledgeGraph], buffer: ReplayBuffer, beta: float = 0.4) -> Optional[float]:
        loss = dqn_step(self.model, self.target_model, kg, buffer, self.optimizer, self.config, beta)
        if loss is None:
            return None
        self.updates += 1
        if self.updates % self.config.target_sync == 0:
            self.target_model.copy_from(self.model)
            logger.debug(f"Synced target network after {self.updates} updates")
        return loss
