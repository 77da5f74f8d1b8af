"""Synchronous single-stream advantage actor-critic"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from pkgnet.core import ops
from pkgnet.core.module import Module
from pkgnet.core.optim import Adam
from pkgnet.core.tensor import no_grad
from pkgnet.envs.grid import SymbolGrid
from pkgnet.errors import ContractError
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.models.experiment import TrainConfig


@dataclass
class Rollout:
    states: List[SymbolGrid] = field(default_factory=list)
    actions: List[int] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    dones: List[bool] = field(default_factory=list)
    last_state: Optional[SymbolGrid] = None

    def __len__(self) -> int:
        return len(self.actions)

    def add(self, state: SymbolGrid, action: int, reward: float, next_state: SymbolGrid, done: bool) -> None:
        self.states.append(state)
        self.actions.append(int(action))
        self.rewards.append(float(reward))
        self.dones.append(bool(done))
        self.last_state = next_state


@dataclass
class A2CStats:
    policy_loss: float
    value_loss: float
    entropy: float


def nstep_returns(rewards, dones, bootstrap: float, gamma: float) -> np.ndarray:
    """Discounted returns, cut at episode ends, bootstrapped from the last state"""
    returns = np.zeros(len(rewards), dtype=np.float32)
    running = bootstrap
    for t in reversed(range(len(rewards))):
        running = rewards[t] + gamma * running * (1.0 - float(dones[t]))
        returns[t] = running
    return returns


def a2c_update(
    model: Module,
    kg: Optional[KnowledgeGraph],
    rollout: Rollout,
    optimizer: Adam,
    config: TrainConfig,
) -> A2CStats:
    """loss = -mean(log π(a|s)·A) + c_v·MSE(V, R) - c_e·mean(H(π))"""
    if len(rollout) == 0:
        raise ContractError("a2c_update needs a non-empty rollout")
    bootstrap = 0.0
    if not rollout.dones[-1]:
        with no_grad():
            bootstrap = float(model(kg, rollout.last_state).value.data[0])
    returns = nstep_returns(rollout.rewards, rollout.dones, bootstrap, config.gamma)

    optimizer.zero_grad()
    output = model(kg, rollout.states)
    if output.value is None:
        raise ContractError("a2c_update needs a model with a value head")
    advantages = returns - output.value.data
    chosen = ops.take_along_last(ops.log_softmax(output.q), np.asarray(rollout.actions))
    policy_loss = ops.neg(ops.mean_all(ops.mul(chosen, advantages)))
    value_loss = ops.mse_loss(output.value, returns)
    entropy = ops.mean_all(ops.entropy(output.q))
    loss = ops.sub(
        ops.add(policy_loss, ops.mul(value_loss, config.value_coef)),
        ops.mul(entropy, config.entropy_coef),
    )
    loss.backward()
    optimizer.step()
    return A2CStats(policy_loss.item(), value_loss.item(), entropy.item())
