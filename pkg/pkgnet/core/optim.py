"""Adam optimizer"""

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from pkgnet.core.tensor import DTYPE, Tensor
from pkgnet.errors import ContractError


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: Mapping[str, Tensor], state: AdamState) -> None:
    """Bias-corrected Adam update of every parameter in place"""
    missing = [name for name, p in params.items() if p.grad is None]
    if missing:
        raise ContractError(f"adam_step: parameters without gradient: {missing}")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, p in params.items():
        m = state.first_moment.get(name)
        if m is None:
            m = state.first_moment[name] = np.zeros_like(p.data)
            state.second_moment[name] = np.zeros_like(p.data)
        v = state.second_moment[name]
        if m.shape != p.shape:
            raise ContractError(f"adam_step: moment buffer for {name} has shape {m.shape}, parameter {p.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * p.grad
        v *= state.beta2
        v += (1.0 - state.beta2) * p.grad * p.grad
        update = state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
        p.data -= update.astype(DTYPE)


class Adam:
    """Adam bound to a fixed parameter set"""

    def __init__(self, params: Mapping[str, Tensor], learning_rate: float,
                 beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.params = dict(params)
        self.state = AdamState(learning_rate, beta1, beta2, epsilon)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> None:
        """
        Update the parameters the last backward pass reached

        A parameter without a gradient (a value head under a Q loss, a weight
        network over an empty edge set) keeps its value and its moments. When
        no parameter has one, backward never ran and adam_step raises.
        """
        reached = {name: p for name, p in self.params.items() if p.grad is not None}
        adam_step(reached or self.params, self.state)

    def state_dict(self) -> dict:
        s = self.state
        return {
            "learning_rate": s.learning_rate, "beta1": s.beta1, "beta2": s.beta2,
            "epsilon": s.epsilon, "step": s.step,
            "first_moment": {k: v.copy() for k, v in s.first_moment.items()},
            "second_moment": {k: v.copy() for k, v in s.second_moment.items()},
        }

    def load_state_dict(self, state: dict) -> None:
        self.state = AdamState(**state)
