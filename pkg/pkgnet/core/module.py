"""Parameter containers"""

from typing import Dict, Iterator, Mapping, Tuple

import numpy as np

from pkgnet.core.tensor import DTYPE, Tensor
from pkgnet.errors import DimensionError


def fan_in_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, name: str) -> Tensor:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights"""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return Tensor(rng.uniform(-bound, bound, size=shape).astype(DTYPE), requires_grad=True, name=name)


def zeros_parameter(shape: Tuple[int, ...], name: str) -> Tensor:
    return Tensor(np.zeros(shape, dtype=DTYPE), requires_grad=True, name=name)


class Module:
    """
    Base class for anything owning parameters

    Parameters are Tensor attributes with requires_grad; children are Module
    attributes or lists of Modules. Names are dotted attribute paths in
    definition order, which keeps checkpoints deterministic.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for attr, value in vars(self).items():
            path = f"{prefix}{attr}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{path}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}.{i}.")

    def parameters(self) -> Dict[str, Tensor]:
        return dict(self.named_parameters())

    def parameter_count(self) -> int:
        return sum(p.data.size for p in self.parameters().values())

    def zero_grad(self) -> None:
        for p in self.parameters().values():
            p.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        params = self.parameters()
        missing = sorted(set(params) - set(state))
        if missing:
            raise DimensionError(f"state is missing parameters: {missing}")
        for name, p in params.items():
            value = np.asarray(state[name], dtype=DTYPE)
            if value.shape != p.shape:
                raise DimensionError(f"parameter {name} has shape {p.shape}, state has {value.shape}")
            p.data = value.copy()

    def copy_from(self, other: "Module") -> None:
        """Hard-sync every parameter from another module of identical structure"""
        self.load_state_dict(other.state_dict())
