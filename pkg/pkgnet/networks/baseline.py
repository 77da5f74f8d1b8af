"""Convolutional baselines: the same pipeline with every graph input removed"""

from typing import Optional, Sequence

import numpy as np

from pkgnet.core import ops
from pkgnet.core.module import Module
from pkgnet.envs.grid import encode_onehot_batch
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.networks.layers import Conv2d
from pkgnet.networks.pkgnet import Head, ModelOutput, as_batch

SOKOBAN_FILTERS = (64, 64)
SOKOBAN_HIDDEN = (64,)
PACMAN_FILTERS = (64, 128, 128, 64)
PACMAN_HIDDEN = (100, 50)


class BaselineModel(Module):
    def __init__(
        self,
        rng: np.random.Generator,
        alphabet: Sequence[str],
        num_actions: int,
        filters: Sequence[int] = SOKOBAN_FILTERS,
        hidden: Sequence[int] = SOKOBAN_HIDDEN,
        value_head: bool = False,
    ):
        self.alphabet = tuple(alphabet)
        self.num_actions = num_actions
        widths = [len(self.alphabet), *filters]
        self.convs = [Conv2d(rng, a, b, 3, f"conv.{i}") for i, (a, b) in enumerate(zip(widths, widths[1:]))]
        self.head = Head(rng, widths[-1], hidden, num_actions, value_head)

    def __call__(self, kg: Optional[KnowledgeGraph], grids) -> ModelOutput:
        # kg is accepted for a uniform call signature and ignored
        state = encode_onehot_batch(as_batch(grids), self.alphabet)
        for conv in self.convs:
            state = ops.relu(conv(state))
        return self.head(ops.channel_mean(state))
