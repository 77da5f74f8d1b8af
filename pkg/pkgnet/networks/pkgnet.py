"""Knowledge-graph network: graph enrichment, scene trunk, side branch, heads"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from pkgnet.core import ops
from pkgnet.core.module import Module
from pkgnet.core.tensor import Tensor
from pkgnet.envs.grid import SymbolGrid
from pkgnet.errors import DimensionError
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.networks.layers import Dense, ECCLayer, KGConv, Pooling, broadcast, occupancy

logger = logging.getLogger(__name__)


@dataclass
class ModelOutput:
    q: Tensor
    value: Optional[Tensor] = None


class Head(Module):
    """Dense stack with ReLU between layers, plus an optional scalar value output"""

    def __init__(self, rng: np.random.Generator, d_in: int, hidden: Sequence[int], num_actions: int, value_head: bool):
        widths = [d_in, *hidden]
        self.layers = [Dense(rng, a, b, f"head.{i}") for i, (a, b) in enumerate(zip(widths, widths[1:]))]
        self.actions = Dense(rng, widths[-1], num_actions, "head.actions")
        self.value = Dense(rng, widths[-1], 1, "head.value") if value_head else None

    def __call__(self, features: Tensor) -> ModelOutput:
        for layer in self.layers:
            features = ops.relu(layer(features))
        value = ops.reshape(self.value(features), features.shape[:-1]) if self.value is not None else None
        return ModelOutput(self.actions(features), value)


def as_batch(grids) -> List[SymbolGrid]:
    return [grids] if isinstance(grids, SymbolGrid) else list(grids)


class PKGNetModel(Module):
    """
    Q-network (and optional value network) reading a knowledge graph and a grid

    Two ECC layers enrich the graph, whose vertices are broadcast into the
    scene. Two KG-Conv layers form the trunk. The side branch pools the scene
    back into the graph, runs two more ECC layers and merges through one
    KG-Conv. A global channel mean feeds the dense head.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        vertex_width: int,
        edge_width: int,
        num_actions: int,
        width: int = 64,
        hidden: Sequence[int] = (64,),
        side_branch: bool = True,
        value_head: bool = False,
    ):
        self.vertex_width = vertex_width
        self.edge_width = edge_width
        self.num_actions = num_actions
        self.side_branch = side_branch
        self.enrich = [
            ECCLayer(rng, edge_width, vertex_width, width, "enrich.0"),
            ECCLayer(rng, edge_width, width, width, "enrich.1"),
        ]
        self.trunk = [KGConv(rng, width, width, width, f"trunk.{i}") for i in range(2)]
        if side_branch:
            self.pool = Pooling(rng, width, width, "side.pool")
            self.side_graph = [ECCLayer(rng, edge_width, width, width, f"side.ecc.{i}") for i in range(2)]
            self.merge = KGConv(rng, width, width, width, "side.merge")
        self.head = Head(rng, width, hidden, num_actions, value_head)

    def __call__(self, kg: KnowledgeGraph, grids) -> ModelOutput:
        if kg.vertex_width != self.vertex_width or kg.edge_width != self.edge_width:
            raise DimensionError(
                f"graph has vertex/edge widths ({kg.vertex_width}, {kg.edge_width}), "
                f"model expects ({self.vertex_width}, {self.edge_width})"
            )
        delta = occupancy(kg, as_batch(grids))

        vertices = Tensor(kg.vertex_features())
        for layer in self.enrich:
            vertices = ops.relu(layer(kg, vertices))

        state = broadcast(delta, vertices)
        for layer in self.trunk:
            state = ops.relu(layer(state, delta, vertices))

        if self.side_branch:
            pooled = self.pool(state, delta, vertices)
            for layer in self.side_graph:
                pooled = ops.relu(layer(kg, pooled))
            state = ops.relu(self.merge(state, delta, pooled))

        return self.head(ops.channel_mean(state))
