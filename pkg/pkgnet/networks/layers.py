"""
Building blocks shared by the knowledge-graph network and the CNN baselines

Vertex features are (|V|, d) for the shared graph or (n, |V|, d) once the
side branch has made them per-sample. Scene maps are (n, h, w, d).
"""

from typing import Sequence

import numpy as np

from pkgnet.core import ops
from pkgnet.core.module import Module, fan_in_uniform, zeros_parameter
from pkgnet.core.tensor import Tensor
from pkgnet.envs.grid import SymbolGrid, onehot_from_indices, symbol_lookup
from pkgnet.errors import DimensionError
from pkgnet.knowledge.graph import KnowledgeGraph

WEIGHT_NET_HIDDEN = 8


class Dense(Module):
    def __init__(self, rng: np.random.Generator, d_in: int, d_out: int, name: str = "dense"):
        self.weight = fan_in_uniform(rng, (d_in, d_out), d_in, f"{name}.weight")
        self.bias = zeros_parameter((d_out,), f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.linear(x, self.weight, self.bias)


class Conv2d(Module):
    """Size-preserving k×k convolution over channel-last maps"""

    def __init__(self, rng: np.random.Generator, c_in: int, c_out: int, kernel_size: int = 3, name: str = "conv"):
        fan_in = kernel_size * kernel_size * c_in
        self.kernel = fan_in_uniform(rng, (kernel_size, kernel_size, c_in, c_out), fan_in, f"{name}.kernel")
        self.bias = zeros_parameter((c_out,), f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.kernel, self.bias)


def occupancy(kg: KnowledgeGraph, grids: Sequence[SymbolGrid]) -> np.ndarray:
    """
    δ as an (n, h, w, |V|) indicator: cell (i, j) of grid k holds vertex v

    Symbols the graph does not contain (blank, cropped entities) are all-zero.
    """
    table = symbol_lookup(kg.entities)
    return onehot_from_indices(table[np.stack([g.cells for g in grids])], kg.num_vertices)


def _vertex_prefix(vertices: Tensor) -> str:
    if vertices.ndim == 2:
        return ""
    if vertices.ndim == 3:
        return "n"
    raise DimensionError(f"vertex features must be (|V|, d) or (n, |V|, d), got shape {vertices.shape}")


class ECCLayer(Module):
    """
    Edge-conditioned graph convolution

    Each edge's d_in×d_out filter is produced from its feature vector by a
    small weight network (edge feature → 8 → ReLU → d_in·d_out). Vertex i
    sums the filtered features of every vertex with an edge into i, then
    adds the bias; isolated vertices get the bias alone.
    """

    def __init__(self, rng: np.random.Generator, edge_width: int, d_in: int, d_out: int, name: str = "ecc"):
        self.edge_width = edge_width
        self.d_in = d_in
        self.d_out = d_out
        self.hidden = Dense(rng, edge_width, WEIGHT_NET_HIDDEN, f"{name}.hidden")
        self.filter = Dense(rng, WEIGHT_NET_HIDDEN, d_in * d_out, f"{name}.filter")
        self.bias = zeros_parameter((d_out,), f"{name}.bias")

    def filters(self, kg: KnowledgeGraph) -> Tensor:
        """(|E|, d_in, d_out) filter matrices, one per edge"""
        features = kg.edge_features()
        if features.shape[1] != self.edge_width:
            raise DimensionError(
                f"edge features have width {features.shape[1]} on axis 1, weight network expects {self.edge_width}"
            )
        flat = self.filter(ops.relu(self.hidden(Tensor(features))))
        return ops.reshape(flat, (len(kg.edges), self.d_in, self.d_out))

    def __call__(self, kg: KnowledgeGraph, vertices: Tensor) -> Tensor:
        lead = _vertex_prefix(vertices)
        if vertices.shape[-2:] != (kg.num_vertices, self.d_in):
            raise DimensionError(
                f"vertex features have shape {vertices.shape}, expected (..., {kg.num_vertices}, {self.d_in})"
            )
        src, dst = kg.incidence()
        gathered = ops.einsum(f"es,{lead}sd->{lead}ed", Tensor(src), vertices)
        messages = ops.einsum(f"{lead}ed,edo->{lead}eo", gathered, self.filters(kg))
        summed = ops.einsum(f"ie,{lead}eo->{lead}io", Tensor(dst), messages)
        return ops.add(summed, self.bias)


def broadcast(delta: np.ndarray, vertices: Tensor) -> Tensor:
    """Copy each vertex vector into every cell its entity occupies"""
    lead = _vertex_prefix(vertices)
    return ops.einsum(f"nhwv,{lead}vd->nhwd", Tensor(delta), vertices)


class Pooling(Module):
    """
    Scene → graph transfer

    A present vertex becomes the mean of W·S over the cells its entity
    occupies; vertices whose entity is absent from a grid keep `prior`.
    """

    def __init__(self, rng: np.random.Generator, c_in: int, d_out: int, name: str = "pool"):
        self.projection = fan_in_uniform(rng, (c_in, d_out), c_in, f"{name}.projection")

    def __call__(self, state: Tensor, delta: np.ndarray, prior: Tensor) -> Tensor:
        if state.shape[:3] != delta.shape[:3]:
            raise DimensionError(f"state {state.shape} and occupancy {delta.shape} differ on the grid axes")
        counts = delta.sum(axis=(1, 2))
        present = (counts > 0).astype(delta.dtype)[..., None]
        summed = ops.einsum("nhwv,nhwc->nvc", Tensor(delta), state)
        means = ops.mul(summed, 1.0 / np.maximum(counts, 1.0)[..., None])
        projected = ops.matmul(means, self.projection)
        if prior.shape[-1] != projected.shape[-1]:
            raise DimensionError(
                f"prior vertex width {prior.shape[-1]} on axis -1 differs from pooled width {projected.shape[-1]}"
            )
        return ops.add(ops.mul(projected, present), ops.mul(prior, 1.0 - present))


class KGConv(Module):
    """3×3 scene convolution plus a 1×1 projection of the broadcast graph"""

    def __init__(self, rng: np.random.Generator, c_in: int, d_graph: int, c_out: int, name: str = "kgconv"):
        self.spatial = Conv2d(rng, c_in, c_out, 3, f"{name}.spatial")
        self.graph = Dense(rng, d_graph, c_out, f"{name}.graph")

    def __call__(self, state: Tensor, delta: np.ndarray, vertices: Tensor) -> Tensor:
        return ops.add(self.spatial(state), self.graph(broadcast(delta, vertices)))
