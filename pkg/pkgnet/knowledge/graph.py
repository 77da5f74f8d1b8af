"""Directed knowledge graph over environment symbols"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from pkgnet.core.tensor import DTYPE
from pkgnet.errors import ConfigurationError, EditError


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    type: str


@dataclass(frozen=True)
class KnowledgeGraph:
    """
    Immutable knowledge graph

    `registry` fixes the one-hot index space of vertex features; `entities`
    lists the vertices actually present (a cropped graph keeps the registry
    of the graph it was cropped from). Edge features are one-hot over
    `edge_types`.
    """
    registry: Tuple[str, ...]
    entities: Tuple[str, ...]
    edge_types: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    aliases: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(set(self.registry)) != len(self.registry):
            raise ConfigurationError(f"duplicate symbols in registry {self.registry}")
        unknown = [e for e in self.entities if e not in self.registry]
        if unknown:
            raise ConfigurationError(f"entities {unknown} are not in the registry")
        present = set(self.entities)
        pairs = set()
        for edge in self.edges:
            if edge.src not in present or edge.dst not in present:
                raise ConfigurationError(f"edge {edge.src}->{edge.dst} references a missing vertex")
            if edge.type not in self.edge_types:
                raise ConfigurationError(f"edge {edge.src}->{edge.dst} has unknown type {edge.type!r}")
            if (edge.src, edge.dst) in pairs:
                raise ConfigurationError(f"duplicate edge {edge.src}->{edge.dst}")
            pairs.add((edge.src, edge.dst))

    @property
    def vertex_width(self) -> int:
        return len(self.registry)

    @property
    def edge_width(self) -> int:
        return len(self.edge_types)

    @property
    def num_vertices(self) -> int:
        return len(self.entities)

    def index(self, symbol: str) -> int:
        return self.entities.index(symbol)

    def resolve(self, name: str) -> str:
        """Entity symbol for a symbol or alias such as 'player'"""
        symbol = self.aliases.get(name, name)
        if symbol not in self.entities:
            raise EditError(f"vertex {name!r} is not in the graph {list(self.entities)}")
        return symbol

    def edge(self, src: str, dst: str) -> Optional[Edge]:
        for edge in self.edges:
            if edge.src == src and edge.dst == dst:
                return edge
        return None

    def vertex_features(self) -> np.ndarray:
        """(|entities|, |registry|) one-hot rows"""
        features = np.zeros((len(self.entities), len(self.registry)), dtype=DTYPE)
        for row, symbol in enumerate(self.entities):
            features[row, self.registry.index(symbol)] = 1.0
        return features

    def edge_features(self) -> np.ndarray:
        """(|edges|, |edge_types|) one-hot rows"""
        features = np.zeros((len(self.edges), len(self.edge_types)), dtype=DTYPE)
        for row, edge in enumerate(self.edges):
            features[row, self.edge_types.index(edge.type)] = 1.0
        return features

    def incidence(self) -> Tuple[np.ndarray, np.ndarray]:
        """(source selector |E|×|V|, destination scatter |V|×|E|)"""
        src = np.zeros((len(self.edges), len(self.entities)), dtype=DTYPE)
        dst = np.zeros((len(self.entities), len(self.edges)), dtype=DTYPE)
        for row, edge in enumerate(self.edges):
            src[row, self.index(edge.src)] = 1.0
            dst[self.index(edge.dst), row] = 1.0
        return src, dst

    def with_edges(self, edges: Iterable[Edge], edge_types: Optional[Iterable[str]] = None) -> "KnowledgeGraph":
        return replace(
            self,
            edges=tuple(edges),
            edge_types=tuple(edge_types) if edge_types is not None else self.edge_types,
        )

    def to_dict(self) -> Dict:
        return {
            "registry": list(self.registry),
            "entities": list(self.entities),
            "edge_types": list(self.edge_types),
            "edges": [{"src": e.src, "dst": e.dst, "type": e.type} for e in self.edges],
            "aliases": dict(self.aliases),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "KnowledgeGraph":
        from pkgnet.models.knowledge import KnowledgeGraphDocument

        doc = KnowledgeGraphDocument.model_validate(data)
        return cls(
            registry=tuple(doc.registry or doc.entities),
            entities=tuple(doc.entities),
            edge_types=tuple(doc.edge_types),
            edges=tuple(Edge(e.src, e.dst, e.type) for e in doc.edges),
            aliases=dict(doc.aliases),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "KnowledgeGraph":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def crop(kg: KnowledgeGraph, symbols: Iterable[str]) -> KnowledgeGraph:
    """Induced subgraph on the given symbols; the registry is kept"""
    keep = set(symbols)
    entities = tuple(e for e in kg.entities if e in keep)
    edges = tuple(e for e in kg.edges if e.src in keep and e.dst in keep)
    return replace(kg, entities=entities, edges=edges)
