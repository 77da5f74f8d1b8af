"""Ablation variants of a knowledge graph"""

import itertools
from typing import Iterable, Optional

from pkgnet.knowledge.graph import Edge, KnowledgeGraph, crop
from pkgnet.models.knowledge import KGVariant

SHARED_TYPE = "related"


def apply_variant(kg: KnowledgeGraph, variant: KGVariant) -> KnowledgeGraph:
    """Return a rewritten copy; base and complete are identity"""
    variant = KGVariant(variant)
    if variant in (KGVariant.BASE, KGVariant.COMPLETE):
        return kg
    if variant == KGVariant.SAME_EDGES:
        return kg.with_edges((Edge(e.src, e.dst, SHARED_TYPE) for e in kg.edges), (SHARED_TYPE,))
    if variant == KGVariant.NO_EDGES:
        return kg.with_edges(())
    pairs = list(itertools.permutations(kg.entities, 2))
    if variant == KGVariant.FULLY_CONNECTED:
        return kg.with_edges((Edge(s, d, SHARED_TYPE) for s, d in pairs), (SHARED_TYPE,))
    # one type per ordered registry pair so every crop shares the alphabet
    types = tuple(f"{s}->{d}" for s, d in itertools.permutations(kg.registry, 2))
    return kg.with_edges((Edge(s, d, f"{s}->{d}") for s, d in pairs), types)


def scene_graph(complete: KnowledgeGraph, variant: KGVariant, symbols: Optional[Iterable[str]]) -> KnowledgeGraph:
    """
    The graph an agent sees for a set of scenes

    Variants are applied to the complete graph and then cropped to the
    symbols of the scenes, except the complete variant which is never cropped.
    """
    variant = KGVariant(variant)
    kg = apply_variant(complete, variant)
    if variant == KGVariant.COMPLETE or symbols is None:
        return kg
    return crop(kg, symbols)
