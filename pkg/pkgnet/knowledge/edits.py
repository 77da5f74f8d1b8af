"""Runtime editing of a trained agent's knowledge graph"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

from pydantic import TypeAdapter, ValidationError

from pkgnet.errors import EditError
from pkgnet.knowledge.graph import Edge, KnowledgeGraph
from pkgnet.models.knowledge import EdgeReference, EditOperation, KGEdit

logger = logging.getLogger(__name__)

_EDIT_LIST = TypeAdapter(List[KGEdit])


def _resolve_type(original: KnowledgeGraph, feature) -> str:
    """Edge-type name for a feature; references read the unedited graph so swaps work"""
    if isinstance(feature, EdgeReference):
        src, dst = original.resolve(feature.like[0]), original.resolve(feature.like[1])
        edge = original.edge(src, dst)
        if edge is None:
            raise EditError(f"referenced edge {src}->{dst} does not exist")
        return edge.type
    if feature not in original.edge_types:
        raise EditError(f"unknown edge type {feature!r}; known: {list(original.edge_types)}")
    return feature


def apply_edits(kg: KnowledgeGraph, edits: Sequence[KGEdit]) -> KnowledgeGraph:
    """Return an edited copy of `kg`; the input is never modified"""
    edges = list(kg.edges)
    for edit in edits:
        src, dst = kg.resolve(edit.src), kg.resolve(edit.dst)
        position = next((i for i, e in enumerate(edges) if e.src == src and e.dst == dst), None)
        if edit.operation == EditOperation.ADD_EDGE:
            if position is not None:
                raise EditError(f"edge {src}->{dst} already exists")
            edges.append(Edge(src, dst, _resolve_type(kg, edit.feature)))
            continue
        if position is None:
            raise EditError(f"edge {src}->{dst} does not exist")
        if edit.operation == EditOperation.REMOVE_EDGE:
            del edges[position]
        else:
            edges[position] = Edge(src, dst, _resolve_type(kg, edit.feature))
    logger.info(f"Applied {len(edits)} knowledge-graph edits ({len(kg.edges)} -> {len(edges)} edges)")
    return kg.with_edges(edges)


def parse_edits(payload: Union[str, list]) -> List[KGEdit]:
    try:
        if isinstance(payload, str):
            return _EDIT_LIST.validate_json(payload)
        return _EDIT_LIST.validate_python(payload)
    except ValidationError as e:
        raise EditError(f"invalid edit script: {e}")


def load_edits(path: Union[str, Path]) -> List[KGEdit]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise EditError(f"cannot read edit script {path}: {e}")
    return parse_edits(text)


def dump_edits(edits: Sequence[KGEdit]) -> str:
    return json.dumps([e.model_dump(mode="json", exclude_none=True) for e in edits], indent=2)
