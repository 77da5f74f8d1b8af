"""Prior knowledge graphs: construction, variants, cropping and runtime edits"""
from pkgnet.knowledge.graph import Edge, KnowledgeGraph, crop
from pkgnet.knowledge.builders import build_pacman_kg, build_sokoban_kg, complete_sokoban_kg
from pkgnet.knowledge.variants import apply_variant, scene_graph
from pkgnet.knowledge.edits import apply_edits, load_edits, parse_edits

__all__ = [
    "Edge",
    "KnowledgeGraph",
    "crop",
    "build_pacman_kg",
    "build_sokoban_kg",
    "complete_sokoban_kg",
    "apply_variant",
    "scene_graph",
    "apply_edits",
    "load_edits",
    "parse_edits"
]
