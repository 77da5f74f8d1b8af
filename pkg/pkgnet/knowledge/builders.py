"""Hand-written prior knowledge graphs for Sokoban and Pacman"""

from typing import List

from pkgnet.envs import pacman, sokoban
from pkgnet.envs.sokoban import SokobanVariation
from pkgnet.knowledge.graph import Edge, KnowledgeGraph, crop

IMPASSABLE = "impassable"
PUSHES = "pushes"
FILLS = "fills"

SOKOBAN_EDGE_TYPES = (IMPASSABLE, PUSHES, FILLS)
SOKOBAN_ALIASES = {"agent": sokoban.AGENT, "wall": sokoban.WALL}

PACMAN_EDGE_TYPES = (IMPASSABLE, "collects", "powers-up", "chases", "flees", "threatens")
PACMAN_ALIASES = {
    "player": pacman.PLAYER,
    "ghost": pacman.GHOST,
    "scared-ghost": pacman.SCARED_GHOST,
    "coin": pacman.COIN,
    "capsule": pacman.CAPSULE,
    "wall": pacman.WALL,
}


def complete_sokoban_kg(variation: SokobanVariation) -> KnowledgeGraph:
    agent, wall = sokoban.AGENT, sokoban.WALL
    pairs = variation.train_pairs + variation.test_pairs
    buckets = list(dict.fromkeys(bucket for _, bucket in pairs))
    edges: List[Edge] = [Edge(agent, ball, PUSHES) for ball, _ in pairs]
    edges += [Edge(ball, bucket, FILLS) for ball, bucket in pairs]
    edges += [Edge(agent, bucket, IMPASSABLE) for bucket in buckets]
    edges.append(Edge(agent, wall, IMPASSABLE))
    registry = tuple(variation.all_symbols())
    return KnowledgeGraph(registry, registry, SOKOBAN_EDGE_TYPES, tuple(edges), SOKOBAN_ALIASES)


def build_sokoban_kg(variation: SokobanVariation, include_test_entities: bool) -> KnowledgeGraph:
    """
    Agent→ball 'pushes', ball→bucket 'fills' for every rewarded pair,
    agent→bucket and agent→wall 'impassable'

    Without test entities the graph is cropped to the symbols of the
    training mazes.
    """
    kg = complete_sokoban_kg(variation)
    return kg if include_test_entities else crop(kg, variation.symbols("train"))


def build_pacman_kg() -> KnowledgeGraph:
    p, g, s = pacman.PLAYER, pacman.GHOST, pacman.SCARED_GHOST
    edges = (
        Edge(p, pacman.WALL, IMPASSABLE),
        Edge(g, pacman.WALL, IMPASSABLE),
        Edge(s, pacman.WALL, IMPASSABLE),
        Edge(p, pacman.COIN, "collects"),
        Edge(p, pacman.CAPSULE, "powers-up"),
        Edge(p, s, "chases"),
        Edge(p, g, "flees"),
        Edge(g, p, "threatens"),
    )
    registry = tuple(pacman.ALPHABET)
    return KnowledgeGraph(registry, registry, PACMAN_EDGE_TYPES, edges, PACMAN_ALIASES)
