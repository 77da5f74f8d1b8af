"""Named random streams split from one master seed"""

import numpy as np

STREAMS = ("environment", "init", "exploration", "replay", "mazes", "evaluation")


def stream(seed: int, name: str, *key: int) -> np.random.Generator:
    """
    Counter-based Philox generator for one named component of a run

    Extra integers in `key` split the stream further (one evaluation
    stream per evaluation point, say) without disturbing the others.
    """
    if name not in STREAMS:
        raise KeyError(f"unknown random stream {name!r}; known: {STREAMS}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(STREAMS.index(name), *key))
    return np.random.Generator(np.random.Philox(sequence))
