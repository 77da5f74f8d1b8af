"""Symbol grids, actions, step results and one-hot encoding"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from pkgnet.core.tensor import DTYPE, Tensor
from pkgnet.errors import ContractError, EncodingError

BLANK = " "

Position = Tuple[int, int]


class Action(IntEnum):
    """The four movement directions; there is no stop action"""
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3

    @property
    def delta(self) -> Position:
        return _DELTAS[self]

    @classmethod
    def parse(cls, value) -> "Action":
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise ContractError(f"invalid action {value!r}; expected one of {[int(a) for a in cls]}")


_DELTAS = {Action.UP: (-1, 0), Action.DOWN: (1, 0), Action.LEFT: (0, -1), Action.RIGHT: (0, 1)}

NUM_ACTIONS = len(Action)


def shift(position: Position, action: Action) -> Position:
    dr, dc = action.delta
    return position[0] + dr, position[1] + dc


class SymbolGrid:
    """
    h×w grid of single-character symbols stored as ASCII codes

    Treated as a value: every mutation helper returns a new grid.
    """

    __slots__ = ("cells",)

    def __init__(self, cells: np.ndarray):
        self.cells = np.asarray(cells, dtype=np.uint8)
        if self.cells.ndim != 2:
            raise ContractError(f"grid must be 2-D, got shape {self.cells.shape}")

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "SymbolGrid":
        if not rows or len({len(r) for r in rows}) != 1:
            raise ContractError("grid rows must be non-empty and of equal length")
        return cls(np.array([[ord(ch) for ch in row] for row in rows], dtype=np.uint8))

    @classmethod
    def blank(cls, height: int, width: int) -> "SymbolGrid":
        return cls(np.full((height, width), ord(BLANK), dtype=np.uint8))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape

    def __getitem__(self, position: Position) -> str:
        return chr(self.cells[position])

    def replace(self, updates: Dict[Position, str]) -> "SymbolGrid":
        cells = self.cells.copy()
        for position, symbol in updates.items():
            cells[position] = ord(symbol)
        return SymbolGrid(cells)

    def find(self, symbol: str) -> List[Position]:
        rows, cols = np.nonzero(self.cells == ord(symbol))
        return list(zip(rows.tolist(), cols.tolist()))

    def count(self, symbol: str) -> int:
        return int((self.cells == ord(symbol)).sum())

    def symbols(self) -> set:
        return {chr(c) for c in np.unique(self.cells)} - {BLANK}

    def rows(self) -> List[str]:
        return ["".join(chr(c) for c in row) for row in self.cells]

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolGrid) and np.array_equal(self.cells, other.cells)

    def __hash__(self) -> int:
        return hash(self.cells.tobytes())

    def __repr__(self) -> str:
        return "SymbolGrid(\n  " + "\n  ".join(repr(r) for r in self.rows()) + "\n)"


@dataclass
class StepResult:
    state: Any
    grid: SymbolGrid
    reward: float
    done: bool
    success: bool = False
    truncated: bool = False
    events: List[str] = field(default_factory=list)


def symbol_lookup(alphabet: Sequence[str]) -> np.ndarray:
    """ASCII code -> channel index; blank -> -1, anything else unknown -> -2"""
    table = np.full(256, -2, dtype=np.int64)
    table[ord(BLANK)] = -1
    for index, symbol in enumerate(alphabet):
        table[ord(symbol)] = index
    return table


def encode_indices(grids: Iterable[SymbolGrid], alphabet: Sequence[str]) -> np.ndarray:
    """Stack grids into (n, h, w) channel indices, -1 for blank"""
    table = symbol_lookup(alphabet)
    indices = table[np.stack([g.cells for g in grids])]
    if (indices == -2).any():
        stacked = np.stack([g.cells for g in grids])
        unknown = sorted({chr(c) for c in np.unique(stacked[indices == -2])})
        raise EncodingError(f"symbols {unknown} are not in the alphabet {list(alphabet)}")
    return indices


def onehot_from_indices(indices: np.ndarray, width: int) -> np.ndarray:
    """(…, h, w) indices -> (…, h, w, width) one-hot; -1 maps to the zero vector"""
    eye = np.vstack([np.eye(width, dtype=DTYPE), np.zeros((1, width), dtype=DTYPE)])
    return eye[np.where(indices < 0, width, indices)]


def encode_onehot(grid: SymbolGrid, alphabet: Sequence[str]) -> Tensor:
    """h×w×|alphabet| one-hot map; blank cells are all-zero"""
    return Tensor(onehot_from_indices(encode_indices([grid], alphabet)[0], len(alphabet)))


def encode_onehot_batch(grids: Sequence[SymbolGrid], alphabet: Sequence[str]) -> Tensor:
    return Tensor(onehot_from_indices(encode_indices(grids, alphabet), len(alphabet)))
