"""Symbolic Pacman with random ghosts"""

import logging
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from pkgnet.envs.grid import BLANK, Action, Position, StepResult, SymbolGrid, shift
from pkgnet.errors import ConfigurationError

logger = logging.getLogger(__name__)

PLAYER = "P"
GHOST = "G"
SCARED_GHOST = "S"
COIN = "."
CAPSULE = "o"
WALL = "%"
ALPHABET = [PLAYER, GHOST, SCARED_GHOST, COIN, CAPSULE, WALL]

COIN_REWARD = 10.0
GHOST_REWARD = 200.0
CLEAR_REWARD = 500.0
DEATH_REWARD = -500.0
MOVE_REWARD = -1.0
SCARED_TIME = 40
MAX_STEPS = 500

LAYOUT_DIR = Path(__file__).parent / "layouts"
LAYOUTS = ("smallGrid", "mediumClassic", "capsuleClassic")


@dataclass(frozen=True)
class PacmanLayout:
    name: str
    rows: Tuple[str, ...]
    walls: FrozenSet[Position]
    coins: FrozenSet[Position]
    capsules: FrozenSet[Position]
    player_start: Position
    ghost_starts: Tuple[Position, ...]

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def ghost_count(self) -> int:
        return len(self.ghost_starts)


def parse_layout(name: str, text: str) -> PacmanLayout:
    """'%'/'+' wall, '.' coin, 'o' capsule, 'P' player, 'G' ghost, ' ' blank"""
    rows = tuple(line.rstrip("\n") for line in text.splitlines() if line.strip())
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigurationError(f"layout {name}: rows must be non-empty and equally long")
    walls, coins, capsules, ghosts, players = set(), set(), set(), [], []
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch in "%+":
                walls.add((r, c))
            elif ch == COIN:
                coins.add((r, c))
            elif ch == CAPSULE:
                capsules.add((r, c))
            elif ch == PLAYER:
                players.append((r, c))
            elif ch == GHOST:
                ghosts.append((r, c))
            elif ch != BLANK:
                raise ConfigurationError(f"layout {name}: unknown symbol {ch!r} at row {r}, column {c}")
    if len(players) != 1:
        raise ConfigurationError(f"layout {name}: expected exactly one player, found {len(players)}")

    layout = PacmanLayout(name, rows, frozenset(walls), frozenset(coins), frozenset(capsules),
                          players[0], tuple(ghosts))
    unreachable = _open_cells(layout) - _reachable(layout, layout.player_start)
    if unreachable:
        raise ConfigurationError(f"layout {name}: cells {sorted(unreachable)[:5]} are unreachable")
    return layout


def load_layout(name: str) -> PacmanLayout:
    path = Path(name) if name.endswith(".lay") else LAYOUT_DIR / f"{name}.lay"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read Pacman layout {path}: {e}")
    return parse_layout(path.stem, text)


def _open_cells(layout: PacmanLayout) -> set:
    return {(r, c) for r in range(layout.height) for c in range(layout.width)} - layout.walls


def _reachable(layout: PacmanLayout, start: Position) -> set:
    seen, queue = {start}, deque([start])
    while queue:
        position = queue.popleft()
        for action in Action:
            nxt = shift(position, action)
            if nxt not in layout.walls and nxt not in seen \
                    and 0 <= nxt[0] < layout.height and 0 <= nxt[1] < layout.width:
                seen.add(nxt)
                queue.append(nxt)
    return seen


@dataclass(frozen=True)
class GhostState:
    position: Position
    start: Position
    scared_timer: int = 0
    heading: Optional[Action] = None
    resting: bool = False

    @property
    def scared(self) -> bool:
        return self.scared_timer > 0


@dataclass(frozen=True)
class PacmanState:
    layout: PacmanLayout
    player: Position
    ghosts: Tuple[GhostState, ...]
    coins: FrozenSet[Position]
    capsules: FrozenSet[Position]
    steps: int = 0

    @classmethod
    def initial(cls, layout: PacmanLayout) -> "PacmanState":
        ghosts = tuple(GhostState(position=p, start=p) for p in layout.ghost_starts)
        return cls(layout, layout.player_start, ghosts, layout.coins, layout.capsules)

    def render(self) -> SymbolGrid:
        updates = {p: WALL for p in self.layout.walls}
        updates.update({p: COIN for p in self.coins})
        updates.update({p: CAPSULE for p in self.capsules})
        for ghost in self.ghosts:
            updates[ghost.position] = SCARED_GHOST if ghost.scared else GHOST
        updates[self.player] = PLAYER
        return SymbolGrid.blank(self.layout.height, self.layout.width).replace(updates)


_REVERSE = {Action.UP: Action.DOWN, Action.DOWN: Action.UP, Action.LEFT: Action.RIGHT, Action.RIGHT: Action.LEFT}


def _legal_moves(layout: PacmanLayout, position: Position) -> List[Action]:
    return [a for a in Action if shift(position, a) not in layout.walls]


def _move_ghost(ghost: GhostState, layout: PacmanLayout, rng: np.random.Generator) -> GhostState:
    """Uniform over legal moves, never reversing unless forced; scared ghosts move every other tick"""
    if ghost.scared and not ghost.resting:
        return replace(ghost, resting=True)
    legal = _legal_moves(layout, ghost.position)
    if not legal:
        return replace(ghost, resting=False)
    forward = [a for a in legal if ghost.heading is None or a != _REVERSE[ghost.heading]]
    options = forward or legal
    choice = options[int(rng.integers(len(options)))]
    return replace(ghost, position=shift(ghost.position, choice), heading=choice, resting=False)


def _collide(ghosts: Tuple[GhostState, ...], player: Position) -> Tuple[Tuple[GhostState, ...], float, bool, List[str]]:
    reward, dead, events, resolved = 0.0, False, [], []
    for ghost in ghosts:
        if ghost.position != player:
            resolved.append(ghost)
        elif ghost.scared:
            reward += GHOST_REWARD
            events.append("eat_ghost")
            resolved.append(GhostState(position=ghost.start, start=ghost.start))
        else:
            dead = True
            resolved.append(ghost)
    if dead:
        reward += DEATH_REWARD
        events.append("eaten")
    return tuple(resolved), reward, dead, events


def pacman_step(state: PacmanState, action, rng: np.random.Generator, max_steps: int = MAX_STEPS) -> StepResult:
    """
    Advance the player, resolve collisions, move the ghosts, resolve again

    Rewards: +10 coin, +200 scared ghost, +500 last coin (terminal),
    -500 eaten (terminal), -1 every move including moves into walls.
    """
    action = Action.parse(action)
    layout = state.layout
    events: List[str] = []
    reward = MOVE_REWARD

    ghosts = tuple(replace(g, scared_timer=g.scared_timer - 1) if g.scared else g for g in state.ghosts)
    player = shift(state.player, action)
    if player in layout.walls:
        player = state.player
        events.append("blocked")

    coins, capsules = state.coins, state.capsules
    if player in coins:
        coins = coins - {player}
        reward += COIN_REWARD
        events.append("coin")
    if player in capsules:
        capsules = capsules - {player}
        ghosts = tuple(replace(g, scared_timer=SCARED_TIME, resting=False) for g in ghosts)
        events.append("capsule")

    ghosts, collision_reward, dead, collision_events = _collide(ghosts, player)
    reward += collision_reward
    events += collision_events
    cleared = not dead and not coins
    if cleared:
        reward += CLEAR_REWARD
        events.append("clear")
    elif not dead:
        ghosts = tuple(_move_ghost(g, layout, rng) for g in ghosts)
        ghosts, collision_reward, dead, collision_events = _collide(ghosts, player)
        reward += collision_reward
        events += collision_events

    steps = state.steps + 1
    next_state = PacmanState(layout, player, ghosts, coins, capsules, steps)
    truncated = not (dead or cleared) and steps >= max_steps
    return StepResult(
        state=next_state,
        grid=next_state.render(),
        reward=reward,
        done=dead or cleared or truncated,
        success=cleared,
        truncated=truncated,
        events=events,
    )


class PacmanEnv:
    def __init__(self, layout: PacmanLayout, rng: Optional[np.random.Generator] = None,
                 max_steps: int = MAX_STEPS):
        self.layout = layout
        self.rng = rng or np.random.default_rng(0)
        self.max_steps = max_steps
        self.state: Optional[PacmanState] = None

    @property
    def num_actions(self) -> int:
        return len(Action)

    def reset(self, index: Optional[int] = None) -> SymbolGrid:
        self.state = PacmanState.initial(self.layout)
        return self.state.render()

    def step(self, action) -> StepResult:
        if self.state is None:
            raise ConfigurationError("step() called before reset()")
        result = pacman_step(self.state, action, self.rng, self.max_steps)
        self.state = result.state
        return result
