"""Greedy evaluation over a set of start states, run in lockstep batches"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from pkgnet.core.module import Module
from pkgnet.core.tensor import no_grad
from pkgnet.knowledge.graph import KnowledgeGraph
from pkgnet.models.experiment import EvalRecord, EvalSplit
from pkgnet.services.world import StepFn, World
from pkgnet.utils.seeding import stream

logger = logging.getLogger(__name__)


@dataclass
class EpisodeTrace:
    start: int
    actions: List[int] = field(default_factory=list)
    positions: List[Tuple[int, int]] = field(default_factory=list)
    events: List[str] = field(default_factory=list)
    episode_return: float = 0.0
    steps: int = 0
    success: bool = False

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "return": self.episode_return,
            "steps": self.steps,
            "success": self.success,
            "actions": self.actions,
            "positions": [list(p) for p in self.positions],
            "events": self.events,
        }


class EvaluationService:
    """Runs greedy episodes; every active episode shares one forward pass per step"""

    def run_greedy(
        self,
        model: Module,
        kg: Optional[KnowledgeGraph],
        starts: Sequence[object],
        grids: Sequence,
        step: StepFn,
        rng: np.random.Generator,
        agent: str,
    ) -> List[EpisodeTrace]:
        traces = [EpisodeTrace(start=i) for i in range(len(starts))]
        states, current = list(starts), list(grids)
        for trace, grid in zip(traces, current):
            trace.positions.extend(grid.find(agent)[:1])
        active = list(range(len(starts)))
        while active:
            with no_grad():
                q = model(kg, [current[i] for i in active]).q.data
            still_active = []
            for row, i in enumerate(active):
                action = int(np.argmax(q[row]))
                result = step(states[i], action, rng)
                trace = traces[i]
                trace.actions.append(action)
                trace.events.extend(result.events)
                trace.positions.extend(result.grid.find(agent)[:1])
                trace.episode_return += result.reward
                trace.steps += 1
                states[i], current[i] = result.state, result.grid
                if result.done:
                    trace.success = result.success
                else:
                    still_active.append(i)
            active = still_active
        return traces

    def evaluate(self, model: Module, world: World, split: EvalSplit, episode: int, seed: int) -> EvalRecord:
        """Greedy pass over every start of `split`; Pacman repeats its one start"""
        data = world.split(split)
        repeat = 1 if len(data.starts) > 1 else world.config.eval_episodes
        starts, grids = list(data.starts) * repeat, list(data.grids) * repeat
        rng = stream(seed, "evaluation", episode, list(EvalSplit).index(EvalSplit(split)))
        traces = self.run_greedy(model, data.kg, starts, grids, world.step, rng, world.agent)
        record = summarize(traces, episode, EvalSplit(split))
        logger.info(
            f"Eval {world.config.name} seed {seed} episode {episode} [{record.split.value}]: "
            f"success {record.success_rate:.3f}, return {record.mean_return:.2f}"
        )
        return record


def summarize(traces: Sequence[EpisodeTrace], episode: int, split: EvalSplit) -> EvalRecord:
    returns = np.array([t.episode_return for t in traces], dtype=np.float64)
    return EvalRecord(
        episode=episode,
        split=split,
        success_rate=float(np.mean([t.success for t in traces])),
        mean_return=float(returns.mean()),
        mean_steps=float(np.mean([t.steps for t in traces])),
        episodes=len(traces),
    )
