"""Evaluate a trained agent after editing its knowledge graph"""

import json
import logging
from collections import Counter
from pathlib import Path
from typing import List, Union

from pydantic import ValidationError

from pkgnet.errors import CheckpointError, ConfigurationError
from pkgnet.knowledge.edits import apply_edits, load_edits
from pkgnet.models.experiment import Environment, ExperimentConfig, ManipulationResult, ManipulationScenario
from pkgnet.models.knowledge import KGEdit
from pkgnet.networks.factory import load_model
from pkgnet.services.aggregation import mean_stderr
from pkgnet.services.evaluation_service import EvaluationService
from pkgnet.services.world import build_world
from pkgnet.utils.seeding import stream

logger = logging.getLogger(__name__)

RESULT_FILE = "result.json"
TRACES_FILE = "traces.jsonl"


class ManipulationService:
    def __init__(self, output_dir: Union[str, Path]):
        self.root = Path(output_dir)
        self.evaluator = EvaluationService()

    def _edits(self, scenario: ManipulationScenario) -> List[KGEdit]:
        if isinstance(scenario.edits, str):
            return load_edits(scenario.edits)
        return list(scenario.edits)

    def run_manipulation(self, scenario: ManipulationScenario) -> ManipulationResult:
        """
        Greedy episodes with the edited graph

        Sokoban draws `episodes` fresh mazes of the chosen split from the
        scenario seed; Pacman replays its layout `episodes` times. Edits are
        validated against the graph before any episode runs.
        """
        model, extra = load_model(scenario.checkpoint)
        try:
            experiment = ExperimentConfig.model_validate(extra["experiment"])
        except (KeyError, ValidationError) as e:
            raise CheckpointError(f"checkpoint {scenario.checkpoint} carries no usable experiment config: {e}")
        if experiment.model.value == "baseline":
            raise ConfigurationError("knowledge-graph edits need a model that reads the graph, not a baseline")

        if experiment.environment == Environment.SOKOBAN:
            world = build_world(experiment, maze_seed=scenario.seed,
                                num_train=scenario.episodes, num_test=scenario.episodes)
        else:
            world = build_world(experiment)
        split = world.split(scenario.split)
        edits = self._edits(scenario)
        kg = apply_edits(split.kg, edits)

        repeat = 1 if len(split.starts) >= scenario.episodes else scenario.episodes
        starts = (list(split.starts) * repeat)[:scenario.episodes]
        grids = (list(split.grids) * repeat)[:scenario.episodes]
        traces = self.evaluator.run_greedy(
            model, kg, starts, grids, world.step, stream(scenario.seed, "evaluation"), world.agent
        )

        mean, stderr = mean_stderr([t.episode_return for t in traces])
        events = Counter(event for t in traces for event in t.events)
        out_dir = self.root / "manipulations" / scenario.name
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / TRACES_FILE, "w", encoding="utf-8") as fh:
            for trace in traces:
                fh.write(json.dumps(trace.to_dict()) + "\n")

        result = ManipulationResult(
            name=scenario.name,
            episodes=len(traces),
            mean_return=mean,
            stderr_return=stderr,
            success_rate=sum(t.success for t in traces) / len(traces),
            event_counts=dict(sorted(events.items())),
            traces=str(out_dir / TRACES_FILE),
        )
        (out_dir / RESULT_FILE).write_text(result.model_dump_json(indent=2), encoding="utf-8")
        logger.info(
            f"Manipulation {scenario.name}: return {mean:.2f} ± {stderr:.2f}, "
            f"success {result.success_rate:.3f} over {len(traces)} episodes ({len(edits)} edits)"
        )
        return result
