"""`reproduce`: train a bundled suite, run its manipulations and plot it"""

import argparse
import logging
from pathlib import Path

from pkgnet.commands.common import print_json
from pkgnet.configs import FIGURES, load_suite, resolve_edits
from pkgnet.models.experiment import Environment, ManipulationScenario, ReproductionSuite
from pkgnet.services.experiment_service import ExperimentService
from pkgnet.services.manipulation_service import ManipulationService
from pkgnet.services.plot_service import PlotService
from pkgnet.services.record_store import CHECKPOINT_FILE, RecordStore

logger = logging.getLogger(__name__)

ONE_ONE_EPISODES = 5000
DEFAULT_EPISODES = 20000


def register(subparsers) -> None:
    parser = subparsers.add_parser("reproduce", help="Run a bundled figure or table end to end")
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--variation", help="Sokoban variation to run the suite on (default: as bundled)")
    parser.add_argument("--seeds", type=int, default=3, help="Seeds per experiment (10 for the full study)")
    parser.add_argument("--episodes", type=int,
                        help=f"Episode budget (default {ONE_ONE_EPISODES} on one-one, {DEFAULT_EPISODES} otherwise)")
    parser.add_argument("--output", required=True, help="Records root")
    parser.set_defaults(handler=run)


def customize(suite: ReproductionSuite, variation, seeds: int, episodes) -> ReproductionSuite:
    experiments = []
    for experiment in suite.experiments:
        updates = {"seeds": list(range(seeds))}
        if experiment.environment == Environment.SOKOBAN:
            if variation:
                updates["variation"] = variation
            chosen = updates.get("variation", experiment.variation)
            updates["episodes"] = episodes if episodes is not None else (
                ONE_ONE_EPISODES if chosen == "one-one" else DEFAULT_EPISODES
            )
        elif episodes is not None:
            updates["episodes"] = episodes
        experiments.append(experiment.model_validate({**experiment.model_dump(), **updates}))
    return suite.model_copy(update={"experiments": experiments})


def run(args: argparse.Namespace) -> int:
    suite = customize(load_suite(args.figure), args.variation, args.seeds, args.episodes)
    label = "table2" if args.figure == "table2" else f"figure-{args.figure}"
    root = Path(args.output) / (f"{label}-{args.variation}" if args.variation else label)
    logger.info(f"Reproducing {label} into {root}: {suite.description}")

    service = ExperimentService(root)
    for experiment in suite.experiments:
        service.run_experiment(experiment)

    records_dir = root
    if suite.manipulations:
        trained = suite.experiments[0]
        checkpoint = RecordStore(root).run_dir(trained.name, trained.seeds[0]) / CHECKPOINT_FILE
        manipulations = ManipulationService(root)
        for item in suite.manipulations:
            manipulations.run_manipulation(ManipulationScenario(
                name=item.name,
                checkpoint=str(checkpoint),
                edits=str(resolve_edits(item.edits)),
                episodes=item.episodes,
                split=item.split,
                note=item.note,
            ))
        records_dir = manipulations.root / "manipulations"

    written = PlotService(root / "plots").emit_plots(records_dir, suite.plot)
    print_json({"records": str(root), "plots": [str(p) for p in written]})
    return 0
