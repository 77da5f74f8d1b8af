"""`train`: run every seed of an experiment config"""

import argparse
import logging

from pkgnet.commands.common import load_experiment_config, output_root, print_json, run_summary
from pkgnet.services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="Train one experiment config over all its seeds")
    parser.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    parser.add_argument("--output", help="Records root (overrides output_dir in the config)")
    parser.add_argument("--seeds", type=int, help="Use seeds 0..N-1 instead of the config's list")
    parser.add_argument("--episodes", type=int, help="Override the episode budget")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    updates = {}
    if args.seeds is not None:
        updates["seeds"] = list(range(args.seeds))
    if args.episodes is not None:
        updates["episodes"] = args.episodes
    if updates:
        config = config.model_validate({**config.model_dump(), **updates})
    root = output_root(args.output, config)

    logger.info(f"Training {config.name} into {root}")
    records = ExperimentService(root).run_experiment(config)
    print_json([run_summary(r) for r in records])
    return 0
