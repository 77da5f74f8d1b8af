"""`eval`: greedy evaluation of a checkpoint on its train or test set"""

import argparse
import logging
from pathlib import Path

from pkgnet.commands.common import print_json
from pkgnet.errors import CheckpointError
from pkgnet.models.experiment import EvalSplit, ExperimentConfig
from pkgnet.networks.factory import load_model
from pkgnet.services.evaluation_service import EvaluationService
from pkgnet.services.world import build_world

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a trained checkpoint greedily")
    parser.add_argument("--checkpoint", required=True, help="PKGN1 checkpoint written by training")
    parser.add_argument("--set", dest="split", choices=[s.value for s in EvalSplit], default="test",
                        help="Maze set to evaluate on")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the evaluation stream (Pacman ghosts)")
    parser.add_argument("--output", help="Also write the result as JSON into this directory")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if not Path(args.checkpoint).is_file():
        raise CheckpointError(f"checkpoint {args.checkpoint} does not exist")
    model, extra = load_model(args.checkpoint)
    if "experiment" not in extra:
        raise CheckpointError(f"checkpoint {args.checkpoint} carries no experiment config")
    config = ExperimentConfig.model_validate(extra["experiment"])
    world = build_world(config)
    record = EvaluationService().evaluate(model, world, EvalSplit(args.split), 0, args.seed)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"eval-{args.split}.json").write_text(record.model_dump_json(indent=2), encoding="utf-8")
    print_json(record.model_dump(mode="json"))
    return 0
