"""`manipulate`: evaluate a trained agent with an edited knowledge graph"""

import argparse
import logging
from pathlib import Path

from pkgnet.commands.common import output_root, print_json
from pkgnet.configs import resolve_edits
from pkgnet.errors import CheckpointError
from pkgnet.models.experiment import EvalSplit, ManipulationScenario
from pkgnet.services.manipulation_service import ManipulationService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("manipulate", help="Run a knowledge-graph edit script against a checkpoint")
    parser.add_argument("--checkpoint", required=True, help="PKGN1 checkpoint written by training")
    parser.add_argument("--edits", required=True, help="Edit-script JSON file or bundled script name")
    parser.add_argument("--episodes", type=int, default=100, help="Greedy evaluation episodes")
    parser.add_argument("--set", dest="split", choices=[s.value for s in EvalSplit], default="test",
                        help="Maze set whose graph is edited")
    parser.add_argument("--name", help="Scenario name (defaults to the edit-script name)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", required=True, help="Directory for the result and traces")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if not Path(args.checkpoint).is_file():
        raise CheckpointError(f"checkpoint {args.checkpoint} does not exist")
    edits = resolve_edits(args.edits)
    scenario = ManipulationScenario(
        name=args.name or edits.stem,
        checkpoint=args.checkpoint,
        edits=str(edits),
        episodes=args.episodes,
        split=args.split,
        seed=args.seed,
    )
    result = ManipulationService(output_root(args.output)).run_manipulation(scenario)
    print_json(result.model_dump(mode="json"))
    return 0
