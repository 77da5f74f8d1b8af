"""`history`: list experiments and runs from the run index"""

import argparse
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from pkgnet.commands.common import print_json
from pkgnet.database import crud, get_db
from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import Environment

logger = logging.getLogger(__name__)


class RunResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    seed: int
    status: str
    episodes_completed: int
    final_train_success: Optional[float]
    final_test_success: Optional[float]
    final_return: Optional[float]
    checkpoint_path: Optional[str]
    updated_at: datetime


class ExperimentResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    name: str
    environment: str
    algorithm: str
    model_kind: str
    kg_variant: str
    created_at: datetime
    runs: List[RunResponse]


class StatisticsResponse(BaseModel):
    total_experiments: int
    total_runs: int
    completed_runs: int
    recent_experiments_7d: int


def register(subparsers) -> None:
    parser = subparsers.add_parser("history", help="Show the run index of a records directory")
    parser.add_argument("--output", required=True, help="Records root holding the run index")
    parser.add_argument("--limit", type=int, default=20, help="Maximum number of experiments to list")
    parser.add_argument("--environment", choices=[e.value for e in Environment], help="Filter by environment")
    parser.add_argument("--name", help="Show one experiment only")
    parser.add_argument("--delete", metavar="NAME", help="Drop an experiment from the index (records stay on disk)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    root = Path(args.output)
    if not root.is_dir():
        raise ConfigurationError(f"records directory {root} does not exist")

    with get_db(root) as db:
        if args.delete:
            if not crud.delete_experiment(db, args.delete):
                raise ConfigurationError(f"experiment {args.delete} is not in the index")
            logger.info(f"Deleted experiment {args.delete} from the index")
            print_json({"deleted": args.delete})
            return 0

        if args.name:
            experiment = crud.get_experiment_with_runs(db, args.name)
            if experiment is None:
                raise ConfigurationError(f"experiment {args.name} is not in the index")
            experiments = [experiment]
        else:
            experiments = crud.get_recent_experiments(db, limit=args.limit, environment=args.environment)

        payload = {
            "experiments": [ExperimentResponse.model_validate(e).model_dump(mode="json") for e in experiments],
            "statistics": StatisticsResponse(**crud.get_statistics(db)).model_dump(),
        }
    print_json(payload)
    return 0
