"""`ablate`: train one config under several knowledge-graph variants"""

import argparse
import logging

from pkgnet.commands.common import load_experiment_config, output_root, print_json, run_summary
from pkgnet.models.knowledge import KGVariant
from pkgnet.services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("ablate", help="Train a config once per knowledge-graph variant")
    parser.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    parser.add_argument("--variant", action="append", required=True, choices=[v.value for v in KGVariant],
                        help="Variant to train; repeat the flag for several")
    parser.add_argument("--output", help="Records root (overrides output_dir in the config)")
    parser.add_argument("--seeds", type=int, help="Use seeds 0..N-1 instead of the config's list")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    base = load_experiment_config(args.config)
    root = output_root(args.output, base)
    service = ExperimentService(root)
    summaries = []
    for variant in dict.fromkeys(args.variant):
        updates = {"kg_variant": variant, "name": f"{base.name}-{variant}"}
        if args.seeds is not None:
            updates["seeds"] = list(range(args.seeds))
        config = base.model_validate({**base.model_dump(), **updates})
        logger.info(f"Ablation {config.name}")
        summaries.extend(run_summary(r) for r in service.run_experiment(config))
    print_json(summaries)
    return 0
