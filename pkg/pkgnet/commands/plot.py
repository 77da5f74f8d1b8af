"""`plot`: figures and CSV tables from persisted records"""

import argparse
import logging
from pathlib import Path

from pkgnet.commands.common import print_json
from pkgnet.errors import ConfigurationError
from pkgnet.services.plot_service import PLOT_KINDS, PlotService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("plot", help="Plot persisted records")
    parser.add_argument("--records", required=True,
                        help="Experiment directory, directory of experiments, or manipulation results")
    parser.add_argument("--kind", required=True, choices=PLOT_KINDS)
    parser.add_argument("--output", help="Directory for the SVG and CSV (default: <records>/plots)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    records = Path(args.records)
    if not records.is_dir():
        raise ConfigurationError(f"records directory {records} does not exist")
    out = Path(args.output) if args.output else records / "plots"
    written = PlotService(out).emit_plots(records, args.kind)
    print_json([str(p) for p in written])
    return 0
