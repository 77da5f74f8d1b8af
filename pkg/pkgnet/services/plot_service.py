"""SVG figures plus the exact plotted numbers as CSV"""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import EvalSplit, ManipulationResult, RunRecord
from pkgnet.services import aggregation
from pkgnet.services.record_store import CONFIG_FILE, RecordStore

logger = logging.getLogger(__name__)

PLOT_KINDS = ("learning-curve", "ablation-panel", "manipulation-table")

_STYLE = {
    "svg.hashsalt": "pkgnet",
    "svg.fonttype": "none",
    "figure.figsize": (9.0, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
}

Panel = Tuple[str, str, Dict[str, aggregation.MetricSeries]]


def _metric_label(records: Sequence[RunRecord]) -> str:
    return "success rate" if records[0].config.environment.value == "sokoban" else "episode return"


class PlotService:
    def __init__(self, output_dir: Union[str, Path]):
        self.out = Path(output_dir)
        self.store = RecordStore(output_dir)

    def load_groups(self, records_dir: Union[str, Path]) -> Dict[str, List[RunRecord]]:
        """Experiment name -> runs, for one experiment directory or a directory of them"""
        records_dir = Path(records_dir)
        if (records_dir / CONFIG_FILE).exists() or any(records_dir.glob(f"seed-*/{CONFIG_FILE}")):
            runs = self.store.read_experiment(records_dir)
            return {runs[0].config.name: runs}
        groups = {}
        for child in sorted(p for p in records_dir.iterdir() if p.is_dir()):
            if any(child.glob(f"seed-*/{CONFIG_FILE}")):
                runs = self.store.read_experiment(child)
                groups[runs[0].config.name] = runs
        if not groups:
            raise ConfigurationError(f"no experiment records under {records_dir}")
        return groups

    def _learning_panels(self, groups: Dict[str, List[RunRecord]]) -> List[Panel]:
        train, test = {}, {}
        for label, runs in groups.items():
            train[label] = aggregation.aggregate([aggregation.training_series(r) for r in runs])
            test[label] = aggregation.aggregate(
                [aggregation.eval_series(r, EvalSplit.TEST) for r in runs], window=1,
                x=aggregation.eval_episodes(runs[0], EvalSplit.TEST),
            )
        return [("training episodes", "train", train), ("test mazes (greedy)", "test", test)]

    def _ablation_panels(self, groups: Dict[str, List[RunRecord]]) -> List[Panel]:
        panels = []
        for split in (EvalSplit.TRAIN, EvalSplit.TEST):
            series = {
                label: aggregation.aggregate(
                    [aggregation.eval_series(r, split) for r in runs], window=1,
                    x=aggregation.eval_episodes(runs[0], split),
                )
                for label, runs in groups.items()
            }
            panels.append((f"{split.value} mazes (greedy)", split.value, series))
        return panels

    def _draw_curves(self, panels: List[Panel], ylabel: str, stem: Path) -> List[Path]:
        rows = []
        with plt.rc_context(_STYLE):
            fig, axes = plt.subplots(1, len(panels), squeeze=False)
            for ax, (title, key, series) in zip(axes[0], panels):
                for label, s in series.items():
                    ax.plot(s.x, s.mean, label=f"{label} (n={s.runs})", linewidth=1.2)
                    ax.fill_between(s.x, s.mean - s.stderr, s.mean + s.stderr, alpha=0.2)
                    rows.extend((label, key, x, m, e) for x, m, e in zip(s.x, s.mean, s.stderr))
                ax.set_title(title)
                ax.set_xlabel("training episode")
                ax.set_ylabel(ylabel)
            axes[0][-1].legend(fontsize="small")
            fig.tight_layout()
            svg = stem.with_suffix(".svg")
            fig.savefig(svg, format="svg", metadata={"Date": None})
            plt.close(fig)
        data = stem.with_suffix(".csv")
        with open(data, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["label", "panel", "episode", "mean", "stderr"])
            for label, key, x, m, e in rows:
                writer.writerow([label, key, f"{x:g}", f"{m:.6f}", f"{e:.6f}"])
        return [svg, data]

    def _manipulation_table(self, records_dir: Path, stem: Path) -> List[Path]:
        paths = sorted(records_dir.glob("**/result.json"))
        if not paths:
            raise ConfigurationError(f"no manipulation results under {records_dir}")
        results = [ManipulationResult.model_validate(json.loads(p.read_text(encoding="utf-8"))) for p in paths]
        with plt.rc_context(_STYLE):
            fig, ax = plt.subplots()
            names = [r.name for r in results]
            ax.barh(names, [r.mean_return for r in results], xerr=[r.stderr_return for r in results], alpha=0.8)
            ax.set_xlabel("mean episode return (± standard error)")
            ax.invert_yaxis()
            fig.tight_layout()
            svg = stem.with_suffix(".svg")
            fig.savefig(svg, format="svg", metadata={"Date": None})
            plt.close(fig)
        data = stem.with_suffix(".csv")
        with open(data, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["scenario", "episodes", "mean_return", "stderr_return", "success_rate"])
            for r in results:
                writer.writerow([r.name, r.episodes, f"{r.mean_return:.6f}", f"{r.stderr_return:.6f}",
                                 f"{r.success_rate:.6f}"])
        return [svg, data]

    def emit_plots(self, records_dir: Union[str, Path], kind: str) -> List[Path]:
        if kind not in PLOT_KINDS:
            raise ConfigurationError(f"unknown plot kind {kind!r}; expected one of {list(PLOT_KINDS)}")
        records_dir = Path(records_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        stem = self.out / kind
        if kind == "manipulation-table":
            written = self._manipulation_table(records_dir, stem)
        else:
            groups = self.load_groups(records_dir)
            panels = self._learning_panels(groups) if kind == "learning-curve" else self._ablation_panels(groups)
            written = self._draw_curves(panels, _metric_label(next(iter(groups.values()))), stem)
        logger.info(f"Wrote {', '.join(str(p) for p in written)}")
        return written
