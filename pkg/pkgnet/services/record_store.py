"""On-disk layout of experiment records: one directory per experiment, one per seed"""

import json
import logging
import pickle
from pathlib import Path
from typing import Any, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import EpisodeRecord, EvalRecord, ExperimentConfig, RunRecord

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
EPISODES_FILE = "episodes.jsonl"
EVALS_FILE = "evals.jsonl"
STATE_FILE = "state.pkl"
CHECKPOINT_FILE = "final.pkgn"
STATUS_FILE = "status"
TRAIN_MAZES_FILE = "mazes-train.jsonl"
TEST_MAZES_FILE = "mazes-test.jsonl"

M = TypeVar("M", bound=BaseModel)


def read_jsonl(path: Path, model: Type[M]) -> List[M]:
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return [model.model_validate_json(line) for line in fh if line.strip()]


class RecordStore:
    """Reads and writes the records of one output root"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def experiment_dir(self, name: str) -> Path:
        return self.root / name

    def run_dir(self, name: str, seed: int) -> Path:
        return self.experiment_dir(name) / f"seed-{seed}"

    def prepare(self, config: ExperimentConfig, seed: int) -> Path:
        """Create the run directory; a different config already stored there is an error"""
        run_dir = self.run_dir(config.name, seed)
        run_dir.mkdir(parents=True, exist_ok=True)
        path = run_dir / CONFIG_FILE
        snapshot = config.model_dump(mode="json", exclude={"output_dir"})
        if path.exists():
            stored = json.loads(path.read_text(encoding="utf-8"))
            if stored != snapshot:
                raise ConfigurationError(
                    f"{run_dir} holds records of a different configuration; choose another experiment name"
                )
        else:
            path.write_text(json.dumps(snapshot, indent=2, sort_keys=True), encoding="utf-8")
        return run_dir

    def append_episode(self, run_dir: Path, record: EpisodeRecord) -> None:
        with open(run_dir / EPISODES_FILE, "a", encoding="utf-8") as fh:
            fh.write(record.model_dump_json(by_alias=True) + "\n")

    def append_eval(self, run_dir: Path, record: EvalRecord) -> None:
        with open(run_dir / EVALS_FILE, "a", encoding="utf-8") as fh:
            fh.write(record.model_dump_json() + "\n")

    def truncate(self, run_dir: Path, episodes: int) -> None:
        """Drop rows written after the snapshot taken at `episodes`"""
        for name, model, key in ((EPISODES_FILE, EpisodeRecord, "episode"), (EVALS_FILE, EvalRecord, "episode")):
            path = run_dir / name
            rows = read_jsonl(path, model)
            kept = [r for r in rows if getattr(r, key) <= episodes]
            if len(kept) != len(rows):
                logger.warning(f"Truncating {path} from {len(rows)} to {len(kept)} rows for resume")
                with open(path, "w", encoding="utf-8") as fh:
                    for r in kept:
                        fh.write(r.model_dump_json(by_alias=True) + "\n")

    def save_state(self, run_dir: Path, state: Any) -> None:
        tmp = run_dir / (STATE_FILE + ".tmp")
        with open(tmp, "wb") as fh:
            pickle.dump(state, fh, protocol=pickle.HIGHEST_PROTOCOL)
        tmp.replace(run_dir / STATE_FILE)

    def load_state(self, run_dir: Path) -> Optional[Any]:
        path = run_dir / STATE_FILE
        if not path.exists():
            return None
        with open(path, "rb") as fh:
            return pickle.load(fh)

    def set_status(self, run_dir: Path, status: str) -> None:
        (run_dir / STATUS_FILE).write_text(status, encoding="utf-8")

    def read_run(self, run_dir: Union[str, Path]) -> RunRecord:
        run_dir = Path(run_dir)
        config_path = run_dir / CONFIG_FILE
        if not config_path.exists():
            raise ConfigurationError(f"{run_dir} is not a run directory (no {CONFIG_FILE})")
        config = ExperimentConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
        checkpoint = run_dir / CHECKPOINT_FILE
        status_path = run_dir / STATUS_FILE
        return RunRecord(
            config=config,
            seed=int(run_dir.name.split("-", 1)[1]),
            episodes=read_jsonl(run_dir / EPISODES_FILE, EpisodeRecord),
            evals=read_jsonl(run_dir / EVALS_FILE, EvalRecord),
            checkpoint=str(checkpoint) if checkpoint.exists() else None,
            status=status_path.read_text(encoding="utf-8").strip() if status_path.exists() else "unknown",
        )

    def read_experiment(self, directory: Union[str, Path]) -> List[RunRecord]:
        """All runs below `directory`, which is an experiment or a run directory"""
        directory = Path(directory)
        if (directory / CONFIG_FILE).exists():
            return [self.read_run(directory)]
        runs = sorted(
            (p for p in directory.glob("seed-*") if (p / CONFIG_FILE).exists()),
            key=lambda p: int(p.name.split("-", 1)[1]),
        )
        if not runs:
            raise ConfigurationError(f"no run records under {directory}")
        return [self.read_run(p) for p in runs]
