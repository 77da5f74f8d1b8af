"""Multi-seed experiment runner with resumable runs and a SQLite run index"""

import logging
import signal
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, Union

from pkgnet.config import get_settings
from pkgnet.database import crud
from pkgnet.database.database import get_db
from pkgnet.envs.sokoban import save_mazes
from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import Environment, EvalSplit, ExperimentConfig, RunRecord
from pkgnet.networks.factory import save_model
from pkgnet.services.record_store import CHECKPOINT_FILE, TEST_MAZES_FILE, TRAIN_MAZES_FILE, RecordStore
from pkgnet.services.trainer import RunTrainer
from pkgnet.services.world import build_world

logger = logging.getLogger(__name__)


class _InterruptFlag:
    requested = False


@contextmanager
def deferred_interrupt() -> Iterator[_InterruptFlag]:
    """Turn Ctrl-C into a flag polled at episode boundaries"""
    flag = _InterruptFlag()

    def handler(signum, frame):
        flag.requested = True
        logger.warning("Interrupt received; stopping at the end of the current episode")

    try:
        previous = signal.signal(signal.SIGINT, handler)
    except ValueError:
        # not the main thread; interrupts cannot be deferred here
        yield flag
        return
    try:
        yield flag
    finally:
        signal.signal(signal.SIGINT, previous)


def execute_run(config_json: str, seed: int, root: str, checkpoint_every: int) -> str:
    """
    Train one seed to completion, resuming from state.pkl when present

    Returns the finished RunRecord as JSON so it crosses process boundaries.
    """
    config = ExperimentConfig.model_validate_json(config_json)
    store = RecordStore(root)
    run_dir = store.prepare(config, seed)

    trainer: Optional[RunTrainer] = store.load_state(run_dir)
    if trainer is not None:
        logger.info(f"Resuming {config.name} seed {seed} from episode {trainer.episode}")
    else:
        trainer = RunTrainer(config, seed)
        if config.environment == Environment.SOKOBAN:
            save_mazes(run_dir / TRAIN_MAZES_FILE, trainer.world.train.grids)
            save_mazes(run_dir / TEST_MAZES_FILE, trainer.world.test.grids)
    store.truncate(run_dir, trainer.episode)
    store.set_status(run_dir, "running")

    with deferred_interrupt() as interrupt:
        while not trainer.finished:
            record = trainer.run_episode()
            store.append_episode(run_dir, record)
            if trainer.due_for_eval():
                for evaluation in trainer.evaluate():
                    store.append_eval(run_dir, evaluation)
            if interrupt.requested:
                store.save_state(run_dir, trainer)
                store.set_status(run_dir, "interrupted")
                logger.warning(f"Saved {config.name} seed {seed} at episode {trainer.episode}")
                raise KeyboardInterrupt
            if trainer.episode % checkpoint_every == 0:
                store.save_state(run_dir, trainer)

    save_model(run_dir / CHECKPOINT_FILE, trainer.model, trainer.model_config, config.model_dump(mode="json"))
    store.save_state(run_dir, trainer)
    store.set_status(run_dir, "completed")
    logger.info(f"Finished {config.name} seed {seed} after {trainer.episode} episodes")
    return store.read_run(run_dir).model_dump_json(by_alias=True)


class ExperimentService:
    """Runs every seed of an experiment and keeps the run index current"""

    def __init__(self, output_dir: Union[str, Path]):
        self.settings = get_settings()
        self.root = Path(output_dir)
        self.store = RecordStore(self.root)

    def _register(self, config: ExperimentConfig) -> dict:
        with get_db(self.root) as db:
            experiment = crud.get_or_create_experiment(
                db,
                name=config.name,
                environment=config.environment.value,
                algorithm=config.algorithm.value,
                model_kind=config.model.value,
                kg_variant=config.kg_variant.value,
                config=config.model_dump(mode="json"),
            )
            runs = {seed: crud.get_or_create_run(db, experiment.id, seed).id for seed in config.seeds}
        logger.info(f"Registered experiment {config.name} with {len(runs)} runs")
        return runs

    def _record_result(self, run_id: int, record: RunRecord) -> None:
        final = {}
        for split in (EvalSplit.TRAIN, EvalSplit.TEST):
            rows = [e for e in record.evals if e.split == split]
            final[split] = rows[-1] if rows else None
        with get_db(self.root) as db:
            crud.update_run(
                db,
                run_id,
                status=record.status,
                episodes_completed=len(record.episodes),
                final_train_success=final[EvalSplit.TRAIN].success_rate if final[EvalSplit.TRAIN] else None,
                final_test_success=final[EvalSplit.TEST].success_rate if final[EvalSplit.TEST] else None,
                final_return=final[EvalSplit.TRAIN].mean_return if final[EvalSplit.TRAIN] else None,
                checkpoint_path=record.checkpoint,
            )

    def _mark(self, run_ids: dict, seeds, status: str) -> None:
        with get_db(self.root) as db:
            for seed in seeds:
                crud.update_run(db, run_ids[seed], status=status)

    def run_experiment(self, config: ExperimentConfig) -> List[RunRecord]:
        """One independent run per seed; records land under <output>/<name>/seed-<n>/"""
        try:
            build_world(config)
        except ConfigurationError as e:
            logger.error(f"Invalid experiment {config.name}: {e}")
            raise

        run_ids = self._register(config)
        payload = config.model_dump_json()
        workers = max(1, min(self.settings.workers, len(config.seeds)))
        checkpoint_every = max(1, self.settings.checkpoint_every)
        self._mark(run_ids, config.seeds, "running")
        logger.info(f"Running {config.name}: {len(config.seeds)} seeds on {workers} worker(s)")

        pending = set(config.seeds)
        records: List[RunRecord] = []
        try:
            if workers == 1:
                for seed in config.seeds:
                    result = execute_run(payload, seed, str(self.root), checkpoint_every)
                    records.append(self._finish(run_ids, seed, result))
                    pending.discard(seed)
            else:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    futures = {
                        seed: pool.submit(execute_run, payload, seed, str(self.root), checkpoint_every)
                        for seed in config.seeds
                    }
                    for seed, future in futures.items():
                        records.append(self._finish(run_ids, seed, future.result()))
                        pending.discard(seed)
        except KeyboardInterrupt:
            self._mark(run_ids, pending, "interrupted")
            raise
        except Exception as e:
            logger.error(f"Experiment {config.name} failed: {e}")
            self._mark(run_ids, pending, "failed")
            raise
        return sorted(records, key=lambda r: r.seed)

    def _finish(self, run_ids: dict, seed: int, result: str) -> RunRecord:
        record = RunRecord.model_validate_json(result)
        self._record_result(run_ids[seed], record)
        return record
