"""CRUD operations for the run index"""

from sqlalchemy.orm import Session
from typing import List, Optional
from datetime import datetime, timedelta, timezone
from pkgnet.database.models import Experiment, Run


def get_or_create_experiment(
    db: Session,
    name: str,
    environment: str,
    algorithm: str,
    model_kind: str,
    kg_variant: str,
    config: Optional[dict] = None
) -> Experiment:
    """Fetch an experiment by name, registering it on first sight"""
    db_experiment = db.query(Experiment).filter(Experiment.name == name).first()
    if db_experiment:
        return db_experiment

    db_experiment = Experiment(
        name=name,
        environment=environment,
        algorithm=algorithm,
        model_kind=model_kind,
        kg_variant=kg_variant,
        config=config
    )
    db.add(db_experiment)
    db.commit()
    db.refresh(db_experiment)
    return db_experiment


def get_or_create_run(db: Session, experiment_id: int, seed: int) -> Run:
    db_run = db.query(Run).filter(Run.experiment_id == experiment_id, Run.seed == seed).first()
    if db_run:
        return db_run

    db_run = Run(experiment_id=experiment_id, seed=seed)
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    return db_run


def update_run(
    db: Session,
    run_id: int,
    status: Optional[str] = None,
    episodes_completed: Optional[int] = None,
    final_train_success: Optional[float] = None,
    final_test_success: Optional[float] = None,
    final_return: Optional[float] = None,
    checkpoint_path: Optional[str] = None
) -> Optional[Run]:
    """Update the progress of a run"""
    db_run = db.query(Run).filter(Run.id == run_id).first()

    if not db_run:
        return None

    if status is not None:
        db_run.status = status
    if episodes_completed is not None:
        db_run.episodes_completed = episodes_completed
    if final_train_success is not None:
        db_run.final_train_success = final_train_success
    if final_test_success is not None:
        db_run.final_test_success = final_test_success
    if final_return is not None:
        db_run.final_return = final_return
    if checkpoint_path is not None:
        db_run.checkpoint_path = checkpoint_path

    db_run.updated_at = datetime.now(timezone.utc)
    db.commit()
    db.refresh(db_run)
    return db_run


def get_recent_experiments(
    db: Session,
    limit: int = 20,
    environment: Optional[str] = None
) -> List[Experiment]:
    """Get recently registered experiments"""
    query = db.query(Experiment)

    if environment:
        query = query.filter(Experiment.environment == environment)

    return query.order_by(Experiment.created_at.desc(), Experiment.id.desc()).limit(limit).all()


def get_experiment_with_runs(db: Session, name: str) -> Optional[Experiment]:
    return db.query(Experiment).filter(Experiment.name == name).first()


def delete_experiment(db: Session, name: str) -> bool:
    """Delete an experiment and all its runs from the index; records on disk are kept"""
    db_experiment = db.query(Experiment).filter(Experiment.name == name).first()

    if not db_experiment:
        return False

    db.delete(db_experiment)
    db.commit()
    return True


def get_statistics(db: Session) -> dict:
    """Get overall statistics"""
    total_experiments = db.query(Experiment).count()
    total_runs = db.query(Run).count()
    completed_runs = db.query(Run).filter(Run.status == "completed").count()

    week_ago = datetime.now(timezone.utc) - timedelta(days=7)
    recent_experiments = db.query(Experiment).filter(
        Experiment.created_at >= week_ago
    ).count()

    return {
        "total_experiments": total_experiments,
        "total_runs": total_runs,
        "completed_runs": completed_runs,
        "recent_experiments_7d": recent_experiments
    }
