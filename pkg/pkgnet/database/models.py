"""Database models for the run index"""

from sqlalchemy import Column, Integer, String, DateTime, Float, JSON, ForeignKey, UniqueConstraint
from sqlalchemy.orm import relationship
from datetime import datetime, timezone
from pkgnet.database.database import Base


class Experiment(Base):
    """One experiment configuration"""
    __tablename__ = "experiments"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, unique=True, index=True)
    environment = Column(String, index=True)  # 'sokoban' or 'pacman'
    algorithm = Column(String)  # 'dqn', 'per', 'a2c'
    model_kind = Column(String)
    kg_variant = Column(String)
    config = Column(JSON)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))

    runs = relationship("Run", back_populates="experiment", cascade="all, delete-orphan")


class Run(Base):
    """One seed of an experiment"""
    __tablename__ = "runs"
    __table_args__ = (UniqueConstraint("experiment_id", "seed"),)

    id = Column(Integer, primary_key=True, index=True)
    experiment_id = Column(Integer, ForeignKey("experiments.id"))
    seed = Column(Integer)
    status = Column(String, default="pending")  # 'pending', 'running', 'completed', 'interrupted', 'failed'
    episodes_completed = Column(Integer, default=0)

    final_train_success = Column(Float, nullable=True)
    final_test_success = Column(Float, nullable=True)
    final_return = Column(Float, nullable=True)
    checkpoint_path = Column(String, nullable=True)

    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))
    updated_at = Column(DateTime, default=lambda: datetime.now(timezone.utc), onupdate=lambda: datetime.now(timezone.utc))

    experiment = relationship("Experiment", back_populates="runs")
