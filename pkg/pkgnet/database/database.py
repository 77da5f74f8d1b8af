"""Run-index database configuration and session management"""

from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Union

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.ext.declarative import declarative_base
from sqlalchemy.orm import Session, sessionmaker

from pkgnet.config import get_settings

Base = declarative_base()


@lru_cache()
def get_engine(root: str) -> Engine:
    """One SQLite index per output directory, created on first use"""
    Path(root).mkdir(parents=True, exist_ok=True)
    db_path = Path(root) / get_settings().database_name
    engine = create_engine(
        f"sqlite:///{db_path}",
        connect_args={"check_same_thread": False},
        pool_pre_ping=True,
        echo=False
    )
    Base.metadata.create_all(bind=engine)
    return engine


@contextmanager
def get_db(root: Union[str, Path]) -> Iterator[Session]:
    session_factory = sessionmaker(autocommit=False, autoflush=False, bind=get_engine(str(Path(root).resolve())))
    db = session_factory()
    try:
        yield db
    finally:
        db.close()
