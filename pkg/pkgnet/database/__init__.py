"""Run-index database package"""
from pkgnet.database.database import Base, get_db, get_engine
from pkgnet.database.models import Experiment, Run
from pkgnet.database import crud

__all__ = [
    "Base",
    "get_db",
    "get_engine",
    "Experiment",
    "Run",
    "crud"
]
