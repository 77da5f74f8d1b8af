"""Bundled experiment configs, reproduction suites and edit scripts"""

from pathlib import Path
from typing import Union

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import ReproductionSuite

CONFIG_DIR = Path(__file__).parent
EDITS_DIR = CONFIG_DIR / "edits"
FIGURES = ("2", "3", "4", "5", "6", "table2")


def suite_path(figure: str) -> Path:
    if figure not in FIGURES:
        raise ConfigurationError(f"unknown figure {figure!r}; expected one of {list(FIGURES)}")
    prefix = "" if figure.startswith("table") else "figure"
    return CONFIG_DIR / f"{prefix}{figure}.json"


def load_suite(figure: str) -> ReproductionSuite:
    return ReproductionSuite.model_validate_json(suite_path(figure).read_text(encoding="utf-8"))


def resolve_edits(name: Union[str, Path]) -> Path:
    """A path on disk, or the name of a bundled edit script"""
    path = Path(name)
    if path.exists():
        return path
    bundled = EDITS_DIR / (path.name if path.suffix == ".json" else f"{path.name}.json")
    if bundled.exists():
        return bundled
    raise ConfigurationError(f"edit script {name} not found (neither a file nor a bundled script)")
