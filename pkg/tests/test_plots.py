import csv

import pytest

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import ManipulationResult
from pkgnet.services.experiment_service import execute_run
from pkgnet.services.plot_service import PlotService


@pytest.fixture
def records(tmp_path, tiny_sokoban_config):
    root = tmp_path / "records"
    for name in ("alpha", "beta"):
        config = tiny_sokoban_config(name=name, seeds=[0, 1])
        for seed in config.seeds:
            execute_run(config.model_dump_json(), seed, str(root), 50)
    return root


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_learning_curve_is_byte_identical_on_repeat(tmp_path, records):
    first = PlotService(tmp_path / "p1").emit_plots(records, "learning-curve")
    second = PlotService(tmp_path / "p2").emit_plots(records, "learning-curve")
    assert [p.name for p in first] == ["learning-curve.svg", "learning-curve.csv"]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_learning_curve_csv_holds_the_plotted_points(tmp_path, records):
    _, data = PlotService(tmp_path / "plots").emit_plots(records, "learning-curve")
    rows = read_csv(data)
    assert rows[0] == ["label", "panel", "episode", "mean", "stderr"]
    train = [r for r in rows[1:] if r[0] == "alpha" and r[1] == "train"]
    assert [r[2] for r in train] == ["1", "2", "3"]
    test = [r for r in rows[1:] if r[0] == "beta" and r[1] == "test"]
    assert [r[2] for r in test] == ["2"]


def test_ablation_panel_has_both_splits(tmp_path, records):
    _, data = PlotService(tmp_path / "plots").emit_plots(records, "ablation-panel")
    assert {(r[0], r[1]) for r in read_csv(data)[1:]} == {
        ("alpha", "train"), ("alpha", "test"), ("beta", "train"), ("beta", "test"),
    }


def test_single_experiment_directory_plots(tmp_path, records):
    _, data = PlotService(tmp_path / "plots").emit_plots(records / "alpha", "learning-curve")
    assert {r[0] for r in read_csv(data)[1:]} == {"alpha"}


def test_manipulation_table(tmp_path):
    results = tmp_path / "manipulations"
    for name, value in (("base", 120.0), ("remove-coin", -40.0)):
        (results / name).mkdir(parents=True)
        result = ManipulationResult(name=name, episodes=10, mean_return=value, stderr_return=5.0, success_rate=0.5)
        (results / name / "result.json").write_text(result.model_dump_json(), encoding="utf-8")
    svg, data = PlotService(tmp_path / "plots").emit_plots(results, "manipulation-table")
    assert svg.read_text(encoding="utf-8").lstrip().startswith("<?xml")
    assert read_csv(data) == [
        ["scenario", "episodes", "mean_return", "stderr_return", "success_rate"],
        ["base", "10", "120.000000", "5.000000", "0.500000"],
        ["remove-coin", "10", "-40.000000", "5.000000", "0.500000"],
    ]


def test_unknown_kind_and_empty_records(tmp_path):
    with pytest.raises(ConfigurationError):
        PlotService(tmp_path).emit_plots(tmp_path, "scatter")
    (tmp_path / "empty").mkdir()
    with pytest.raises(ConfigurationError):
        PlotService(tmp_path / "plots").emit_plots(tmp_path / "empty", "learning-curve")
