import json

import pytest

from pkgnet.main import EXIT_INVALID, EXIT_OK, main


@pytest.fixture
def config_file(tmp_path, tiny_sokoban_config):
    path = tmp_path / "tiny.json"
    path.write_text(tiny_sokoban_config(episodes=2).model_dump_json(), encoding="utf-8")
    return path


@pytest.fixture
def trained(tmp_path, config_file, capsys):
    root = tmp_path / "records"
    assert main(["train", "--config", str(config_file), "--output", str(root)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    return root, summary


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "reproduce" in capsys.readouterr().out


def test_missing_config_is_invalid_input(tmp_path):
    assert main(["train", "--config", str(tmp_path / "nope.json"), "--output", str(tmp_path)]) == EXIT_INVALID


def test_unknown_flag_is_invalid_input(config_file):
    assert main(["train", "--config", str(config_file), "--frobnicate"]) == EXIT_INVALID


def test_missing_subcommand_is_invalid_input():
    assert main([]) == EXIT_INVALID


def test_malformed_config_is_invalid_input(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "episodes": -1}), encoding="utf-8")
    assert main(["train", "--config", str(path), "--output", str(tmp_path)]) == EXIT_INVALID


def test_train_without_output_is_invalid_input(config_file):
    assert main(["train", "--config", str(config_file)]) == EXIT_INVALID


def test_reproduce_without_output_is_invalid_input(capsys):
    assert main(["reproduce", "--figure", "2"]) == EXIT_INVALID
    assert "--output" in capsys.readouterr().err


def test_train_prints_one_summary_per_seed(trained):
    root, summary = trained
    assert len(summary) == 1
    assert summary[0]["experiment"] == "tiny" and summary[0]["episodes"] == 2
    assert summary[0]["status"] == "completed"
    assert (root / "tiny" / "seed-0" / "episodes.jsonl").exists()


def test_train_overrides_seeds_and_episodes(tmp_path, config_file, capsys):
    root = tmp_path / "overridden"
    args = ["train", "--config", str(config_file), "--output", str(root), "--seeds", "2", "--episodes", "1"]
    assert main(args) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert [(s["seed"], s["episodes"]) for s in summary] == [(0, 1), (1, 1)]


def test_eval_reads_the_checkpoint(tmp_path, trained, capsys):
    root, summary = trained
    out = tmp_path / "eval"
    assert main(["eval", "--checkpoint", summary[0]["checkpoint"], "--set", "train", "--output", str(out)]) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["split"] == "train" and record["episodes"] == 4
    assert (out / "eval-train.json").exists()


def test_eval_missing_checkpoint(tmp_path):
    assert main(["eval", "--checkpoint", str(tmp_path / "none.pkgn")]) == EXIT_INVALID


def test_manipulate_with_a_bundled_script(tmp_path, trained, capsys):
    _, summary = trained
    args = ["manipulate", "--checkpoint", summary[0]["checkpoint"], "--edits", "sokoban-remove-fills-test",
            "--episodes", "3", "--output", str(tmp_path / "m")]
    assert main(args) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["name"] == "sokoban-remove-fills-test" and result["episodes"] == 3


def test_manipulate_with_an_invalid_script(tmp_path, trained):
    _, summary = trained
    script = tmp_path / "bad-edits.json"
    script.write_text(json.dumps([{"operation": "remove-edge", "src": "+", "dst": "A"}]), encoding="utf-8")
    args = ["manipulate", "--checkpoint", summary[0]["checkpoint"], "--edits", str(script),
            "--output", str(tmp_path / "m")]
    assert main(args) == EXIT_INVALID


def test_plot_and_history(tmp_path, trained, capsys):
    root, _ = trained
    assert main(["plot", "--records", str(root), "--kind", "learning-curve"]) == EXIT_OK
    assert (root / "plots" / "learning-curve.svg").exists()
    capsys.readouterr()

    assert main(["history", "--output", str(root)]) == EXIT_OK
    history = json.loads(capsys.readouterr().out)
    assert [e["name"] for e in history["experiments"]] == ["tiny"]
    assert history["experiments"][0]["runs"][0]["status"] == "completed"
    assert history["statistics"]["completed_runs"] == 1

    assert main(["history", "--output", str(root), "--delete", "tiny"]) == EXIT_OK
    capsys.readouterr()
    assert main(["history", "--output", str(root), "--name", "tiny"]) == EXIT_INVALID


def test_plot_missing_records(tmp_path):
    assert main(["plot", "--records", str(tmp_path / "none"), "--kind", "learning-curve"]) == EXIT_INVALID


def test_ablate_trains_each_variant_once(tmp_path, config_file, capsys):
    args = ["ablate", "--config", str(config_file), "--output", str(tmp_path / "ablate"),
            "--variant", "no-edges", "--variant", "same-edges", "--variant", "no-edges"]
    assert main(args) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert [s["experiment"] for s in summary] == ["tiny-no-edges", "tiny-same-edges"]


def test_ablate_rejects_unknown_variants(tmp_path, config_file):
    args = ["ablate", "--config", str(config_file), "--output", str(tmp_path), "--variant", "sparse"]
    assert main(args) == EXIT_INVALID
