"""Command line driver: exit codes, output routing, matrix printing."""

import json
import pathlib

import pytest

from manifold.cli import main

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

INFEASIBLE = {
    "piece": {"name": "jam", "end": 10.0},
    "instruments": {
        "synth": {
            "properties": {"Amplitude": {"kind": "level", "range": [0.0, 1.0]}}
        }
    },
    "grid": {"marks": [0.0, 10.0], "weights": [1.0]},
    "sections": [
        {"id": "A", "weight": 1.0, "affinity": [1.0], "events": []},
        {"id": "B", "weight": 1.0, "affinity": [1.0], "events": []},
    ],
}


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def test_compose_success_prints_written_paths(tmp_path, capsys):
    code = main(
        [
            "compose",
            "--config",
            str(CONFIG_DIR / "minimal.json"),
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed
    for line in printed:
        assert pathlib.Path(line).is_file()
    names = sorted(pathlib.Path(line).name for line in printed)
    assert names == ["minimal-v0.sco", "minimal-v0.txt", "summary.txt"]


def test_missing_config_exits_2(tmp_path, capsys):
    code = main(["compose", "--config", str(tmp_path / "nope.json")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_schema_error_exits_2(tmp_path, capsys):
    broken = {"piece": {"name": "x", "end": 1.0}}
    path = write_json(tmp_path, "broken.json", broken)
    code = main(["compose", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_bad_format_exits_2(tmp_path, capsys):
    code = main(
        [
            "compose",
            "--config",
            str(CONFIG_DIR / "minimal.json"),
            "--out",
            str(tmp_path),
            "--format",
            "sco,midi",
        ]
    )
    assert code == 2
    assert "midi" in capsys.readouterr().err


def test_infeasible_schedule_exits_3(tmp_path, capsys):
    path = write_json(tmp_path, "jam.json", INFEASIBLE)
    code = main(["compose", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_unwritable_out_dir_exits_4(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("occupied")
    code = main(
        [
            "compose",
            "--config",
            str(CONFIG_DIR / "minimal.json"),
            "--out",
            str(blocker / "nested"),
        ]
    )
    assert code == 4
    assert "error:" in capsys.readouterr().err


def test_disco_out_env_var(tmp_path, monkeypatch, capsys):
    target = tmp_path / "env-dir"
    monkeypatch.setenv("DISCO_OUT", str(target))
    code = main(["compose", "--config", str(CONFIG_DIR / "minimal.json")])
    assert code == 0
    capsys.readouterr()
    assert (target / "minimal-v0.sco").is_file()


def test_out_flag_beats_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DISCO_OUT", str(tmp_path / "ignored"))
    chosen = tmp_path / "chosen"
    code = main(
        [
            "compose",
            "--config",
            str(CONFIG_DIR / "minimal.json"),
            "--out",
            str(chosen),
        ]
    )
    assert code == 0
    capsys.readouterr()
    assert (chosen / "minimal-v0.sco").is_file()
    assert not (tmp_path / "ignored").exists()


def test_matrix_subcommand_matches_hand_computation(tmp_path, capsys):
    spec = {
        "sections": [
            {"id": "A", "weight": 2.0},
            {"id": "B", "weight": 1.0},
        ],
        "grid": {"marks": [0.0, 1.0, 2.0], "weights": [1.0, 3.0]},
        "affinity": [[1.0, 1.0], [1.0, 1.0]],
    }
    path = write_json(tmp_path, "spec.json", spec)
    code = main(["matrix", "--input", str(path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["sections"] == ["A", "B"]
    assert payload["marks"] == [0.0, 1.0, 2.0]
    expected = [[2 / 12, 6 / 12], [1 / 12, 3 / 12]]
    for got_row, want_row in zip(payload["masses"], expected):
        for got, want in zip(got_row, want_row):
            assert got == pytest.approx(want, abs=1e-12)
    assert payload["cumulative"][0][1] == pytest.approx(8 / 12, abs=1e-12)
    assert payload["cumulative"][1][1] == pytest.approx(1.0, abs=1e-12)


def test_matrix_degenerate_exits_3(tmp_path, capsys):
    spec = {
        "sections": [{"id": "A", "weight": 1.0}],
        "grid": {"marks": [0.0, 1.0], "weights": [1.0]},
        "affinity": [[0.0]],
    }
    path = write_json(tmp_path, "zero.json", spec)
    code = main(["matrix", "--input", str(path)])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_matrix_missing_input_exits_2(tmp_path, capsys):
    code = main(["matrix", "--input", str(tmp_path / "absent.json")])
    assert code == 2
    assert "error:" in capsys.readouterr().err
