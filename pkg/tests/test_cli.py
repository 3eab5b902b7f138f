"""Command line contract tests.

Exercised in process through cli.main for speed; one subprocess test
covers the installed entry point.  Exit statuses are part of the
contract: 0 success, 1 failed check, 2 usage error.
"""

import json
import subprocess
import sys

import pytest

from no3l.cli import main
from no3l.sampling import PointSet, read_pointset, write_pointset


def _grid3(path):
    pts = [(x, y) for x in (1, 2, 3) for y in (1, 2, 3)]
    write_pointset(PointSet(pts, {"kind": "baseline"}), path)
    return path


def test_sample_writes_deterministic_file(tmp_path, capsys):
    out1 = tmp_path / "a.tsv"
    out2 = tmp_path / "b.tsv"
    assert main(["sample", "--seed", "42", "--c", "0.1", "--window", "10",
                 "--out", str(out1)]) == 0
    assert main(["sample", "--seed", "42", "--c", "0.1", "--window", "10",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    ps = read_pointset(out1)
    assert ps.meta == {"kind": "sampled", "seed": 42, "c": 0.1, "window_exponent": 10}


def test_sample_rejects_negative_rate(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--seed", "1", "--c", "-1", "--window", "5",
              "--out", str(tmp_path / "x.tsv")])
    assert exc.value.code == 2
    assert "--c" in capsys.readouterr().err


def test_pipeline_sample_construct_verify(tmp_path, capsys):
    q = tmp_path / "q.tsv"
    s = tmp_path / "s.tsv"
    main(["sample", "--seed", "5", "--c", "0.4", "--window", "8", "--out", str(q)])
    assert main(["construct", "--in", str(q), "--method", "delete-max",
                 "--out", str(s)]) == 0
    assert main(["verify", "--in", str(s)]) == 0
    assert "triples: 0" in capsys.readouterr().out
    assert read_pointset(s).meta["kind"] == "constructed"


def test_verify_reports_grid_triples(tmp_path, capsys):
    path = _grid3(tmp_path / "grid.tsv")
    assert main(["verify", "--in", str(path)]) == 1
    assert "triples: 8" in capsys.readouterr().out
    assert main(["verify", "--in", str(path), "--box", "2"]) == 0
    assert "triples: 0" in capsys.readouterr().out


def test_verify_missing_file_is_usage_error(tmp_path, capsys):
    assert main(["verify", "--in", str(tmp_path / "nope.tsv")]) == 2
    assert "error" in capsys.readouterr().err


def test_construct_parabola(tmp_path, capsys):
    out = tmp_path / "par.tsv"
    assert main(["construct", "--method", "parabola", "--p", "101",
                 "--out", str(out)]) == 0
    assert len(read_pointset(out)) == 101
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--method", "parabola", "--p", "100",
              "--out", str(out)])
    assert exc.value.code == 2
    assert "prime" in capsys.readouterr().err


def test_construct_missing_conditional_flags(tmp_path, capsys):
    assert main(["construct", "--method", "greedy", "--out",
                 str(tmp_path / "g.tsv")]) == 2
    assert "--window" in capsys.readouterr().err
    assert main(["construct", "--method", "delete-max", "--out",
                 str(tmp_path / "d.tsv")]) == 2
    assert "--in" in capsys.readouterr().err


def test_construct_greedy(tmp_path, capsys):
    out = tmp_path / "g.tsv"
    assert main(["construct", "--method", "greedy", "--window", "4",
                 "--out", str(out)]) == 0
    assert len(read_pointset(out)) == 20
    assert main(["verify", "--in", str(out)]) == 0


def test_stats_runs_manifest(tmp_path, capsys):
    man = tmp_path / "man.json"
    man.write_text(json.dumps({
        "base_seed": 3, "trial_count": 2, "c": 0.2, "window_exponent": 6,
    }), encoding="ascii")
    out = tmp_path / "runs"
    assert main(["stats", "--manifest", str(man), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert "aggregate.json" in names
    assert "trial0000_q.tsv" in names
    # every persisted point file parses back
    for name in names:
        if name.endswith(".tsv") and name.startswith("trial"):
            read_pointset(out / name)


def test_lemmas_csv_has_one_row_per_exponent(capsys):
    assert main(["lemmas", "--tmin", "2", "--tmax", "4", "--c", "0.4",
                 "--trials", "10", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("T,c,sample_size,")
    assert len(lines) == 4


def test_lemmas_json_contains_exact_and_sampled_means(tmp_path):
    out = tmp_path / "rep.json"
    assert main(["lemmas", "--tmin", "2", "--tmax", "3", "--c", "0.4",
                 "--trials", "10", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["t_values"] == [2, 3]
    assert len(doc["weights"]) == 2
    assert len(doc["monte_carlo"]["y_mean"]) == 2


def test_lemmas_rejects_reversed_range(capsys):
    assert main(["lemmas", "--tmin", "5", "--tmax", "3", "--c", "0.4",
                 "--trials", "4"]) == 2
    assert "--tmax" in capsys.readouterr().err


def test_bench_pass_and_fail(tmp_path, capsys):
    argv = ["bench", "--window", "7", "--c", "0.3", "--trials", "3",
            "--nmin", "16", "--alpha"]
    assert main(argv + ["0.0", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "n,median_ratio,ok"
    assert len(out) == 1 + 3  # n = 16, 32, 64
    assert main(argv + ["99.0"]) == 1
    err = capsys.readouterr().err
    assert "n = 16, 32, 64" in err


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "q.tsv"
    proc = subprocess.run(
        [sys.executable, "-m", "no3l.cli", "sample", "--seed", "1", "--c", "0.1",
         "--window", "6", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert out.exists()
