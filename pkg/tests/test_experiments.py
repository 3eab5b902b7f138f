"""Trial harness tests: manifests, persisted artifacts, invariants.

The two load-bearing invariants live here: byte-identical reruns for a
fixed manifest, and the aggregate file contents agreeing exactly with
statistics recomputed from the persisted per-trial point files.
"""

import json
import math

import pytest

from no3l.construct import delete_max_of_triples
from no3l.experiments import (
    EventRecord,
    TrialManifest,
    density_box_sides,
    lemma_report,
    lemma_report_csv,
    run_trials,
    verify_theorem,
)
from no3l.parallel import map_ordered, resolve_workers
from no3l.sampling import read_pointset, shell_counts
from no3l.triples import box_triple_counts, count_collinear_triples


def _manifest(tmp_path, **kw):
    args = dict(base_seed=40, trial_count=3, c=0.3, window_exponent=7,
                out_dir=str(tmp_path / "trials"))
    args.update(kw)
    return TrialManifest(**args)


def test_manifest_validation():
    TrialManifest(base_seed=0, trial_count=1, c=0.0, window_exponent=2)
    with pytest.raises(ValueError):
        TrialManifest(base_seed=0, trial_count=0, c=0.1, window_exponent=5)
    with pytest.raises(ValueError):
        TrialManifest(base_seed=0, trial_count=1, c=-0.1, window_exponent=5)
    with pytest.raises(ValueError):
        TrialManifest(base_seed=0, trial_count=1, c=0.1, window_exponent=0)
    with pytest.raises(ValueError):
        TrialManifest(base_seed=0, trial_count=1, c=0.1, window_exponent=5,
                      log_base="log2")
    with pytest.raises(ValueError):
        TrialManifest(base_seed=0, trial_count=1, c=0.1, window_exponent=5,
                      t_exact_cap=8)


def test_manifest_seeds_and_file_round_trip(tmp_path):
    man = _manifest(tmp_path, base_seed=9, trial_count=4)
    assert man.seeds == [9, 10, 11, 12]
    path = tmp_path / "man.json"
    path.write_text(json.dumps(man.__dict__), encoding="ascii")
    assert TrialManifest.from_json_file(path) == man


def test_density_box_sides():
    assert density_box_sides(13) == [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
    assert density_box_sides(5) == [16]
    assert density_box_sides(4) == []


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("run")
    man = _manifest(tmp)
    return man, run_trials(man)


def test_run_trials_per_trial_contents(small_run):
    from pathlib import Path

    man, res = small_run
    assert res.t_values == list(range(1, 7))
    assert [tr.seed for tr in res.trials] == man.seeds
    for tr in res.trials:
        # file names are relative: the output directory is relocatable
        q = read_pointset(Path(man.out_dir) / tr.q_file)
        s = read_pointset(Path(man.out_dir) / tr.s_file)
        assert len(q) == tr.q_size and len(s) == tr.s_size
        assert tr.x == shell_counts(q, man.window_exponent)
        assert tr.y == box_triple_counts(q, man.window_exponent - 1)
        assert s.points == delete_max_of_triples(q).points
        assert count_collinear_triples(s.in_box(1 << (man.window_exponent - 1))) == 0
        # per-shell retention: the deletion rule charges each removed
        # point to a triple whose largest member it is
        s_counts = shell_counts(s, man.window_exponent)
        for t in range(man.window_exponent - 1):
            assert s_counts[t] >= tr.x[t] - tr.y[t + 1]


def test_run_trials_events_match_thresholds(small_run):
    man, res = small_run
    for tr in res.trials:
        for ev, t in zip(tr.events, res.t_values):
            x_thr = man.c * 2 ** (t - 1) / math.sqrt(t)
            y_thr = 2.0 * res.k1_hat * man.c**3 * 2**t / math.sqrt(t)
            assert ev.T == t
            assert ev.x_ok == (tr.x[t] >= x_thr)
            assert ev.y_ok == (tr.y[t] <= y_thr)
            assert ev.e_ok == (ev.x_ok and ev.y_ok)


def test_run_trials_rerun_is_byte_identical(small_run):
    man, res = small_run
    import pathlib

    out = pathlib.Path(man.out_dir)
    before = {p.name: p.read_bytes() for p in out.iterdir()}
    rerun = run_trials(man)
    after = {p.name: p.read_bytes() for p in out.iterdir()}
    assert before == after
    assert rerun == res


def test_aggregate_recompute_equality(small_run):
    man, res = small_run
    import pathlib

    doc = json.loads((pathlib.Path(man.out_dir) / "aggregate.json").read_text())
    assert doc["manifest"]["base_seed"] == man.base_seed
    assert doc["k1_hat"] == res.k1_hat
    assert doc["k2_hat"] == res.k2_hat
    for row, tr in zip(doc["trials"], res.trials):
        q = read_pointset(pathlib.Path(man.out_dir) / tr.q_file)
        assert row["seed"] == tr.seed
        assert row["x"] == shell_counts(q, man.window_exponent)
        assert row["y"] == box_triple_counts(q, man.window_exponent - 1)
        assert [d["n"] for d in row["density"]] == [n for n, _, _ in tr.density]
        assert [d["count"] for d in row["density"]] == [k for _, k, _ in tr.density]


def test_csv_outputs_have_fixed_headers(small_run):
    man, res = small_run
    import pathlib

    agg = (pathlib.Path(man.out_dir) / "aggregate.csv").read_text().splitlines()
    assert agg[0] == "T,seed,x,y,x_ok,y_ok,e_ok"
    assert len(agg) == 1 + len(res.t_values) * len(res.trials)
    den = (pathlib.Path(man.out_dir) / "density.csv").read_text().splitlines()
    assert den[0] == "n,seed,count,ratio"
    assert len(den) == 1 + len(res.trials[0].density) * len(res.trials)


def test_run_trials_zero_rate_trial(tmp_path):
    man = _manifest(tmp_path, trial_count=1, c=0.0)
    res = run_trials(man, write_files=False)
    tr = res.trials[0]
    assert tr.q_size == tr.s_size == 0
    assert tr.x == [0] * 7 and tr.y == [0] * 7
    assert all(ratio == 0.0 for _, _, ratio in tr.density)
    assert res.k1_hat == 0.0


def test_run_trials_without_files(tmp_path):
    man = _manifest(tmp_path, trial_count=2)
    res = run_trials(man, write_files=False)
    assert not (tmp_path / "trials").exists()
    assert all(tr.q_file is None and tr.s_file is None for tr in res.trials)


def test_worker_count_does_not_change_results(tmp_path, monkeypatch):
    man = _manifest(tmp_path, trial_count=2, window_exponent=6)
    monkeypatch.setenv("NO3L_THREADS", "1")
    serial = run_trials(man, write_files=False)
    monkeypatch.setenv("NO3L_THREADS", "2")
    pooled = run_trials(man, write_files=False)
    assert serial == pooled


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv("NO3L_THREADS", "3")
    assert resolve_workers() == 3
    monkeypatch.setenv("NO3L_THREADS", "0")
    with pytest.raises(ValueError):
        resolve_workers()
    monkeypatch.setenv("NO3L_THREADS", "soon")
    with pytest.raises(ValueError):
        resolve_workers()
    monkeypatch.delenv("NO3L_THREADS")
    assert resolve_workers() >= 1


def test_map_ordered_preserves_order(monkeypatch):
    monkeypatch.setenv("NO3L_THREADS", "2")
    assert map_ordered(_square, [3, 1, 2]) == [9, 1, 4]


def _square(v):
    return v * v


def test_verify_theorem_semantics(small_run):
    _, res = small_run
    report = verify_theorem(res, n_min=16, alpha=0.0)
    assert report["ok"] and report["failing"] == []
    assert [row["n"] for row in report["per_n"]] == [16, 32, 64]
    strict = verify_theorem(res, n_min=32, alpha=math.inf)
    assert not strict["ok"]
    assert strict["failing"] == [32, 64]
    with pytest.raises(ValueError):
        verify_theorem(type(res)(res.manifest, res.t_values, [], 0.0, 0.0), 16, 0.0)


def test_event_record_degenerate_convention():
    ev = EventRecord(T=3, x_ok=False, y_ok=True, e_ok=False)
    assert not ev.e_ok


def test_lemma_report_zero_rate_degenerates():
    rep = lemma_report([2, 3, 4], 0.0, [1, 2, 3, 4])
    assert rep["x_miss_freq"] == [1.0, 1.0, 1.0]
    assert rep["y_miss_freq"] == [0.0, 0.0, 0.0]
    assert rep["event_miss_freq"] == [1.0, 1.0, 1.0]
    assert rep["chebyshev_x_bound"] == [math.inf] * 3
    assert rep["weights"] == [] and rep["variance_bounds"] == []
    assert rep["summability_proxy"] == 3.0


def test_lemma_report_echoes_caps_and_is_deterministic():
    a = lemma_report([2, 3], 0.4, range(1, 21))
    b = lemma_report([2, 3], 0.4, range(1, 21))
    assert a == b
    assert a["enum_cap"] == 7 and a["var_cap"] == 6
    assert a["sample_size"] == 20
    assert len(a["weights"]) == 2 and len(a["variance_bounds"]) == 2
    # exact_ey rides along for every T under the cap
    assert a["weights"][0]["T"] == 2


def test_lemma_report_csv_one_row_per_exponent():
    rep = lemma_report([2, 3, 4], 0.4, range(1, 11))
    lines = lemma_report_csv(rep).splitlines()
    assert lines[0].startswith("T,c,sample_size,")
    assert len(lines) == 4
    # beyond both caps the exact columns go blank
    rep_high = lemma_report([7, 8], 0.4, range(1, 4), enum_cap=7, var_cap=6)
    rows = lemma_report_csv(rep_high).splitlines()
    t7 = rows[1].split(",")
    t8 = rows[2].split(",")
    header = rows[0].split(",")
    i_ey = header.index("exact_ey")
    i_v1 = header.index("v1_bound")
    assert t7[i_ey] != "" and t7[i_v1] == ""
    assert t8[i_ey] == "" and t8[i_v1] == ""
