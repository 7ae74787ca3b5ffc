import io
import os
import subprocess
import sys

import pytest

from rtlr.bench import CSV_COLUMNS, Pipeline, SweepConfig, read_rows, run_sweep, sample_groups
from rtlr.cli import main
from rtlr.synthetic import random_temporal

T1 = "1 2 0\n2 3 0\n1 2 1\n"


@pytest.fixture
def t1_file(tmp_path):
    p = tmp_path / "t1.txt"
    p.write_text(T1)
    return str(p)


@pytest.fixture
def small_file(tmp_path):
    el = random_temporal(30, 6, 40, seed=1)
    p = tmp_path / "small.txt"
    p.write_text("".join(f"{e.src} {e.dst} {e.ts}\n" for e in el.edges))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_query_t1_all_algorithms(t1_file, capsys):
    code, out, _ = run(["query", "--dataset", t1_file, "--snapshots", "2", "--group", "1",
                        "--l", "1", "--algorithm", "all", "--theta", "20"], capsys)
    assert code == 0
    rows = read_rows(out)
    assert [r["algorithm"] for r in rows] == ["sbg", "ce_sbg", "o_sbg"]
    assert all(r["edges"] == "2->3" and float(r["est_gain"]) == 1.0 for r in rows)
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_query_l_zero(t1_file, capsys):
    code, out, _ = run(["query", "--dataset", t1_file, "--snapshots", "2", "--group", "1",
                        "--l", "0", "--algorithm", "sbg"], capsys)
    rows = read_rows(out)
    assert code == 0 and len(rows) == 1 and rows[0]["edges"] == "" and rows[0]["probes"] == "0"


def test_unknown_vertex_is_usage_error(t1_file, capsys):
    code, _, err = run(["query", "--dataset", t1_file, "--snapshots", "2", "--group", "zzz"], capsys)
    assert code == 1 and "unknown vertex" in err


def test_missing_dataset_is_io_error(tmp_path, capsys):
    code, _, _ = run(["query", "--dataset", str(tmp_path / "nope.txt"), "--group", "1"], capsys)
    assert code == 2


def test_malformed_dataset_is_io_error(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("1 2\n")
    code, _, err = run(["sweep", "--dataset", str(p)], capsys)
    assert code == 2 and "line 1" in err


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--algorithm", "magic"])
    assert exc.value.code == 1


def test_evaluate_t1(t1_file, capsys):
    base = ["evaluate", "--dataset", t1_file, "--snapshots", "2", "--group", "1", "--edges", "2->3"]
    code, out, _ = run(base + ["--exact"], capsys)
    assert code == 0 and "gain=1.000000" in out
    code, out, _ = run(base + ["--eval-trials", "200"], capsys)
    assert code == 0 and "gain=1.000000 stderr=0.000000" in out


def test_evaluate_rejects_present_edge(t1_file, capsys):
    code, _, _ = run(["evaluate", "--dataset", t1_file, "--snapshots", "2", "--group", "1",
                      "--edges", "1->2"], capsys)
    assert code == 1


def test_exact_capacity_exit_code(tmp_path, capsys):
    n = 24
    lines = [f"{i} {(i + 1) % n} 0\n{i} {(i + 2) % n} 0\n" for i in range(n)]
    p = tmp_path / "dense.txt"
    p.write_text("".join(lines))
    code, _, err = run(["evaluate", "--dataset", str(p), "--snapshots", "1", "--group", "0",
                        "--exact"], capsys)
    assert code == 3 and "capacity" in err


def test_predict_writes_snapshot_and_candidates(t1_file, capsys):
    code, out, _ = run(["predict", "--dataset", t1_file, "--snapshots", "2"], capsys)
    assert code == 0 and out == "1 2\n"
    code, out, _ = run(["predict", "--dataset", t1_file, "--snapshots", "2", "--candidates"], capsys)
    assert out == "2 3\n"


def test_gt_file_bypasses_predictor(t1_file, tmp_path, capsys):
    gt = tmp_path / "gt.txt"
    gt.write_text("2 3\n")
    code, out, _ = run(["predict", "--dataset", t1_file, "--snapshots", "2", "--gt-file", str(gt),
                        "--candidates"], capsys)
    assert code == 0 and out == "1 2\n"


def test_theta_bound(capsys):
    code, out, _ = run(["theta-bound", "--vertices", "100", "--l", "5", "--epsilon", "0.1"], capsys)
    assert code == 0 and out.startswith("vertices=100 l=5 epsilon=0.1 theta=")
    code, _, _ = run(["theta-bound", "--vertices", "3", "--l", "5"], capsys)
    assert code == 1


def test_sweep_row_count_and_summary(small_file, capsys):
    code, out, _ = run(["sweep", "--dataset", small_file, "--snapshots", "6", "--queries", "2",
                        "--l", "2", "--group-size", "3", "--theta", "30"], capsys)
    assert code == 0
    assert len(read_rows(out)) == 2 * 3
    assert sum(l.startswith("# summary") for l in out.splitlines()) == 3


def test_sweep_probes_grow_with_l(small_file):
    cfg = SweepConfig(dataset_path=small_file, T=6, theta=30, l_values=[1, 2], group_sizes=[3],
                      num_queries=4)
    rows = run_sweep(cfg, io.StringIO())
    for alg in ("sbg", "ce_sbg", "o_sbg"):
        mean = {l: sum(r.probes for r in rows if r.algorithm == alg and r.l == l) / 4 for l in (1, 2)}
        assert mean[1] <= mean[2]
    assert all(r.est_gain >= 0 for r in rows)


def test_groups_do_not_depend_on_algorithms(small_file):
    cfg = SweepConfig(dataset_path=small_file, T=6, theta=20, l_values=[1], group_sizes=[3],
                      num_queries=3)
    a = run_sweep(cfg, io.StringIO())
    cfg.algorithms = ["o_sbg"]
    b = run_sweep(cfg, io.StringIO())
    assert [r.group for r in a if r.algorithm == "o_sbg"] == [r.group for r in b]


def test_sample_groups_use_active_vertices(small_file):
    pipe = Pipeline.from_config(SweepConfig(dataset_path=small_file, T=6, theta=5))
    active = set((pipe.gt.out_degree() >= 1).nonzero()[0].tolist())
    for g in sample_groups(pipe.gt, 4, 10, seed=2):
        assert set(g) <= active and len(set(g)) == 4


def test_config_file_and_override(small_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"dataset = {small_file}\nsnapshots = 6\nqueries = 1\nl = 1\ngroup_size = 2\n"
                   "theta = 10\nalgorithm = sbg\n")
    code, out, _ = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 0 and [r["algorithm"] for r in read_rows(out)] == ["sbg"]
    code, out, _ = run(["sweep", "--config", str(cfg), "--algorithm", "o-sbg"], capsys)
    assert [r["algorithm"] for r in read_rows(out)] == ["o_sbg"]
    cfg.write_text("bogus = 1\n")
    code, _, _ = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 1


def test_sweep_is_byte_identical_across_runs_and_backends(small_file, tmp_path):
    args = ["sweep", "--dataset", small_file, "--snapshots", "6", "--queries", "3", "--l", "1,2",
            "--group-size", "3", "--theta", "25", "--eval-trials", "50", "--seed", "5"]
    outputs = []
    for i, backend in enumerate(["", "", "python"]):
        out = tmp_path / f"run{i}.csv"
        env = dict(os.environ, RTLR_BACKEND=backend)
        subprocess.run([sys.executable, "-m", "rtlr", *args, "--out", str(out)], env=env, check=True)
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
