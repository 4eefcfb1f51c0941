import json
import math
from pathlib import Path

import numpy as np
import pytest

from rfcbf.cli import main
from rfcbf.config import ConfigError, load_config, parse_config, with_overrides
from rfcbf.harness import (
    Cell,
    ComparisonReport,
    mark_winners,
    render_tables,
    run_bench,
    run_compare,
    run_select,
)
from rfcbf.io import DatasetFormatError, load_dataset
from rfcbf.resampled import SelectionParams


def write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


class TestLoadDataset:
    def test_basic(self, tmp_path):
        d = load_dataset(write(tmp_path / "a.csv", "a,b,class\n1,2,x\n3,?,y\n5,6,x"))
        assert d.features.shape == (3, 2)
        assert np.isnan(d.features).sum() == 1 and np.isnan(d.features[1, 1])
        assert d.labels.tolist() == [0, 1, 0]
        assert d.feature_names == ("a", "b") and d.class_names == ("x", "y")

    def test_trailing_newline(self, tmp_path):
        a = load_dataset(write(tmp_path / "a.csv", "a,b,class\n1,2,x\n3,?,y\n5,6,x"))
        b = load_dataset(write(tmp_path / "b.csv", "a,b,class\n1,2,x\n3,?,y\n5,6,x\n\n"))
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_class_first(self, tmp_path):
        last = load_dataset(write(tmp_path / "a.csv", "a,b,class\n1,2,x\n3,4,y\n5,6,x"))
        first = load_dataset(write(tmp_path / "b.csv", "class,a,b\nx,1,2\ny,3,4\nx,5,6"), "first")
        named = load_dataset(write(tmp_path / "c.csv", "a,class,b\n1,x,2\n3,y,4\n5,x,6"), "class")
        for d in (first, named):
            np.testing.assert_array_equal(d.features, last.features)
            np.testing.assert_array_equal(d.labels, last.labels)
            assert d.feature_names == ("a", "b")

    @pytest.mark.parametrize("delim", [";", "\t"])
    def test_delimiters(self, tmp_path, delim):
        text = delim.join(["a", "b", "class"]) + "\n" + delim.join(["1.5", "2", "p"]) + "\n"
        d = load_dataset(write(tmp_path / "a.txt", text))
        assert d.features.tolist() == [[1.5, 2.0]]

    def test_bad_cell_location(self, tmp_path):
        with pytest.raises(DatasetFormatError, match=r":3: column 'b'.*'oops'"):
            load_dataset(write(tmp_path / "a.csv", "a,b,class\n1,2,x\n3,oops,y\n"))

    def test_missing_header(self, tmp_path):
        with pytest.raises(DatasetFormatError, match="header"):
            load_dataset(write(tmp_path / "a.csv", "1,2,3\n4,5,6\n"))

    def test_empty(self, tmp_path):
        with pytest.raises(DatasetFormatError, match="empty"):
            load_dataset(write(tmp_path / "a.csv", "\n"))

    def test_ragged_row(self, tmp_path):
        with pytest.raises(DatasetFormatError):
            load_dataset(write(tmp_path / "a.csv", "a,b,class\n1,2\n"))


def synthetic_csv(path: Path, m=120, seed=0, weak=False):
    r = np.random.default_rng(seed)
    y = np.arange(m) % 2
    if weak:
        # signal so faint that higher thresholds leave nothing selected
        f = np.column_stack([r.normal(size=m) + 0.25 * y, r.normal(size=m), r.normal(size=m)])
    else:
        f = np.column_stack([r.normal(size=m) + 3 * y, r.normal(size=m), r.normal(size=m) - 2 * y])
    lines = ["f1,f2,f3,class"] + [
        ",".join(f"{v:.6f}" for v in row) + ("," + ("pos" if c else "neg")) for row, c in zip(f, y)]
    path.write_text("\n".join(lines) + "\n")
    return path


CONFIG = """
[experiment]
seed = 3
repeats = 2
folds = 3
out = out

[dataset:easy]
path = easy.csv

[dataset:weak]
path = weak.csv
class_column = last

[sweep:threshold]
methods = rfcbf
delta = 0.01, 0.02, 0.03, 0.04
times = 4

[sweep:versus]
methods = fcbf, rfcbf
times = 4
datasets = easy
"""


@pytest.fixture
def workspace(tmp_path):
    synthetic_csv(tmp_path / "easy.csv")
    synthetic_csv(tmp_path / "weak.csv", m=600, seed=1, weak=True)
    write(tmp_path / "exp.ini", CONFIG)
    return tmp_path


class TestConfig:
    def test_parse(self, workspace):
        cfg = load_config(workspace / "exp.ini")
        assert cfg.seed == 3 and cfg.repeats == 2 and cfg.folds == 3
        assert [d.name for d in cfg.datasets] == ["easy", "weak"]
        assert cfg.datasets[0].path == workspace / "easy.csv"
        assert cfg.sweeps[0].deltas == (0.01, 0.02, 0.03, 0.04)
        assert [d.name for d in cfg.datasets_for(cfg.sweeps[1])] == ["easy"]
        assert cfg.out == workspace / "out"

    def test_fcbf_cells_ignore_sampling_grid(self):
        cfg = parse_config("[dataset:a]\npath=a.csv\n[sweep:s]\nmethods=fcbf,rfcbf\ntimes=5,10\n")
        cells = cfg.sweeps[0].cells(0)
        assert [m for m, _ in cells] == ["fcbf", "rfcbf", "rfcbf"]

    def test_overrides(self, workspace):
        cfg = with_overrides(load_config(workspace / "exp.ini"), delta=[0.05], times=[7],
                             seed=9, workers=2)
        assert all(s.deltas == (0.05,) and s.times == (7,) for s in cfg.sweeps)
        assert cfg.seed == 9 and cfg.workers == 2

    @pytest.mark.parametrize("text", [
        "[sweep:s]\nmethods=fcbf\n",
        "[dataset:a]\npath=a.csv\n[sweep:s]\nmethods=relief\n",
        "[dataset:a]\n",
        "[dataset:a]\npath=a.csv\n[sweep:s]\ndelta=\n",
        "[dataset:a]\npath=a.csv\n[other]\n",
    ])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)


class TestCompare:
    def test_tables_and_na(self, workspace):
        report = run_compare(load_config(workspace / "exp.ini"))
        assert not report.failed
        weak = {c.params["delta"]: c for c in report.cells
                if c.sweep == "threshold" and c.dataset == "weak"}
        assert weak[0.04].mean_accuracy is None and weak[0.04].na_cells == 6
        assert not weak[0.04].winner
        tables = render_tables(report)
        assert "[threshold] mean accuracy (%)" in tables
        assert "[versus] mean selected features" in tables
        weak_row = next(line for line in tables.splitlines()
                        if line.startswith("weak") and "NA" in line)
        assert weak_row.split()[-1] == "NA"
        assert "Winners" in tables

    def test_round_trip(self, workspace):
        report = run_compare(load_config(workspace / "exp.ini"))
        again = ComparisonReport.from_dict(json.loads(report.to_json(include_timing=True)))
        assert again.to_json(include_timing=True) == report.to_json(include_timing=True)
        assert again.to_json() == report.to_json()

    def test_partial_failure(self, workspace):
        text = CONFIG + "\n[dataset:broken]\npath = missing.csv\n"
        cfg = parse_config(text, workspace)
        report = run_compare(cfg)
        broken = [c for c in report.cells if c.dataset == "broken"]
        assert broken and all(c.status == "failed" for c in broken)
        assert all(c.status == "ok" for c in report.cells if c.dataset != "broken")


class TestWinners:
    def test_ties_share_and_na_never_wins(self):
        cells = [Cell("s", "d", "fcbf", {}, mean_accuracy=0.8),
                 Cell("s", "d", "rfcbf", {}, mean_accuracy=0.8),
                 Cell("s", "d", "rfcbf", {}, mean_accuracy=None),
                 Cell("s", "e", "rfcbf", {}, mean_accuracy=None)]
        mark_winners(cells)
        assert [c.winner for c in cells] == [True, True, False, False]


class TestCli:
    def test_compare_byte_identical(self, workspace):
        args = ["compare", "--config", str(workspace / "exp.ini")]
        assert main(args + ["--out", str(workspace / "r1")]) == 0
        assert main(args + ["--out", str(workspace / "r2")]) == 0
        a = (workspace / "r1" / "report.json").read_bytes()
        assert a == (workspace / "r2" / "report.json").read_bytes()
        assert (workspace / "r1" / "tables.txt").exists()
        assert (workspace / "r1" / "timing.json").exists()

    def test_exit_status_on_failure(self, workspace):
        write(workspace / "bad.ini", CONFIG + "\n[dataset:broken]\npath = nope.csv\n")
        assert main(["compare", "--config", str(workspace / "bad.ini"), "--repeats", "1"]) == 1
        report = json.loads((workspace / "out" / "report.json").read_text())
        assert any(c["status"] == "ok" for c in report["cells"])

    def test_select(self, workspace):
        assert main(["select", "--config", str(workspace / "exp.ini"), "--delta", "0.01",
                     "--out", str(workspace / "sel")]) == 0
        out = json.loads((workspace / "sel" / "select.json").read_text())
        easy = [s for s in out["selections"] if s["dataset"] == "easy"]
        assert easy and all(s["status"] == "ok" for s in easy)
        assert all(set(s["feature_names"]) <= {"f1", "f2", "f3"} for s in easy)
        assert all(len(s["scores"]) == len(s["selected"]) for s in easy)

    def test_bench(self, workspace):
        assert main(["bench", "--config", str(workspace / "exp.ini"), "--delta", "0.01",
                     "--repeats", "2", "--out", str(workspace / "b")]) == 0
        out = json.loads((workspace / "b" / "bench.json").read_text())
        assert all(r["status"] == "ok" and r["mean_seconds"] > 0 for r in out["runs"])
        assert "mean selection runtime" in (workspace / "b" / "tables.txt").read_text()

    def test_bad_config(self, tmp_path, capsys):
        assert main(["compare", "--config", str(tmp_path / "none.ini")]) == 2


def test_run_bench_in_memory():
    from conftest import gaussian_raw
    cfg = parse_config("[experiment]\nrepeats=2\n[dataset:x]\npath=x.csv\n"
                       "[sweep:s]\nmethods=rfcbf\ntimes=2,4\n")
    out = run_bench(cfg, datasets={"x": gaussian_raw(m=80)})
    assert [r["params"]["sampling_times"] for r in out["runs"]] == [2, 4]
    assert all(len(r["seconds"]) == 2 and math.isfinite(r["mean_seconds"]) for r in out["runs"])


def test_run_select_records_failure(tmp_path):
    cfg = parse_config("[dataset:x]\npath=nope.csv\n", tmp_path)
    out = run_select(cfg)
    assert out["failed"] and out["selections"][0]["status"] == "failed"
    assert SelectionParams(**out["selections"][0]["params"]).delta == 0.01
