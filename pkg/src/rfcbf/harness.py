"""Experiment orchestration behind the ``select``, ``compare`` and ``bench``
subcommands, plus the plain-text table renderer."""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .config import DatasetSpec, ExperimentConfig
from .evaluation import _child_seed, evaluate_pipeline, run_selection
from .io import load_dataset
from .preprocess import RawDataset, discretize, impute_knn, standardize
from .resampled import SelectionParams

log = logging.getLogger(__name__)

BEST_MARK = "*"


@dataclass
class Cell:
    sweep: str
    dataset: str
    method: str
    params: dict
    status: str = "ok"
    error: str | None = None
    mean_accuracy: float | None = None
    accuracy_std: float | None = None
    mean_selected_count: float | None = None
    na_cells: int = 0
    per_run_fold_accuracy: list = field(default_factory=list)
    per_run_fold_selected: list = field(default_factory=list)
    mean_selection_seconds: float | None = None
    winner: bool = False

    def label(self, varying: list[str]) -> str:
        parts = []
        for key in varying:
            if key == "method":
                parts.append(self.method)
            elif key == "sampling_times" and self.method == "rfcbf":
                parts.append(f"T={self.params[key]}")
            elif key == "sampling_probability" and self.method == "rfcbf":
                parts.append(f"G={self.params[key]:g}")
            elif key == "delta":
                parts.append(f"{self.params[key]:g}")
            elif key == "bins":
                parts.append(f"bins={self.params[key]}")
        return " ".join(parts) or self.method


@dataclass
class ComparisonReport:
    experiment: dict
    cells: list

    def to_dict(self, include_timing: bool = False) -> dict:
        cells = []
        for c in self.cells:
            d = asdict(c)
            if not include_timing:
                d.pop("mean_selection_seconds")
            cells.append(d)
        return {"experiment": self.experiment, "cells": cells}

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonReport":
        return cls(d["experiment"], [Cell(**c) for c in d["cells"]])

    @property
    def failed(self) -> list[Cell]:
        return [c for c in self.cells if c.status != "ok"]


def mark_winners(cells: list[Cell]) -> None:
    """Flag the highest mean accuracy per (sweep, dataset); ties share the
    mark and NA cells never win."""
    groups: dict[tuple, list[Cell]] = {}
    for c in cells:
        c.winner = False
        groups.setdefault((c.sweep, c.dataset), []).append(c)
    for group in groups.values():
        scored = [c for c in group if c.mean_accuracy is not None]
        if not scored:
            continue
        best = max(c.mean_accuracy for c in scored)
        for c in scored:
            c.winner = c.mean_accuracy == best


def prepare_full(raw: RawDataset, bins: int, impute_neighbors: int):
    if raw.has_missing():
        raw = impute_knn(raw, max(1, min(impute_neighbors, raw.n_rows - 1)))
    z, _ = standardize(raw)
    return discretize(z, bins)


def _load(spec: DatasetSpec) -> RawDataset:
    return load_dataset(spec.path, spec.class_column, spec.missing_token)


def _try_load(spec: DatasetSpec):
    try:
        return _load(spec), None
    except Exception as exc:  # one bad dataset must not sink the run
        log.error("failed to load %s: %s", spec.name, exc)
        return None, f"{type(exc).__name__}: {exc}"


def run_compare(config: ExperimentConfig) -> ComparisonReport:
    cells = []
    cache: dict[str, tuple] = {}
    for sweep in config.sweeps:
        for spec in config.datasets_for(sweep):
            if spec.name not in cache:
                cache[spec.name] = _try_load(spec)
            raw, load_error = cache[spec.name]
            for method, params in sweep.cells(config.seed):
                cell = Cell(sweep.name, spec.name, method, asdict(params))
                if raw is None:
                    cell.status, cell.error = "failed", load_error
                    cells.append(cell)
                    continue
                log.info("%s / %s / %s %s", sweep.name, spec.name, method, cell.params)
                try:
                    rep = evaluate_pipeline(raw, method, params, config.repeats, config.folds,
                                            config.k, config.impute_neighbors, config.workers)
                except Exception as exc:
                    log.error("cell failed: %s", exc)
                    cell.status, cell.error = "failed", f"{type(exc).__name__}: {exc}"
                else:
                    cell.mean_accuracy = rep.mean_accuracy
                    cell.accuracy_std = rep.accuracy_std
                    cell.mean_selected_count = rep.mean_selected_count
                    cell.na_cells = rep.na_cells
                    cell.per_run_fold_accuracy = rep.per_run_fold_accuracy
                    cell.per_run_fold_selected = rep.per_run_fold_selected
                    cell.mean_selection_seconds = rep.mean_selection_seconds
                cells.append(cell)
    mark_winners(cells)
    experiment = dict(seed=config.seed, repeats=config.repeats, folds=config.folds, k=config.k,
                      impute_neighbors=config.impute_neighbors)
    return ComparisonReport(experiment, cells)


def run_select(config: ExperimentConfig) -> dict:
    """Run every configured (method, params) once per full dataset."""
    results = []
    failed = False
    for sweep in config.sweeps:
        for spec in config.datasets_for(sweep):
            for method, params in sweep.cells(config.seed):
                entry = dict(sweep=sweep.name, dataset=spec.name, method=method,
                             params=asdict(params))
                try:
                    raw = _load(spec)
                    result = run_selection(method, prepare_full(raw, params.bins,
                                                                config.impute_neighbors), params)
                except Exception as exc:
                    failed = True
                    entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
                else:
                    entry.update(
                        status="ok",
                        selected=list(result.selected),
                        feature_names=[raw.feature_names[i] for i in result.selected],
                        scores=list(result.scores),
                        elapsed_seconds=result.elapsed_seconds,
                    )
                results.append(entry)
    return {"failed": failed, "selections": results}


def bench_selection(raw: RawDataset, method: str, params: SelectionParams, repeats: int,
                    impute_neighbors: int = 5) -> list[float]:
    """Selection wall-clock seconds for ``repeats`` runs on the full dataset;
    preprocessing is excluded from the timing."""
    data = prepare_full(raw, params.bins, impute_neighbors)
    times = []
    for r in range(repeats):
        p = SelectionParams(params.delta, params.sampling_times, params.sampling_probability,
                            _child_seed(params.seed, 2, r), params.bins)
        start = time.perf_counter()
        run_selection(method, data, p)
        times.append(time.perf_counter() - start)
    return times


def run_bench(config: ExperimentConfig, datasets: dict | None = None) -> dict:
    """Mean selection runtime per (dataset, method, params).

    ``datasets`` maps names to already-loaded :class:`RawDataset` objects and
    replaces the configured files when given.
    """
    rows = []
    failed = False
    sources = datasets or {s.name: s for s in config.datasets}
    for sweep in config.sweeps:
        names = sweep.datasets or tuple(sources)
        for name in names:
            source = sources[name]
            for method, params in sweep.cells(config.seed):
                row = dict(sweep=sweep.name, dataset=name, method=method, params=asdict(params))
                try:
                    raw = source if isinstance(source, RawDataset) else _load(source)
                    times = bench_selection(raw, method, params, config.repeats,
                                            config.impute_neighbors)
                except Exception as exc:
                    failed = True
                    row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
                else:
                    row.update(status="ok", mean_seconds=math.fsum(times) / len(times),
                               seconds=times)
                rows.append(row)
    return {"failed": failed, "runs": rows}


# --------------------------------------------------------------------------
# Tables
# --------------------------------------------------------------------------

_PARAM_KEYS = ("delta", "sampling_times", "sampling_probability", "bins")


def _varying(cells: list[Cell]) -> list[str]:
    keys = []
    if len({c.method for c in cells}) > 1:
        keys.append("method")
    for key in _PARAM_KEYS:
        relevant = [c for c in cells if c.method == "rfcbf" or key in ("delta", "bins")]
        if len({c.params[key] for c in relevant}) > 1:
            keys.append(key)
    return keys


def _render(title: str, header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    fmt = lambda r: "  ".join(v.ljust(w) if i == 0 else v.rjust(w)  # noqa: E731
                              for i, (v, w) in enumerate(zip(r, widths)))
    rule = "-" * len(fmt(header))
    return "\n".join([title, rule, fmt(header), rule] + [fmt(r) for r in rows] + [rule])


def _cell_text(c: Cell | None, what: str) -> str:
    if c is None:
        return ""
    if c.status != "ok":
        return "ERR"
    if what == "accuracy":
        if c.mean_accuracy is None:
            return "NA"
        return f"{100 * c.mean_accuracy:.2f}" + (BEST_MARK if c.winner else "")
    if what == "features":
        return "NA" if c.mean_accuracy is None else f"{c.mean_selected_count:.1f}"
    if c.mean_selection_seconds is None:
        return "NA"
    return f"{c.mean_selection_seconds:.4f}"


def render_tables(report: ComparisonReport, include_timing: bool = True) -> str:
    """Per sweep: accuracy grid (best per dataset marked with '*', plus a
    Winners row), selected-feature grid and selection-runtime grid."""
    blocks = []
    sweeps = list(dict.fromkeys(c.sweep for c in report.cells))
    for sweep in sweeps:
        cells = [c for c in report.cells if c.sweep == sweep]
        varying = _varying(cells)
        columns = list(dict.fromkeys(c.label(varying) for c in cells))
        datasets = list(dict.fromkeys(c.dataset for c in cells))
        lookup = {(c.dataset, c.label(varying)): c for c in cells}
        kinds = [("accuracy", "mean accuracy (%)"), ("features", "mean selected features")]
        if include_timing:
            kinds.append(("runtime", "mean selection runtime (s)"))
        for what, title in kinds:
            rows = [[d] + [_cell_text(lookup.get((d, col)), what) for col in columns]
                    for d in datasets]
            if what == "accuracy":
                wins = [sum(1 for d in datasets
                            if lookup.get((d, col)) is not None and lookup[(d, col)].winner)
                        for col in columns]
                rows.append(["Winners"] + [str(w) for w in wins])
            blocks.append(_render(f"[{sweep}] {title}", ["dataset"] + columns, rows))
    return "\n\n".join(blocks) + "\n"


def render_bench(bench: dict) -> str:
    rows = []
    for r in bench["runs"]:
        p = r["params"]
        label = r["method"] if r["method"] == "fcbf" else (
            f"rfcbf T={p['sampling_times']} G={p['sampling_probability']:g}")
        value = f"{r['mean_seconds']:.4f}" if r["status"] == "ok" else "ERR"
        rows.append([r["dataset"], label, f"{p['delta']:g}", value])
    return _render("mean selection runtime (s)", ["dataset", "method", "delta", "seconds"],
                   rows) + "\n"


def write_outputs(out: Path, name: str, payload: str, tables: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(payload)
    (out / "tables.txt").write_text(tables)
