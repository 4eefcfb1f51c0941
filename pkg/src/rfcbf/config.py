"""Experiment configuration: an INI file with one ``[dataset:NAME]`` section
per dataset, one ``[sweep:NAME]`` section per parameter grid and an optional
``[experiment]`` section.

    [experiment]
    seed = 0
    repeats = 10
    folds = 10
    workers = 4
    out = results

    [dataset:wdbc]
    path = data/wdbc.csv
    class_column = last
    missing_token = ?

    [sweep:threshold]
    methods = rfcbf
    delta = 0.01, 0.02, 0.03, 0.04
    times = 20
    prob = 0.5

Relative dataset paths resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path

from .evaluation import DEFAULT_FOLDS, DEFAULT_K, DEFAULT_REPEATS, METHODS
from .preprocess import DEFAULT_BINS, DEFAULT_IMPUTE_NEIGHBORS
from .resampled import SelectionParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    path: Path
    class_column: str = "last"
    missing_token: str = "?"


@dataclass(frozen=True)
class Sweep:
    name: str
    methods: tuple = ("rfcbf",)
    deltas: tuple = (0.01,)
    times: tuple = (20,)
    probs: tuple = (0.5,)
    bins: tuple = (DEFAULT_BINS,)
    datasets: tuple = ()  # empty means every dataset

    def cells(self, seed: int) -> list[tuple[str, SelectionParams]]:
        """(method, params) for every grid point; FCBF ignores T and G so it
        gets one cell per (delta, bins)."""
        out = []
        for method in self.methods:
            if method == "fcbf":
                grid = itertools.product(self.deltas, self.times[:1], self.probs[:1], self.bins)
            else:
                grid = itertools.product(self.deltas, self.times, self.probs, self.bins)
            for delta, T, G, b in grid:
                out.append((method, SelectionParams(delta, T, G, seed, b)))
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    sweeps: tuple
    seed: int = 0
    repeats: int = DEFAULT_REPEATS
    folds: int = DEFAULT_FOLDS
    k: int = DEFAULT_K
    impute_neighbors: int = DEFAULT_IMPUTE_NEIGHBORS
    workers: int = 1
    out: Path = field(default=Path("results"))

    def datasets_for(self, sweep: Sweep) -> list[DatasetSpec]:
        if not sweep.datasets:
            return list(self.datasets)
        by_name = {d.name: d for d in self.datasets}
        missing = [n for n in sweep.datasets if n not in by_name]
        if missing:
            raise ConfigError(f"sweep {sweep.name!r} names unknown datasets {missing}")
        return [by_name[n] for n in sweep.datasets]

    def check_paths(self) -> list[str]:
        return [f"{d.name}: {d.path} does not exist" for d in self.datasets if not d.path.exists()]


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def _names(text: str) -> tuple:
    return tuple(v.strip() for v in text.replace(";", ",").split(",") if v.strip())


def parse_config(text: str, base_dir: Path = Path(".")) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.read_string(text)
    datasets, sweeps = [], []
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    for section in parser.sections():
        body = parser[section]
        if section.startswith("dataset:"):
            if "path" not in body:
                raise ConfigError(f"[{section}] needs a path")
            path = Path(body["path"])
            datasets.append(DatasetSpec(
                name=section.split(":", 1)[1].strip(),
                path=path if path.is_absolute() else base_dir / path,
                class_column=body.get("class_column", "last"),
                missing_token=body.get("missing_token", "?"),
            ))
        elif section.startswith("sweep:"):
            methods = _names(body.get("methods", body.get("method", "rfcbf")))
            bad = [m for m in methods if m not in METHODS]
            if bad:
                raise ConfigError(f"[{section}] unknown methods {bad}")
            sweep = Sweep(
                name=section.split(":", 1)[1].strip(),
                methods=methods,
                deltas=_floats(body.get("delta", "0.01")),
                times=_ints(body.get("times", "20")),
                probs=_floats(body.get("prob", "0.5")),
                bins=_ints(body.get("bins", str(DEFAULT_BINS))),
                datasets=_names(body.get("datasets", "")),
            )
            if not all([sweep.methods, sweep.deltas, sweep.times, sweep.probs, sweep.bins]):
                raise ConfigError(f"[{section}] has an empty grid")
            sweeps.append(sweep)
        elif section != "experiment":
            raise ConfigError(f"unknown section [{section}]")
    if not datasets:
        raise ConfigError("config defines no [dataset:...] sections")
    if not sweeps:
        sweeps.append(Sweep("default"))
    out = Path(exp.get("out", "results"))
    return ExperimentConfig(
        datasets=tuple(datasets),
        sweeps=tuple(sweeps),
        seed=int(exp.get("seed", 0)),
        repeats=int(exp.get("repeats", DEFAULT_REPEATS)),
        folds=int(exp.get("folds", DEFAULT_FOLDS)),
        k=int(exp.get("k", DEFAULT_K)),
        impute_neighbors=int(exp.get("impute_neighbors", DEFAULT_IMPUTE_NEIGHBORS)),
        workers=int(exp.get("workers", 1)),
        out=out if out.is_absolute() else base_dir / out,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent)


def with_overrides(config: ExperimentConfig, *, delta=None, times=None, prob=None, bins=None,
                   seed=None, folds=None, repeats=None, workers=None, out=None) -> ExperimentConfig:
    """Command-line overrides; grid overrides replace that axis in every sweep."""
    sweep_changes = {}
    if delta is not None:
        sweep_changes["deltas"] = tuple(delta)
    if times is not None:
        sweep_changes["times"] = tuple(times)
    if prob is not None:
        sweep_changes["probs"] = tuple(prob)
    if bins is not None:
        sweep_changes["bins"] = tuple(bins)
    sweeps = tuple(replace(s, **sweep_changes) for s in config.sweeps)
    changes = {k: v for k, v in dict(seed=seed, folds=folds, repeats=repeats,
                                     workers=workers).items() if v is not None}
    if out is not None:
        changes["out"] = Path(out)
    return replace(config, sweeps=sweeps, **changes)
