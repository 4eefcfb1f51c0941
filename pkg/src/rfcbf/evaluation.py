"""KNN classification, stratified k-fold cross-validation and the end-to-end
evaluation of a feature selector.

Every preprocessing statistic and every selection decision is computed from
the training fold only; test folds are transformed with those statistics.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .fcbf import SelectionResult, fcbf
from .preprocess import (
    DEFAULT_IMPUTE_NEIGHBORS,
    EqualWidthBinner,
    RawDataset,
    Standardizer,
    impute_knn,
)
from .resampled import SelectionParams, rfcbf

DEFAULT_K = 5
DEFAULT_FOLDS = 10
DEFAULT_REPEATS = 10
METHODS = ("fcbf", "rfcbf")


class NoFeaturesError(ValueError):
    """Raised when a classifier is asked to work on zero features."""


# --------------------------------------------------------------------------
# KNN
# --------------------------------------------------------------------------

def _squared_distances(train, test):
    return ((test[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)


def knn_predict(train_rows, train_labels, test_rows, k: int = DEFAULT_K,
                chunk: int = 256) -> np.ndarray:
    """Majority vote among the k Euclidean-nearest training rows.

    Distance ties go to the lower training row index. Vote ties go to the
    class of the nearest neighbour among the tied classes.
    """
    train = np.asarray(train_rows, dtype=np.float64)
    test = np.asarray(test_rows, dtype=np.float64)
    y = np.asarray(train_labels)
    if train.ndim != 2 or train.shape[1] == 0:
        raise NoFeaturesError("knn_predict needs at least one feature")
    if test.shape[1] != train.shape[1]:
        raise ValueError("train and test rows must have the same features")
    if not 1 <= k <= train.shape[0]:
        raise ValueError(f"k must be in [1, {train.shape[0]}], got {k}")

    preds = np.empty(test.shape[0], dtype=y.dtype)
    n_classes = int(y.max()) + 1
    for lo in range(0, test.shape[0], chunk):
        d = _squared_distances(train, test[lo:lo + chunk])
        nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
        for i, idx in enumerate(nearest):
            votes = y[idx]
            counts = np.bincount(votes, minlength=n_classes)
            tied = counts == counts.max()
            preds[lo + i] = votes[tied[votes]][0]
    return preds


# --------------------------------------------------------------------------
# Accuracy
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionCounts:
    """Rows are actual classes, columns predicted classes."""

    matrix: np.ndarray

    @classmethod
    def binary(cls, tp: int, fp: int, fn: int, tn: int) -> "ConfusionCounts":
        # class 1 = positive
        return cls(np.array([[tn, fp], [fn, tp]]))

    @classmethod
    def from_predictions(cls, actual, predicted, class_count: int) -> "ConfusionCounts":
        m = np.zeros((class_count, class_count), dtype=np.int64)
        np.add.at(m, (np.asarray(actual), np.asarray(predicted)), 1)
        return cls(m)

    @property
    def total(self) -> int:
        return int(self.matrix.sum())


def accuracy(conf: ConfusionCounts) -> float:
    """(TP + TN) / total; the trace over the total for multi-class."""
    if conf.total <= 0:
        raise ZeroDivisionError("accuracy is undefined for an empty confusion matrix")
    return float(np.trace(conf.matrix)) / conf.total


# --------------------------------------------------------------------------
# Folds
# --------------------------------------------------------------------------

def stratified_kfold(labels, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id for each row.

    Rows of each class are shuffled and the class blocks are dealt round-robin
    onto the folds, so per-class counts and total fold sizes each differ by
    at most one between folds.
    """
    labels = np.asarray(labels)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > labels.shape[0]:
        raise ValueError(f"cannot split {labels.shape[0]} rows into {folds} folds")
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == c))
                            for c in np.unique(labels)])
    assignment = np.empty(labels.shape[0], dtype=np.intp)
    assignment[order] = np.arange(order.shape[0]) % folds
    return assignment


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

def _child_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def run_selection(method: str, data, params: SelectionParams) -> SelectionResult:
    if method == "fcbf":
        return fcbf(data, params.delta)
    if method == "rfcbf":
        return rfcbf(data, params)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def prepare_fold(train: RawDataset, test: RawDataset, bins: int,
                 impute_neighbors: int = DEFAULT_IMPUTE_NEIGHBORS):
    """Impute, standardize and discretize with training-fold statistics.

    Returns (standardized train, standardized test, discretized train).
    """
    if train.has_missing() or test.has_missing():
        n = max(1, min(impute_neighbors, train.n_rows - 1))
        train = impute_knn(train, n)
        test = impute_knn(test, n, reference=train)
    scaler = Standardizer.fit(train)
    z_train, z_test = scaler.apply(train), scaler.apply(test)
    disc = EqualWidthBinner.fit(z_train, bins).apply(z_train)
    return z_train, z_test, disc


@dataclass(frozen=True)
class FoldOutcome:
    accuracy: float | None
    selected: tuple
    seconds: float


def evaluate_fold(raw: RawDataset, train_idx, test_idx, method: str,
                  params: SelectionParams, k: int = DEFAULT_K,
                  impute_neighbors: int = DEFAULT_IMPUTE_NEIGHBORS) -> FoldOutcome:
    train, test = raw.take(train_idx), raw.take(test_idx)
    z_train, z_test, disc = prepare_fold(train, test, params.bins, impute_neighbors)
    result = run_selection(method, disc, params)
    if result.is_empty:
        return FoldOutcome(None, (), result.elapsed_seconds)
    cols = list(result.selected)
    pred = knn_predict(z_train.features[:, cols], train.labels, z_test.features[:, cols],
                       min(k, train.n_rows))
    conf = ConfusionCounts.from_predictions(test.labels, pred, raw.class_count)
    return FoldOutcome(accuracy(conf), tuple(int(i) for i in cols), result.elapsed_seconds)


def _fold_task(args):
    return evaluate_fold(*args)


@dataclass
class CvReport:
    method_name: str
    params: dict
    per_run_fold_accuracy: list
    per_run_fold_selected: list
    per_run_fold_seconds: list = field(default_factory=list)
    mean_accuracy: float | None = None
    accuracy_std: float | None = None
    mean_selected_count: float = 0.0
    na_cells: int = 0
    mean_selection_seconds: float = 0.0

    @property
    def all_na(self) -> bool:
        return self.mean_accuracy is None

    def populated(self) -> list[float]:
        return [a for row in self.per_run_fold_accuracy for a in row if a is not None]

    def to_dict(self, include_timing: bool = True) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("per_run_fold_seconds")
            d.pop("mean_selection_seconds")
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CvReport":
        return cls(**d)

    @classmethod
    def assemble(cls, method: str, params: SelectionParams, grid) -> "CvReport":
        acc = [[o.accuracy for o in row] for row in grid]
        sel = [[len(o.selected) for o in row] for row in grid]
        secs = [[o.seconds for o in row] for row in grid]
        values = [a for row in acc for a in row if a is not None]
        counts = [c for row in sel for c in row]
        times = [t for row in secs for t in row]
        mean = math.fsum(values) / len(values) if values else None
        std = (math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))
               if values else None)
        return cls(
            method_name=method,
            params=asdict(params),
            per_run_fold_accuracy=acc,
            per_run_fold_selected=sel,
            per_run_fold_seconds=secs,
            mean_accuracy=mean,
            accuracy_std=std,
            mean_selected_count=math.fsum(counts) / len(counts),
            na_cells=len(counts) - len(values),
            mean_selection_seconds=math.fsum(times) / len(times),
        )


def fold_plan(labels, folds: int, repeats: int, seed: int) -> list[np.ndarray]:
    """One fold assignment per repeat, each a function of (labels, seed, repeat)."""
    return [stratified_kfold(labels, folds, np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, r))))
            for r in range(repeats)]


def evaluate_pipeline(raw: RawDataset, method: str, params: SelectionParams,
                      repeats: int = DEFAULT_REPEATS, folds: int = DEFAULT_FOLDS,
                      k: int = DEFAULT_K, impute_neighbors: int = DEFAULT_IMPUTE_NEIGHBORS,
                      workers: int = 1) -> CvReport:
    """Repeated stratified k-fold evaluation of ``method`` with KNN.

    Folds whose selection comes back empty are NA cells: they are excluded
    from the accuracy mean and counted in ``na_cells``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    plan = fold_plan(raw.labels, folds, repeats, params.seed)
    tasks = []
    for r, assignment in enumerate(plan):
        for f in range(folds):
            cell_params = SelectionParams(params.delta, params.sampling_times,
                                          params.sampling_probability,
                                          _child_seed(params.seed, 1, r, f), params.bins)
            tasks.append((raw, np.flatnonzero(assignment != f), np.flatnonzero(assignment == f),
                          method, cell_params, k, impute_neighbors))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_fold_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_fold_task(t) for t in tasks]
    grid = [outcomes[r * folds:(r + 1) * folds] for r in range(repeats)]
    return CvReport.assemble(method, params, grid)
