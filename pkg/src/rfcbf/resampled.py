"""Resampled FCBF: every SU estimate is the mean SU over T Bernoulli row
subsamples, each row kept with probability G.

Random draws are keyed by (seed, pass, pair, iteration) through
``numpy.random.SeedSequence`` spawn keys, so a result depends only on the
data and the parameters, never on evaluation order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .fcbf import RankedList, SelectionResult, eliminate_redundant
from .info_theory import su_from_tables
from .preprocess import DEFAULT_BINS, DiscreteDataset

MAX_REDRAWS = 100

_RELEVANCE_PASS = 0
_PAIR_PASS = 1


@dataclass(frozen=True)
class SelectionParams:
    delta: float = 0.01
    sampling_times: int = 20
    sampling_probability: float = 0.5
    seed: int = 0
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        if self.sampling_times < 1:
            raise ValueError("sampling_times must be >= 1")
        if not 0.0 < self.sampling_probability <= 1.0:
            raise ValueError("sampling_probability must be in (0, 1]")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class Subsample:
    row_indices: np.ndarray
    source: DiscreteDataset

    def __len__(self):
        return self.row_indices.shape[0]


def _usable(mask: np.ndarray, labels: np.ndarray) -> bool:
    if mask.sum() < 2:
        return False
    chosen = labels[mask]
    return bool((chosen != chosen[0]).any())


def resample(data: DiscreteDataset, G: float, rng: np.random.Generator) -> Subsample:
    """Keep each row independently with probability ``G``.

    Draws with fewer than two rows or a single class are redrawn, up to
    ``MAX_REDRAWS`` times, after which the full dataset is used.
    """
    if not 0.0 < G <= 1.0:
        raise ValueError("G must be in (0, 1]")
    labels = data.class_column.codes
    for _ in range(MAX_REDRAWS + 1):
        mask = rng.random(data.n_rows) < G
        if _usable(mask, labels):
            return Subsample(np.flatnonzero(mask), data)
    return Subsample(np.arange(data.n_rows), data)


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def draw_masks(labels: np.ndarray, params: SelectionParams, *key: int) -> np.ndarray:
    """T x M inclusion masks for the stream identified by ``key``.

    Iteration m's first draw is row m of one block draw; a degenerate draw is
    replaced from its own (key, m, attempt) stream.
    """
    T, G = params.sampling_times, params.sampling_probability
    masks = _stream(params.seed, *key).random((T, labels.shape[0])) < G
    if G == 1.0:
        return masks
    for m in range(T):
        attempt = 0
        while not _usable(masks[m], labels):
            attempt += 1
            if attempt > MAX_REDRAWS:
                masks[m] = True
                break
            masks[m] = _stream(params.seed, *key, m, attempt).random(labels.shape[0]) < G
    return masks


def subsample_su(a_codes, a_card, b_codes, b_card, masks: np.ndarray) -> np.ndarray:
    """SU of (a, b) on each masked subsample; one value per mask row."""
    T = masks.shape[0]
    t_idx, rows = np.nonzero(masks)
    cells = a_card * b_card
    flat = np.bincount(t_idx * cells + a_codes[rows] * b_card + b_codes[rows],
                       minlength=T * cells)
    return su_from_tables(flat.reshape(T, a_card, b_card))


def _mean(values: np.ndarray) -> float:
    total = 0.0
    for v in values:
        total += float(v)
    return total / values.shape[0]


def _column(data: DiscreteDataset, index):
    c = data.class_column if index is None else data.columns[index]
    return c.codes, c.cardinality


def averaged_su(data: DiscreteDataset, x_index: int, y_index: int | None,
                params: SelectionParams, rng: np.random.Generator | None = None) -> float:
    """Mean SU of column ``x_index`` against ``y_index`` (the class when None)
    over T subsamples.

    With ``rng`` the subsamples come from successive ``resample`` calls on
    it; otherwise from the keyed stream used by :func:`rfcbf` for this pair.
    """
    labels = data.class_column.codes
    if rng is None:
        key = (_RELEVANCE_PASS,) if y_index is None else (_PAIR_PASS, x_index, y_index)
        masks = draw_masks(labels, params, *key)
    else:
        masks = np.zeros((params.sampling_times, data.n_rows), dtype=bool)
        for m in range(params.sampling_times):
            masks[m, resample(data, params.sampling_probability, rng).row_indices] = True
    return _mean(subsample_su(*_column(data, x_index), *_column(data, y_index), masks))


def averaged_su_to_class(data: DiscreteDataset, params: SelectionParams) -> np.ndarray:
    """Averaged SU of every feature against the class on one shared set of
    T subsamples."""
    labels = data.class_column.codes
    masks = draw_masks(labels, params, _RELEVANCE_PASS)
    k = data.class_column.cardinality
    return np.array([
        _mean(subsample_su(col.codes, col.cardinality, labels, k, masks))
        for col in data.columns
    ])


def rfcbf(data: DiscreteDataset, params: SelectionParams) -> SelectionResult:
    """FCBF with resampled SU estimates.

    Relevance scores share one set of T subsamples; each feature pair tested
    during redundancy elimination gets a fresh set keyed by the pair. The
    redundancy test compares against the averaged relevance score.
    """
    start = time.perf_counter()
    ranked = RankedList.from_scores(averaged_su_to_class(data, params), params.delta)
    labels = data.class_column.codes
    cache: dict[tuple[int, int], float] = {}

    def pair_su(p, q):
        if (p, q) not in cache:
            masks = draw_masks(labels, params, _PAIR_PASS, p, q)
            a, b = data.columns[p], data.columns[q]
            cache[(p, q)] = _mean(subsample_su(a.codes, a.cardinality, b.codes, b.cardinality, masks))
        return cache[(p, q)]

    result = eliminate_redundant(ranked, pair_su)
    result.elapsed_seconds = time.perf_counter() - start
    return result
