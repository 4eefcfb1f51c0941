"""Fast Correlation-Based Filter: SU relevance filtering followed by
approximate Markov blanket redundancy elimination."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .info_theory import joint_counts, su_from_tables
from .preprocess import DiscreteDataset


@dataclass(frozen=True)
class FeatureScore:
    feature_index: int
    su_to_class: float


@dataclass(frozen=True)
class RankedList:
    """Features sorted by SU to the class, descending; ties by index."""

    entries: tuple = ()

    @classmethod
    def from_scores(cls, scores, delta: float) -> "RankedList":
        kept = [FeatureScore(i, float(s)) for i, s in enumerate(scores) if s >= delta]
        kept.sort(key=lambda e: (-e.su_to_class, e.feature_index))
        return cls(tuple(kept))

    def __len__(self):
        return len(self.entries)

    @property
    def indices(self) -> list[int]:
        return [e.feature_index for e in self.entries]


@dataclass(frozen=True)
class Removal:
    removed: int
    by: int
    su_pair: float
    su_class: float


@dataclass
class SelectionResult:
    selected: tuple = ()
    scores: tuple = ()
    elapsed_seconds: float = 0.0
    removals: list = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.selected


def column_su(data: DiscreteDataset, i: int, j: int | None = None, rows=None) -> float:
    """SU between feature ``i`` and feature ``j`` (or the class when ``j`` is
    None), optionally restricted to ``rows``."""
    a = data.columns[i]
    b = data.class_column if j is None else data.columns[j]
    ac, bc = a.codes, b.codes
    if rows is not None:
        ac, bc = ac[rows], bc[rows]
    return float(su_from_tables(joint_counts(ac, a.cardinality, bc, b.cardinality)[None])[0])


def relevance_pass(data: DiscreteDataset, delta: float) -> RankedList:
    scores = [column_su(data, i) for i in range(data.n_features)]
    return RankedList.from_scores(scores, delta)


def eliminate_redundant(ranked: RankedList, pair_su: Callable[[int, int], float]) -> SelectionResult:
    """Walk predominant features in rank order and drop every later feature
    F_q with SU(F_p, F_q) >= SU(F_q, C).

    ``pair_su(p, q)`` supplies the feature-feature SU; it is called at most
    once per ordered pair.
    """
    entries = list(ranked.entries)
    removals = []
    i = 0
    while i < len(entries):
        p = entries[i]
        j = i + 1
        while j < len(entries):
            q = entries[j]
            su_pq = pair_su(p.feature_index, q.feature_index)
            if su_pq >= q.su_to_class:
                removals.append(Removal(q.feature_index, p.feature_index, su_pq, q.su_to_class))
                del entries[j]
            else:
                j += 1
        i += 1
    return SelectionResult(
        selected=tuple(e.feature_index for e in entries),
        scores=tuple(e.su_to_class for e in entries),
        removals=removals,
    )


def redundancy_pass(ranked: RankedList, data: DiscreteDataset) -> SelectionResult:
    cache: dict[tuple[int, int], float] = {}

    def pair_su(p, q):
        if (p, q) not in cache:
            cache[(p, q)] = column_su(data, p, q)
        return cache[(p, q)]

    return eliminate_redundant(ranked, pair_su)


def fcbf(data: DiscreteDataset, delta: float = 0.01) -> SelectionResult:
    """Select a relevant, non-redundant feature subset.

    An empty selection is a legal outcome and is returned as an empty result.
    """
    start = time.perf_counter()
    result = redundancy_pass(relevance_pass(data, delta), data)
    result.elapsed_seconds = time.perf_counter() - start
    return result


def selected_names(result: SelectionResult, data: DiscreteDataset) -> list[str]:
    if not data.feature_names:
        return [f"f{i}" for i in result.selected]
    return [data.feature_names[i] for i in result.selected]


def su_to_class_vector(data: DiscreteDataset) -> np.ndarray:
    return np.array([column_su(data, i) for i in range(data.n_features)])
