"""Empirical entropy, information gain and symmetrical uncertainty over
discrete (integer-coded) columns. All quantities are in bits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Floating-point noise tolerated before a negative gain is treated as an error.
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteColumn:
    """Category codes in ``[0, cardinality)``."""

    codes: np.ndarray
    cardinality: int

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.ndim != 1 or codes.size == 0:
            raise ValueError("a discrete column needs a non-empty 1-D code array")
        if not np.issubdtype(codes.dtype, np.integer):
            raise TypeError(f"codes must be integers, got {codes.dtype}")
        if self.cardinality < 1:
            raise ValueError("cardinality must be >= 1")
        if codes.min() < 0 or codes.max() >= self.cardinality:
            raise ValueError("codes must lie in [0, cardinality)")
        object.__setattr__(self, "codes", codes.astype(np.intp, copy=False))

    def __len__(self):
        return self.codes.shape[0]

    @classmethod
    def from_codes(cls, codes) -> "DiscreteColumn":
        codes = np.asarray(codes)
        return cls(codes, int(codes.max()) + 1 if codes.size else 1)


def _as_column(x) -> tuple[np.ndarray, int]:
    if isinstance(x, DiscreteColumn):
        return x.codes, x.cardinality
    codes = np.asarray(x)
    if codes.ndim != 1 or codes.size == 0:
        raise ValueError("a discrete column needs a non-empty 1-D code array")
    if not np.issubdtype(codes.dtype, np.integer):
        raise TypeError(f"codes must be integers, got {codes.dtype}")
    if codes.min() < 0:
        raise ValueError("codes must be non-negative")
    return codes.astype(np.intp, copy=False), int(codes.max()) + 1


def _pair(x, y):
    xc, xk = _as_column(x)
    yc, yk = _as_column(y)
    if xc.shape[0] != yc.shape[0]:
        raise ValueError(f"length mismatch: {xc.shape[0]} vs {yc.shape[0]}")
    return xc, xk, yc, yk


def _plogp_sum(counts: np.ndarray, total) -> np.ndarray:
    """-sum p log2 p over the last axis, zero counts contributing nothing."""
    p = counts / total
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(p * np.log2(safe), axis=-1)


def joint_counts(x_codes, x_card, y_codes, y_card) -> np.ndarray:
    """Contingency table of shape (x_card, y_card)."""
    flat = np.bincount(x_codes * y_card + y_codes, minlength=x_card * y_card)
    return flat.reshape(x_card, y_card)


def su_from_tables(tables: np.ndarray) -> np.ndarray:
    """Symmetrical uncertainty for a stack of contingency tables.

    ``tables`` has shape (batch, cx, cy); one SU value is returned per table.
    Every SU computed in this package goes through here, so equal tables give
    bit-identical values whichever code path produced them.
    """
    tables = np.asarray(tables, dtype=np.float64)
    n = tables.sum(axis=(1, 2))[:, None]
    hx = _plogp_sum(tables.sum(axis=2), n)
    hy = _plogp_sum(tables.sum(axis=1), n)
    hxy = _plogp_sum(tables.reshape(tables.shape[0], -1), n)
    gain = np.maximum(hx + hy - hxy, 0.0)
    denom = hx + hy
    out = np.zeros_like(denom)
    np.divide(2.0 * gain, denom, out=out, where=denom > 0)
    return np.minimum(out, 1.0)


def entropy(x) -> float:
    codes, card = _as_column(x)
    counts = np.bincount(codes, minlength=card)
    return float(_plogp_sum(counts.astype(np.float64), codes.shape[0]))


def conditional_entropy(x, y) -> float:
    """H(x | y) = -sum_y P(y) sum_x P(x|y) log2 P(x|y)."""
    xc, xk, yc, yk = _pair(x, y)
    table = joint_counts(xc, xk, yc, yk).astype(np.float64)
    n = xc.shape[0]
    y_counts = table.sum(axis=0)
    h = 0.0
    for j in np.flatnonzero(y_counts):
        h += (y_counts[j] / n) * float(_plogp_sum(table[:, j], y_counts[j]))
    return h


def information_gain(x, y) -> float:
    gain = entropy(x) - conditional_entropy(x, y)
    if gain < -_NEG_TOL:
        raise ArithmeticError(f"information gain is negative ({gain})")
    return max(gain, 0.0)


def symmetrical_uncertainty(x, y) -> float:
    """2 * IG(x, y) / (H(x) + H(y)); 0 when both columns are constant."""
    xc, xk, yc, yk = _pair(x, y)
    return float(su_from_tables(joint_counts(xc, xk, yc, yk)[None])[0])
