"""Missing-value imputation, z-score standardization and equal-width
discretization.

Each transform has a ``fit`` half that reads statistics from one set of rows
and an ``apply`` half that can be used on other rows, so the cross-validation
harness can keep test folds out of every statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .info_theory import DiscreteColumn

DEFAULT_BINS = 10
DEFAULT_IMPUTE_NEIGHBORS = 5

# Scaled bin positions are rounded to this many decimals before flooring so
# that a positive affine rescaling of a column cannot flip a boundary value
# into the neighbouring bin through rounding noise.
_BIN_ROUND_DECIMALS = 9


class PreprocessError(ValueError):
    pass


@dataclass(frozen=True)
class RawDataset:
    """Numeric features (NaN marks a missing cell) plus class indices."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()
    class_count: int = 0
    class_names: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise PreprocessError(f"features must be a non-empty M x N matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise PreprocessError("labels must be a vector with one entry per row")
        if not np.issubdtype(y.dtype, np.integer):
            raise PreprocessError("labels must be integer class indices")
        y = y.astype(np.intp, copy=False)
        names = tuple(self.feature_names) or tuple(f"f{i}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise PreprocessError("one feature name per column is required")
        if len(set(names)) != len(names):
            raise PreprocessError("feature names must be unique")
        k = self.class_count or int(y.max()) + 1
        if y.min() < 0 or y.max() >= k:
            raise PreprocessError("labels must lie in [0, class_count)")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "class_count", k)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def has_missing(self) -> bool:
        return bool(np.isnan(self.features).any())

    def take(self, rows) -> "RawDataset":
        return replace(self, features=self.features[rows], labels=self.labels[rows])

    def with_features(self, features) -> "RawDataset":
        return replace(self, features=features)


@dataclass(frozen=True)
class DiscreteDataset:
    columns: tuple
    class_column: DiscreteColumn
    feature_names: tuple = field(default=())

    def __post_init__(self):
        m = len(self.class_column)
        if any(len(c) != m for c in self.columns):
            raise PreprocessError("all discrete columns must share the class column's length")
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def n_rows(self) -> int:
        return len(self.class_column)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @classmethod
    def from_arrays(cls, codes, labels, names=()) -> "DiscreteDataset":
        """Build from an M x N integer code matrix, inferring cardinalities."""
        codes = np.asarray(codes)
        cols = tuple(DiscreteColumn.from_codes(codes[:, j]) for j in range(codes.shape[1]))
        return cls(cols, DiscreteColumn.from_codes(np.asarray(labels)), tuple(names))

    def code_matrix(self) -> np.ndarray:
        return np.column_stack([c.codes for c in self.columns])

    def cardinalities(self) -> np.ndarray:
        return np.array([c.cardinality for c in self.columns], dtype=np.intp)


# --------------------------------------------------------------------------
# KNN imputation
# --------------------------------------------------------------------------

def _masked_distances(A, A_obs, B, B_obs):
    """Euclidean distances over mutually observed coordinates, rescaled by
    n_features / n_mutually_observed. Pairs with nothing in common get inf."""
    n_feat = A.shape[1]
    A0 = np.where(A_obs, A, 0.0)
    B0 = np.where(B_obs, B, 0.0)
    Af = A_obs.astype(np.float64)
    Bf = B_obs.astype(np.float64)
    # sum over shared coords of (a - b)^2 = a^2*mb + ma*b^2 - 2ab
    sq = (A0 ** 2) @ Bf.T + Af @ (B0 ** 2).T - 2.0 * A0 @ B0.T
    shared = Af @ Bf.T
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.where(shared > 0, np.maximum(sq, 0.0) * n_feat / shared, np.inf)
    return np.sqrt(d2)


def impute_knn(data: RawDataset, n_neighbors: int = DEFAULT_IMPUTE_NEIGHBORS,
               reference: RawDataset | None = None) -> RawDataset:
    """Fill every missing cell with the mean of that feature over the
    ``n_neighbors`` nearest rows that observe it.

    Donor rows come from ``reference`` when given (e.g. the training fold
    while imputing a test fold); otherwise from ``data`` itself, excluding the
    row being imputed. Observed cells are never modified. Distance ties go to
    the lower donor row index.
    """
    if n_neighbors < 1:
        raise PreprocessError("n_neighbors must be >= 1")
    donors = data if reference is None else reference
    pool_size = donors.n_rows - (1 if reference is None else 0)
    if n_neighbors > pool_size:
        raise PreprocessError(
            f"n_neighbors={n_neighbors} exceeds the {pool_size} available donor rows")
    X = data.features
    missing = np.isnan(X)
    if not missing.any():
        return data
    D = donors.features
    D_obs = ~np.isnan(D)
    dead = ~D_obs.any(axis=0) & missing.any(axis=0)
    if dead.any():
        bad = [data.feature_names[j] for j in np.flatnonzero(dead)]
        raise PreprocessError(f"cannot impute columns missing in every donor row: {bad}")

    rows = np.flatnonzero(missing.any(axis=1))
    dist = _masked_distances(X[rows], ~missing[rows], D, D_obs)
    if reference is None:
        dist[np.arange(rows.size), rows] = np.inf
    out = X.copy()
    for i, r in enumerate(rows):
        order = np.argsort(dist[i], kind="stable")
        for j in np.flatnonzero(missing[r]):
            cand = order[D_obs[order, j] & np.isfinite(dist[i, order])]
            if cand.size == 0:
                # no donor shares a coordinate with this row; fall back to any donor
                cand = order[D_obs[order, j]]
                if reference is None:
                    cand = cand[cand != r]
            if cand.size == 0:
                raise PreprocessError(
                    f"no donor row observes feature {data.feature_names[j]!r} for row {r}")
            out[r, j] = D[cand[:n_neighbors], j].mean()
    return data.with_features(out)


# --------------------------------------------------------------------------
# Standardization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, data: RawDataset) -> "Standardizer":
        if data.has_missing():
            raise PreprocessError("standardize needs complete data; impute first")
        return cls(data.features.mean(axis=0), data.features.std(axis=0))

    def apply(self, data: RawDataset) -> RawDataset:
        if data.has_missing():
            raise PreprocessError("standardize needs complete data; impute first")
        scale = np.where(self.std > 0, self.std, 1.0)
        Z = (data.features - self.mean) / scale
        Z[:, self.std == 0] = 0.0
        return data.with_features(Z)


def standardize(data: RawDataset) -> tuple[RawDataset, Standardizer]:
    """Z-score each feature with its population mean and standard deviation.

    Constant features become all zeros. Returns the transformed dataset and
    the fitted (mean, std) so the same transform can be applied elsewhere.
    """
    fitted = Standardizer.fit(data)
    return fitted.apply(data), fitted


# --------------------------------------------------------------------------
# Discretization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualWidthBinner:
    low: np.ndarray
    high: np.ndarray
    bins: int

    @classmethod
    def fit(cls, data: RawDataset, bins: int = DEFAULT_BINS) -> "EqualWidthBinner":
        if bins < 2:
            raise PreprocessError("bins must be >= 2")
        if data.has_missing():
            raise PreprocessError("discretize needs complete data; impute first")
        return cls(data.features.min(axis=0), data.features.max(axis=0), int(bins))

    def codes(self, X: np.ndarray) -> np.ndarray:
        span = self.high - self.low
        constant = span <= 0
        safe = np.where(constant, 1.0, span)
        pos = np.round(self.bins * (X - self.low) / safe, _BIN_ROUND_DECIMALS)
        c = np.clip(np.floor(pos), 0, self.bins - 1).astype(np.intp)
        c[:, constant] = 0
        return c

    def apply(self, data: RawDataset) -> DiscreteDataset:
        if data.has_missing():
            raise PreprocessError("discretize needs complete data; impute first")
        codes = self.codes(data.features)
        cards = np.where(self.high - self.low > 0, self.bins, 1)
        cols = tuple(DiscreteColumn(codes[:, j], int(cards[j])) for j in range(codes.shape[1]))
        label_col = DiscreteColumn(data.labels, data.class_count)
        return DiscreteDataset(cols, label_col, data.feature_names)


def discretize(data: RawDataset, bins: int = DEFAULT_BINS) -> DiscreteDataset:
    """Equal-width binning over each feature's [min, max] range."""
    return EqualWidthBinner.fit(data, bins).apply(data)
