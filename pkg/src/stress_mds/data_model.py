"""Core domain types: datasets, dissimilarity providers, weights, embeddings, traces.

Dissimilarities are stored (or computed) as Euclidean distances between feature
rows.  The precomputed provider keeps a packed upper-triangular array in the
canonical row-major pair order

    k = i*N - i*(i+1)//2 + (j - i - 1)      for i < j,

which also defines the pair ordering used for epoch shuffling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DataError


@dataclass
class Dataset:
    features: np.ndarray
    labels: list | None = None
    name: str = ""

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {feats.shape}")
        n, d = feats.shape
        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        if d < 1:
            raise DataError("need at least 1 feature column")
        if not np.isfinite(feats).all():
            bad = np.argwhere(~np.isfinite(feats))[0]
            raise DataError(f"non-finite feature value at row {bad[0]}, column {bad[1]}")
        if self.labels is not None and len(self.labels) != n:
            raise DataError(f"{len(self.labels)} labels for {n} rows")
        self.features = feats

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def pair_index(i: int, j: int, n: int) -> int:
    """Packed index of pair (i, j), i < j, in the canonical row-major order."""
    if not 0 <= i < j < n:
        raise DataError(f"invalid pair ({i}, {j}) for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def pair_from_index(k: int, n: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if not 0 <= k < n * (n - 1) // 2:
        raise DataError(f"pair index {k} out of range for n={n}")
    i = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8 * k)) // 2)
    while i * n - i * (i + 1) // 2 > k:
        i -= 1
    while (i + 1) * n - (i + 1) * (i + 2) // 2 <= k:
        i += 1
    j = k - (i * n - i * (i + 1) // 2) + i + 1
    return i, j


def pairs_from_indices(ks: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pair_from_index for an array of packed indices."""
    ks = np.asarray(ks, dtype=np.int64)
    i = ((2 * n - 1 - np.sqrt((2.0 * n - 1) ** 2 - 8.0 * ks)) // 2).astype(np.int64)
    # guard against float rounding at row boundaries
    off = i * n - i * (i + 1) // 2
    too_high = off > ks
    i[too_high] -= 1
    off_next = (i + 1) * n - (i + 1) * (i + 2) // 2
    too_low = off_next <= ks
    i[too_low] += 1
    off = i * n - i * (i + 1) // 2
    j = ks - off + i + 1
    return i, j


def row_distances(features: np.ndarray, i: int, start: int) -> np.ndarray:
    """Euclidean distances from row i to rows start..N-1.

    The single-pair and batched forms of this expression reduce identically,
    so lazy and precomputed providers agree bitwise.
    """
    diff = features[start:] - features[i]
    return np.sqrt((diff * diff).sum(axis=1))


def packed_distances(features: np.ndarray) -> np.ndarray:
    """All pairwise Euclidean distances in canonical packed order."""
    n = features.shape[0]
    n_pairs = n * (n - 1) // 2
    try:
        out = np.empty(n_pairs, dtype=np.float64)
    except MemoryError as exc:
        raise CapacityError(
            f"cannot allocate packed distance matrix: {n_pairs * 8} bytes "
            f"required for N={n}"
        ) from exc
    pos = 0
    for i in range(n - 1):
        d = row_distances(features, i, i + 1)
        out[pos : pos + d.size] = d
        pos += d.size
    return out


@dataclass
class DissimilarityProvider:
    """Uniform access to pairwise dissimilarities.

    Precomputed mode holds a packed distance array; lazy mode recomputes
    Euclidean distances from the dataset on every query and allocates no
    pairwise storage.
    """

    mode: str  # "precomputed" | "lazy"
    n: int
    packed: np.ndarray | None = None
    dataset: Dataset | None = None
    name: str = ""

    def __post_init__(self):
        if self.mode not in ("precomputed", "lazy"):
            raise DataError(f"unknown provider mode {self.mode!r}")
        if self.mode == "precomputed":
            if self.packed is None:
                raise DataError("precomputed provider needs a packed array")
            expect = self.n * (self.n - 1) // 2
            if self.packed.shape != (expect,):
                raise DataError(f"packed array has {self.packed.shape}, expected ({expect},)")
            if (self.packed < 0).any() or not np.isfinite(self.packed).all():
                raise DataError("dissimilarities must be finite and non-negative")
        else:
            if self.dataset is None:
                raise DataError("lazy provider needs a dataset")

    @property
    def n_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def get(self, i: int, j: int) -> float:
        if i == j:
            raise DataError(f"diagonal query (i=j={i}) is not a pair")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DataError(f"pair ({i}, {j}) out of range for n={self.n}")
        if i > j:
            i, j = j, i
        if self.mode == "precomputed":
            return float(self.packed[pair_index(i, j, self.n)])
        return float(row_distances(self.dataset.features, i, j)[0])

    def packed_row(self, i: int) -> np.ndarray:
        """Dissimilarities from i to i+1..N-1 (computed on demand in lazy mode)."""
        if self.mode == "precomputed":
            start = pair_index(i, i + 1, self.n)
            return self.packed[start : start + self.n - 1 - i]
        return row_distances(self.dataset.features, i, i + 1)


def make_precomputed_provider(dataset: Dataset) -> DissimilarityProvider:
    packed = packed_distances(dataset.features)
    return DissimilarityProvider(
        mode="precomputed", n=dataset.n, packed=packed, dataset=dataset, name=dataset.name
    )


def make_lazy_provider(dataset: Dataset) -> DissimilarityProvider:
    return DissimilarityProvider(mode="lazy", n=dataset.n, dataset=dataset, name=dataset.name)


def provider_from_packed(packed: np.ndarray, n: int, name: str = "") -> DissimilarityProvider:
    return DissimilarityProvider(mode="precomputed", n=n, packed=packed, name=name)


def get_dissimilarity(provider: DissimilarityProvider, i: int, j: int) -> float:
    return provider.get(i, j)


@dataclass(frozen=True)
class WeightScheme:
    """Pair weight convention: uniform (w=1) or inverse squared dissimilarity."""

    kind: str = "uniform"  # "uniform" | "invsq"
    epsilon_floor: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("uniform", "invsq"):
            raise DataError(f"unknown weight kind {self.kind!r}")
        if not self.epsilon_floor > 0:
            raise DataError("epsilon_floor must be positive")

    def weight(self, delta: float) -> float:
        if self.kind == "uniform":
            return 1.0
        return max(delta, self.epsilon_floor) ** -2

    def weights(self, deltas: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            return np.ones_like(deltas)
        return np.maximum(deltas, self.epsilon_floor) ** -2.0


def get_weight(scheme: WeightScheme, delta: float) -> float:
    return scheme.weight(delta)


@dataclass
class Embedding:
    coords: np.ndarray

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise DataError(f"coords must be 2-D, got shape {coords.shape}")
        if coords.shape[0] < 2:
            raise DataError("embedding needs at least 2 points")
        if not np.isfinite(coords).all():
            raise DataError("embedding coordinates must be finite")
        self.coords = coords

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def m(self) -> int:
        return self.coords.shape[1]


@dataclass
class TraceEntry:
    step: int
    raw_stress: float
    normalized_stress: float
    learning_rate: float | None
    elapsed_seconds: float


@dataclass
class SolverTrace:
    entries: list[TraceEntry] = field(default_factory=list)

    def append(self, entry: TraceEntry) -> None:
        if self.entries:
            last = self.entries[-1]
            if entry.step <= last.step:
                raise DataError("trace steps must be strictly increasing")
            if entry.elapsed_seconds < last.elapsed_seconds:
                raise DataError("trace wall time must be non-decreasing")
        elif entry.step != 0:
            raise DataError("trace must start at step 0")
        self.entries.append(entry)

    def stable_step(self, rel_tol: float = 1e-3) -> int | None:
        """First step whose relative stress change from the previous entry
        falls below rel_tol; None if that never happens."""
        for prev, cur in zip(self.entries, self.entries[1:]):
            denom = max(abs(prev.raw_stress), np.finfo(float).tiny)
            if abs(prev.raw_stress - cur.raw_stress) / denom < rel_tol:
                return cur.step
        return None

    def entry_at(self, step: int) -> TraceEntry:
        for e in self.entries:
            if e.step == step:
                return e
        raise KeyError(step)
