"""Stress objective: full evaluation, sampled estimation, per-pair gradient.

raw stress      sum_{i<j} w_ij * (delta_ij - d_ij)^2
normalized      raw / sum_{i<j} w_ij * delta_ij^2   (scale-free)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_model import (
    DissimilarityProvider,
    Embedding,
    WeightScheme,
    pairs_from_indices,
    row_distances,
)
from .errors import DataError, DegeneratePairError


@dataclass(frozen=True)
class StressReport:
    raw_stress: float
    normalized_stress: float
    pair_count_evaluated: int


def _check_shapes(provider: DissimilarityProvider, emb: Embedding) -> None:
    if provider.n != emb.n:
        raise DataError(
            f"provider has {provider.n} points but embedding has {emb.n}"
        )


def full_stress(
    provider: DissimilarityProvider, scheme: WeightScheme, emb: Embedding
) -> StressReport:
    """Exact stress over all N(N-1)/2 pairs.

    Works in either provider mode; over a lazy provider this costs O(N^2 D)
    time but allocates only per-row temporaries.
    """
    _check_shapes(provider, emb)
    raw = 0.0
    denom = 0.0
    coords = emb.coords
    for i in range(provider.n - 1):
        deltas = provider.packed_row(i)
        d = row_distances(coords, i, i + 1)
        w = scheme.weights(deltas)
        resid = deltas - d
        raw += float(w @ (resid * resid))
        denom += float(w @ (deltas * deltas))
    normalized = raw / denom if denom > 0 else 0.0
    return StressReport(raw, normalized, provider.n_pairs)


def sampled_stress(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    emb: Embedding,
    sample_count: int,
    rng_seed: int,
    _pair_indices: np.ndarray | None = None,
) -> StressReport:
    """Unbiased stress estimate from pairs drawn uniformly with replacement.

    _pair_indices overrides the sampling (diagnostics only); passing every
    packed index once reproduces full_stress exactly.
    """
    _check_shapes(provider, emb)
    if sample_count < 1:
        raise DataError("sample_count must be >= 1")
    n = provider.n
    n_pairs = provider.n_pairs
    if _pair_indices is None:
        rng = np.random.default_rng(rng_seed)
        ks = rng.integers(0, n_pairs, size=sample_count)
    else:
        ks = np.asarray(_pair_indices, dtype=np.int64)
        sample_count = ks.size
    ii, jj = pairs_from_indices(ks, n)
    if provider.mode == "precomputed":
        deltas = provider.packed[ks]
    else:
        feats = provider.dataset.features
        diff = feats[ii] - feats[jj]
        deltas = np.sqrt((diff * diff).sum(axis=1))
    diff = emb.coords[ii] - emb.coords[jj]
    d = np.sqrt((diff * diff).sum(axis=1))
    w = scheme.weights(deltas)
    resid = deltas - d
    raw = float(np.mean(w * resid * resid)) * n_pairs
    denom = float(np.mean(w * deltas * deltas)) * n_pairs
    normalized = raw / denom if denom > 0 else 0.0
    return StressReport(raw, normalized, sample_count)


def pair_gradient(
    delta: float, weight: float, xi: np.ndarray, xj: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Exact gradient of w*(delta - d)^2 with respect to xi and xj.

    grad_i = 2*w*(d - delta) * (xi - xj)/d, grad_j = -grad_i.
    """
    xi = np.asarray(xi, dtype=np.float64)
    xj = np.asarray(xj, dtype=np.float64)
    diff = xi - xj
    d = float(np.sqrt((diff * diff).sum()))
    if d == 0.0:
        raise DegeneratePairError("coincident points: pair gradient undefined")
    grad_i = (2.0 * weight * (d - delta) / d) * diff
    return grad_i, -grad_i
