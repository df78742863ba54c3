"""SMACOF baseline: Guttman-transform majorization with monotone stress descent."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .data_model import (
    DissimilarityProvider,
    Embedding,
    SolverTrace,
    TraceEntry,
    WeightScheme,
    row_distances,
)
from .errors import DataError, SolverError
from .sgd_solver import seeded_initial_embedding
from .stress_eval import full_stress


@dataclass
class SmacofConfig:
    max_iter: int = 300
    rel_tol: float = 1e-4
    m: int = 2
    rng_seed: int = 0
    init_scale: float | str = "auto"
    trace_stress: str = "full"  # "full" | "off"

    def validate(self) -> None:
        if self.max_iter < 1:
            raise DataError("max_iter must be >= 1")
        if self.rel_tol < 0:
            raise DataError("rel_tol must be >= 0")
        if self.m < 1:
            raise DataError("target dimension must be >= 1")
        if self.trace_stress not in ("full", "off"):
            raise DataError(f"unknown trace_stress {self.trace_stress!r}")


def _delta_matrix(provider: DissimilarityProvider) -> np.ndarray:
    n = provider.n
    out = np.zeros((n, n))
    for i in range(n - 1):
        row = provider.packed_row(i)
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
    return out


def _distance_matrix(coords: np.ndarray) -> np.ndarray:
    # same per-pair formula as full_stress, so stress comparisons across the
    # two code paths agree to rounding
    n = coords.shape[0]
    d = np.zeros((n, n))
    for i in range(n - 1):
        row = row_distances(coords, i, i + 1)
        d[i, i + 1 :] = row
        d[i + 1 :, i] = row
    return d


def guttman_step(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    emb: Embedding,
    _vpinv: np.ndarray | None = None,
) -> Embedding:
    """One majorization update; never increases the stress.

    Uniform weights use the closed form X' = B(X) X / N; general positive
    weights solve V X' = B(X) X through the pseudo-inverse of V (optionally
    precomputed and passed as _vpinv by the fitting loop).
    """
    if provider.n != emb.n:
        raise DataError(f"provider has {provider.n} points but embedding has {emb.n}")
    n = provider.n
    delta = _delta_matrix(provider)
    d = _distance_matrix(emb.coords)
    w = scheme.weights(delta)
    np.fill_diagonal(w, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(d > 0.0, -w * delta / d, 0.0)
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    bx = b @ emb.coords
    if scheme.kind == "uniform":
        return Embedding(bx / n)
    if _vpinv is None:
        _vpinv = weight_matrix_pinv(w)
    return Embedding(_vpinv @ bx)


def weight_matrix_pinv(w: np.ndarray) -> np.ndarray:
    """Pseudo-inverse of the V matrix built from off-diagonal weights w."""
    if (w < 0).any():
        raise SolverError("weights must be non-negative")
    v = -w.copy()
    np.fill_diagonal(v, 0.0)
    np.fill_diagonal(v, w.sum(axis=1))
    try:
        return np.linalg.pinv(v, hermitian=True)
    except np.linalg.LinAlgError as exc:
        raise SolverError("weight matrix V is numerically singular") from exc


def fit_smacof(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    config: SmacofConfig,
) -> tuple[Embedding, SolverTrace]:
    config.validate()
    emb, _ = seeded_initial_embedding(
        provider, config.m, config.init_scale, config.rng_seed
    )
    vpinv = None
    if scheme.kind != "uniform":
        w = scheme.weights(_delta_matrix(provider))
        np.fill_diagonal(w, 0.0)
        vpinv = weight_matrix_pinv(w)

    trace = SolverTrace()
    t0 = time.perf_counter()
    report = full_stress(provider, scheme, emb)
    prev = report.raw_stress
    if config.trace_stress == "full":
        trace.append(TraceEntry(0, report.raw_stress, report.normalized_stress,
                                None, time.perf_counter() - t0))
    for it in range(config.max_iter):
        emb = guttman_step(provider, scheme, emb, _vpinv=vpinv)
        report = full_stress(provider, scheme, emb)
        if config.trace_stress == "full":
            trace.append(TraceEntry(it + 1, report.raw_stress, report.normalized_stress,
                                    None, time.perf_counter() - t0))
        denom = max(prev, float(np.finfo(float).tiny))
        if (prev - report.raw_stress) / denom < config.rel_tol:
            break
        prev = report.raw_stress

    if not np.isfinite(emb.coords).all():
        raise SolverError("solver produced non-finite coordinates")
    return emb, trace
