"""Stochastic per-pair stress minimizer.

Two execution modes share one update rule:

  pairstream   shuffle all N(N-1)/2 pairs each epoch (precomputed distances),
               visit each exactly once, updating positions in place so later
               visits see earlier moves;
  lazysample   draw pairs with replacement and compute each dissimilarity
               on the fly, keeping auxiliary memory constant.

The per-pair step moves both endpoints toward (never past) the configuration
where the embedded distance equals the dissimilarity: with clamp factor
mu = min(w*eta, 1), each endpoint moves (mu/2)*(d - delta) along the
inter-point direction, so mu = 1 lands exactly on the satisfied constraint.

The learning rate follows a hybrid schedule: exponential decay from
eta0/w_min down one decade over the first 40% of epochs, then harmonic
1/t decay, joined continuously.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .data_model import (
    DissimilarityProvider,
    Embedding,
    SolverTrace,
    TraceEntry,
    WeightScheme,
    pairs_from_indices,
)
from .errors import DataError, SolverError
from .stress_eval import StressReport, full_stress, sampled_stress

JITTER_SCALE = 1e-9


@dataclass
class SgdConfig:
    n_epochs: int = 30
    eta0: float = 0.5
    switch_fraction: float = 0.4
    decay_ratio: float = 10.0
    m: int = 2
    rng_seed: int = 0
    init_scale: float | str = "auto"
    early_stop_rel_tol: float = 1e-3
    mode: str = "pairstream"  # "pairstream" | "lazysample"
    lazy_updates_per_epoch: int | None = None  # default: N(N-1)/2
    trace_stress: str = "full"  # "full" | "sampled" | "off"
    trace_sample_count: int = 10_000

    def validate(self) -> None:
        if self.n_epochs < 1:
            raise DataError("n_epochs must be >= 1")
        if not self.eta0 > 0:
            raise DataError("eta0 must be positive")
        if not 0 < self.switch_fraction < 1:
            raise DataError("switch_fraction must lie in (0, 1)")
        if not self.decay_ratio > 1:
            raise DataError("decay_ratio must exceed 1")
        if self.m < 1:
            raise DataError("target dimension must be >= 1")
        if self.early_stop_rel_tol < 0:
            raise DataError("early_stop_rel_tol must be >= 0")
        if self.mode not in ("pairstream", "lazysample"):
            raise DataError(f"unknown mode {self.mode!r}")
        if self.trace_stress not in ("full", "sampled", "off"):
            raise DataError(f"unknown trace_stress {self.trace_stress!r}")
        if self.init_scale != "auto" and not float(self.init_scale) > 0:
            raise DataError("init_scale must be positive or 'auto'")
        t_switch = math.ceil(self.switch_fraction * self.n_epochs)
        if not 1 <= t_switch <= self.n_epochs:
            raise DataError("switch point falls outside the epoch range")


@dataclass(frozen=True)
class ScheduleState:
    eta_max: float
    t_switch: int
    lam: float
    n_epochs: int


def make_schedule(config: SgdConfig, w_min: float) -> ScheduleState:
    if not w_min > 0:
        raise DataError("w_min must be positive")
    t_switch = math.ceil(config.switch_fraction * config.n_epochs)
    return ScheduleState(
        eta_max=config.eta0 / w_min,
        t_switch=t_switch,
        lam=math.log(config.decay_ratio) / t_switch,
        n_epochs=config.n_epochs,
    )


def learning_rate(state: ScheduleState, epoch: int) -> float:
    if not 0 <= epoch < state.n_epochs:
        raise DataError(f"epoch {epoch} out of range [0, {state.n_epochs})")
    if epoch < state.t_switch:
        return state.eta_max * math.exp(-state.lam * epoch)
    eta_switch = state.eta_max * math.exp(-state.lam * state.t_switch)
    return eta_switch / (1 + (epoch - state.t_switch))


def init_embedding(n: int, m: int, scale: float, rng_seed: int) -> Embedding:
    """Coordinates drawn i.i.d. uniformly from [-scale/2, +scale/2]."""
    if n < 2 or m < 1:
        raise DataError("need n >= 2 and m >= 1")
    rng = np.random.default_rng(rng_seed)
    return Embedding(rng.uniform(-scale / 2, scale / 2, size=(n, m)))


def resolve_init_scale(
    provider: DissimilarityProvider, init_scale: float | str, rng_seed: int
) -> float:
    """Numeric scales pass through; 'auto' uses the max dissimilarity seen over
    min(1000, N(N-1)/2) sampled pairs (exhaustive when that covers all pairs)."""
    if init_scale != "auto":
        return float(init_scale)
    n_pairs = provider.n_pairs
    if n_pairs <= 1000:
        ks = np.arange(n_pairs)
    else:
        rng = np.random.default_rng(rng_seed)
        ks = rng.integers(0, n_pairs, size=1000)
    deltas = _deltas_at(provider, ks)
    top = float(deltas.max())
    return top if top > 0 else 1.0


def _deltas_at(provider: DissimilarityProvider, ks: np.ndarray) -> np.ndarray:
    if provider.mode == "precomputed":
        return provider.packed[ks]
    ii, jj = pairs_from_indices(ks, provider.n)
    feats = provider.dataset.features
    diff = feats[ii] - feats[jj]
    return np.sqrt((diff * diff).sum(axis=1))


def estimate_w_min(
    provider: DissimilarityProvider, scheme: WeightScheme, rng_seed: int
) -> float:
    """Minimum pair weight: exact over a precomputed provider, estimated from a
    seeded 1000-pair sample in lazy mode (exact anyway for uniform weights)."""
    if scheme.kind == "uniform":
        return 1.0
    if provider.mode == "precomputed":
        deltas = provider.packed
    else:
        rng = np.random.default_rng(rng_seed)
        ks = rng.integers(0, provider.n_pairs, size=min(1000, provider.n_pairs))
        deltas = _deltas_at(provider, ks)
    return float(scheme.weights(deltas).min())


def apply_pair_update(
    emb: Embedding,
    i: int,
    j: int,
    delta: float,
    weight: float,
    eta: float,
    rng: np.random.Generator | None = None,
) -> None:
    """Clamped symmetric step on one pair, in place.

    Coincident points are first nudged apart by a tiny random unit vector
    (from rng, or a fixed-seed fallback) so the direction is defined.
    """
    if i == j:
        raise DataError("pair update needs two distinct points")
    if not eta > 0:
        raise DataError("eta must be positive")
    # scalar arithmetic, in the same operation order as the compiled epoch
    # kernels, so single-step replays agree bitwise
    coords = emb.coords
    m = coords.shape[1]
    d2 = 0.0
    for c in range(m):
        dx = coords[i, c] - coords[j, c]
        d2 += dx * dx
    if d2 == 0.0:
        if rng is None:
            rng = np.random.default_rng(0)
        scale = JITTER_SCALE * (delta if delta > 1.0 else 1.0)
        jit = [rng.standard_normal() for _ in range(m)]
        nrm = math.sqrt(sum(v * v for v in jit))
        for c in range(m):
            coords[i, c] += scale * jit[c] / nrm
        d2 = 0.0
        for c in range(m):
            dx = coords[i, c] - coords[j, c]
            d2 += dx * dx
    d = math.sqrt(d2)
    mu = weight * eta
    if mu > 1.0:
        mu = 1.0
    s = (mu / 2.0) * (d - delta) / d
    for c in range(m):
        r = s * (coords[i, c] - coords[j, c])
        coords[i, c] -= r
        coords[j, c] += r


@njit(cache=True, nogil=True)
def _pair_from_index_nb(k, n):
    i = int((2 * n - 1 - math.sqrt((2.0 * n - 1) ** 2 - 8.0 * k)) / 2)
    while i * n - i * (i + 1) // 2 > k:
        i -= 1
    while (i + 1) * n - (i + 1) * (i + 2) // 2 <= k:
        i += 1
    j = k - (i * n - i * (i + 1) // 2) + i + 1
    return i, j


@njit(cache=True, nogil=True)
def _update_nb(coords, i, j, delta, weight, eta):
    m = coords.shape[1]
    d2 = 0.0
    for c in range(m):
        dx = coords[i, c] - coords[j, c]
        d2 += dx * dx
    if d2 == 0.0:
        scale = JITTER_SCALE * (delta if delta > 1.0 else 1.0)
        nrm = 0.0
        jit = np.empty(m)
        for c in range(m):
            jit[c] = np.random.standard_normal()
            nrm += jit[c] * jit[c]
        nrm = math.sqrt(nrm)
        for c in range(m):
            coords[i, c] += scale * jit[c] / nrm
        d2 = 0.0
        for c in range(m):
            dx = coords[i, c] - coords[j, c]
            d2 += dx * dx
    d = math.sqrt(d2)
    mu = weight * eta
    if mu > 1.0:
        mu = 1.0
    s = (mu / 2.0) * (d - delta) / d
    for c in range(m):
        r = s * (coords[i, c] - coords[j, c])
        coords[i, c] -= r
        coords[j, c] += r


@njit(cache=True, nogil=True)
def _weight_nb(delta, weight_kind, eps_floor):
    if weight_kind == 0:
        return 1.0
    dd = delta if delta > eps_floor else eps_floor
    return 1.0 / (dd * dd)


@njit(cache=True, nogil=True)
def _epoch_pairstream_nb(coords, packed, perm, n, eta, weight_kind, eps_floor, seed):
    np.random.seed(seed)
    for t in range(perm.shape[0]):
        k = perm[t]
        i, j = _pair_from_index_nb(k, n)
        delta = packed[k]
        w = _weight_nb(delta, weight_kind, eps_floor)
        _update_nb(coords, i, j, delta, w, eta)


@njit(cache=True, nogil=True)
def _epoch_lazy_features_nb(coords, feats, updates, eta, weight_kind, eps_floor, seed):
    np.random.seed(seed)
    n = coords.shape[0]
    n_feat = feats.shape[1]
    for t in range(updates):
        i = np.random.randint(0, n)
        j = np.random.randint(0, n)
        while j == i:
            j = np.random.randint(0, n)
        dd2 = 0.0
        for c in range(n_feat):
            dx = feats[i, c] - feats[j, c]
            dd2 += dx * dx
        delta = math.sqrt(dd2)
        w = _weight_nb(delta, weight_kind, eps_floor)
        _update_nb(coords, i, j, delta, w, eta)


@njit(cache=True, nogil=True)
def _epoch_lazy_packed_nb(coords, packed, updates, eta, weight_kind, eps_floor, seed):
    np.random.seed(seed)
    n = coords.shape[0]
    for t in range(updates):
        i = np.random.randint(0, n)
        j = np.random.randint(0, n)
        while j == i:
            j = np.random.randint(0, n)
        a, b = (i, j) if i < j else (j, i)
        delta = packed[a * n - a * (a + 1) // 2 + (b - a - 1)]
        w = _weight_nb(delta, weight_kind, eps_floor)
        _update_nb(coords, i, j, delta, w, eta)


def _weight_kind(scheme: WeightScheme) -> int:
    return 0 if scheme.kind == "uniform" else 1


def run_epoch_pairstream(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    emb: Embedding,
    eta: float,
    rng: np.random.Generator,
) -> int:
    """One full shuffled pass over every pair; returns the pair-visit count."""
    if provider.mode != "precomputed":
        raise DataError("pairstream epochs require a precomputed provider")
    perm = rng.permutation(provider.n_pairs)
    seed = int(rng.integers(0, 2**31))
    _epoch_pairstream_nb(
        emb.coords, provider.packed, perm, provider.n, eta,
        _weight_kind(scheme), scheme.epsilon_floor, seed,
    )
    return provider.n_pairs


def run_epoch_lazysample(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    emb: Embedding,
    eta: float,
    updates: int,
    rng: np.random.Generator,
) -> int:
    """`updates` with-replacement pair draws; constant auxiliary memory."""
    if updates < 0:
        raise DataError("updates must be >= 0")
    if updates == 0:
        return 0
    seed = int(rng.integers(0, 2**31))
    if provider.mode == "lazy":
        _epoch_lazy_features_nb(
            emb.coords, provider.dataset.features, updates, eta,
            _weight_kind(scheme), scheme.epsilon_floor, seed,
        )
    else:
        _epoch_lazy_packed_nb(
            emb.coords, provider.packed, updates, eta,
            _weight_kind(scheme), scheme.epsilon_floor, seed,
        )
    return updates


def seeded_initial_embedding(
    provider: DissimilarityProvider,
    m: int,
    init_scale: float | str,
    rng_seed: int,
) -> tuple[Embedding, np.random.Generator]:
    """Initial configuration shared by both solvers for a given seed, plus the
    continuing master RNG stream."""
    master = np.random.default_rng(rng_seed)
    scale_seed = int(master.integers(0, 2**31))
    init_seed = int(master.integers(0, 2**31))
    scale = resolve_init_scale(provider, init_scale, scale_seed)
    return init_embedding(provider.n, m, scale, init_seed), master


def _traced_stress(
    provider, scheme, emb, config: SgdConfig, sample_seed: int
) -> StressReport | None:
    if config.trace_stress == "full":
        return full_stress(provider, scheme, emb)
    if config.trace_stress == "sampled":
        return sampled_stress(
            provider, scheme, emb, config.trace_sample_count, sample_seed
        )
    return None


def fit_sgd(
    provider: DissimilarityProvider,
    scheme: WeightScheme,
    config: SgdConfig,
) -> tuple[Embedding, SolverTrace]:
    config.validate()
    if provider.n < 2:
        raise DataError("need at least 2 points")
    if config.mode == "pairstream" and provider.mode != "precomputed":
        raise DataError("pairstream mode requires a precomputed provider")

    emb, master = seeded_initial_embedding(
        provider, config.m, config.init_scale, config.rng_seed
    )
    w_min_seed = int(master.integers(0, 2**31))
    sample_seed = int(master.integers(0, 2**31))
    w_min = estimate_w_min(provider, scheme, w_min_seed)
    sched = make_schedule(config, w_min)
    updates = config.lazy_updates_per_epoch
    if updates is None:
        updates = provider.n_pairs

    trace = SolverTrace()
    t0 = time.perf_counter()
    report = _traced_stress(provider, scheme, emb, config, sample_seed)
    prev_stress = report.raw_stress if report else math.nan
    trace.append(TraceEntry(
        step=0,
        raw_stress=report.raw_stress if report else math.nan,
        normalized_stress=report.normalized_stress if report else math.nan,
        learning_rate=learning_rate(sched, 0),
        elapsed_seconds=time.perf_counter() - t0,
    ))

    for epoch in range(config.n_epochs):
        eta = learning_rate(sched, epoch)
        if config.mode == "pairstream":
            run_epoch_pairstream(provider, scheme, emb, eta, master)
        else:
            run_epoch_lazysample(provider, scheme, emb, eta, updates, master)
        report = _traced_stress(provider, scheme, emb, config, sample_seed)
        stress = report.raw_stress if report else math.nan
        trace.append(TraceEntry(
            step=epoch + 1,
            raw_stress=stress,
            normalized_stress=report.normalized_stress if report else math.nan,
            learning_rate=eta,
            elapsed_seconds=time.perf_counter() - t0,
        ))
        if report and config.early_stop_rel_tol > 0:
            denom = max(abs(prev_stress), np.finfo(float).tiny)
            if abs(prev_stress - stress) / denom < config.early_stop_rel_tol:
                break
        prev_stress = stress

    if not np.isfinite(emb.coords).all():
        raise SolverError("solver produced non-finite coordinates")
    return emb, trace
