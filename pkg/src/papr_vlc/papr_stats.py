"""Per-symbol peak metrics and streaming empirical CCDFs."""

from __future__ import annotations

import functools
import math
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ofdm_signal import TimeSymbol, ensemble_variance, make_constellation, symbol_block
from .rng import worker_count

CHUNK_SYMBOLS = 2048


@dataclass(frozen=True)
class PeakTriple:
    papr: float
    upapr: float
    lpapr: float


@dataclass(frozen=True)
class CcdfCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray
    samples: int = 0
    kind: str = "analytic"

    def std_errors(self) -> np.ndarray:
        if self.samples == 0:
            return np.zeros_like(self.probabilities)
        return ccdf_std_error(self.probabilities, self.samples)


def peak_triple(sym: TimeSymbol) -> PeakTriple:
    if not sym.is_real:
        raise TypeError("complex-mode symbol: use complex_papr")
    if not sym.sigma2 > 0:
        raise ValueError("sigma2 must be > 0")
    hi = float(np.max(sym.x))
    lo = float(np.min(sym.x))
    return PeakTriple(
        papr=float(np.max(sym.x * sym.x)) / sym.sigma2,
        upapr=hi * hi / sym.sigma2,
        lpapr=lo * lo / sym.sigma2,
    )


def complex_papr(sym: TimeSymbol) -> float:
    if sym.is_real:
        raise TypeError("real-mode symbol: use peak_triple")
    return float(np.max(np.abs(sym.x) ** 2)) / sym.sigma2


def ccdf_std_error(p, samples: int):
    """Binomial standard error ``sqrt(p (1 - p) / samples)``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    se = np.sqrt(p * (1.0 - p) / samples)
    return float(se) if se.ndim == 0 else se


@dataclass
class CcdfCounter:
    """Exceedance counts ``#{v > t_i}`` accumulated chunk by chunk.

    Counters over the same thresholds merge by addition, so per-worker
    tallies can be combined in any order.
    """

    thresholds: np.ndarray
    counts: np.ndarray = field(init=False)
    samples: int = 0

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("thresholds must be a non-empty 1-D sequence")
        if np.any(np.diff(t) < 0):
            raise ValueError("thresholds must be ascending")
        self.thresholds = t
        self.counts = np.zeros(t.size, dtype=np.int64)

    def update(self, values) -> None:
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size == 0:
            return
        # values strictly greater than t start at searchsorted(..., 'right')
        self.counts += v.size - np.searchsorted(v, self.thresholds, side="right")
        self.samples += v.size

    def merge(self, other: "CcdfCounter") -> "CcdfCounter":
        if not np.array_equal(self.thresholds, other.thresholds):
            raise ValueError("cannot merge counters over different thresholds")
        out = CcdfCounter(self.thresholds)
        out.counts = self.counts + other.counts
        out.samples = self.samples + other.samples
        return out

    def curve(self) -> CcdfCurve:
        if self.samples == 0:
            raise ValueError("no values counted")
        return CcdfCurve(self.thresholds, self.counts / self.samples, self.samples, "empirical")


def empirical_ccdf(values: Iterable, thresholds) -> CcdfCurve:
    """Single pass over ``values`` (scalars or array chunks)."""
    counter = CcdfCounter(np.asarray(thresholds, dtype=float))
    buf: list[float] = []
    for item in values:
        if np.ndim(item) == 0:
            buf.append(float(item))
            if len(buf) >= 65536:
                counter.update(buf)
                buf.clear()
        else:
            counter.update(item)
    counter.update(buf)
    if counter.samples == 0:
        raise ValueError("empty value stream")
    return counter.curve()


def analytic_curve(thresholds, fn) -> CcdfCurve:
    t = np.asarray(thresholds, dtype=float)
    return CcdfCurve(t, np.asarray(fn(t), dtype=float), 0, "analytic")


def db_to_ratio(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def ratio_to_db(r):
    return 10.0 * np.log10(np.asarray(r, dtype=float))


def _chunk_extrema(args):
    seed, start, count, N, M = args
    x = symbol_block(seed, start, count, N, make_constellation(M))
    return x.max(axis=1), x.min(axis=1)


@functools.lru_cache(maxsize=16)
def symbol_extrema(N: int, M: int, symbols: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(max_n x[n], min_n x[n]) for symbol indices ``0 .. symbols-1``.

    Chunks run on up to ``PAPR_VLC_THREADS`` workers and are concatenated in
    index order, so the result is independent of the worker count.  Arrays
    are cached and returned read-only.
    """
    if symbols < 1:
        raise ValueError("symbols must be >= 1")
    jobs = [
        (seed, s, min(CHUNK_SYMBOLS, symbols - s), N, M)
        for s in range(0, symbols, CHUNK_SYMBOLS)
    ]
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(_chunk_extrema, jobs))
    else:
        parts = [_chunk_extrema(j) for j in jobs]
    hi = np.concatenate([p[0] for p in parts])
    lo = np.concatenate([p[1] for p in parts])
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def peak_arrays(N: int, M: int, symbols: int, seed: int) -> dict[str, np.ndarray]:
    """UPAPR, LPAPR and real PAPR of every symbol in a seeded run."""
    hi, lo = symbol_extrema(N, M, symbols, seed)
    s2 = ensemble_variance(N)
    up = hi * hi / s2
    low = lo * lo / s2
    return {"upapr": up, "lpapr": low, "papr": np.maximum(up, low)}


def complex_papr_array(N: int, M: int, symbols: int, seed: int) -> np.ndarray:
    """PAPR of each symbol of an all-bins (non-Hermitian) complex run."""
    out = []
    const = make_constellation(M)
    for s in range(0, symbols, CHUNK_SYMBOLS):
        x = symbol_block(seed, s, min(CHUNK_SYMBOLS, symbols - s), N, const, hermitian=False)
        out.append(np.max(np.abs(x) ** 2, axis=1) / ensemble_variance(N, False))
    return np.concatenate(out)


def max_combined_z(a: CcdfCurve, b: CcdfCurve, mask=None) -> float:
    """Largest |a - b| in units of the combined binomial standard error."""
    se = np.sqrt(a.std_errors() ** 2 + b.std_errors() ** 2)
    diff = np.abs(a.probabilities - b.probabilities)
    keep = np.ones(diff.shape, bool) if mask is None else np.asarray(mask, bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff > 0, math.inf, 0.0))
    return float(np.max(z[keep])) if keep.any() else 0.0
