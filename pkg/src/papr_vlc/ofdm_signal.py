"""OFDM symbol synthesis: square QAM, (Hermitian) framing, radix-2 IDFT."""

from __future__ import annotations

import functools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from .rng import RandomStream

SUPPORTED_ORDERS = (4, 64, 256)
REALNESS_TOL = 1e-9
# samples per IDFT batch; larger batches fall out of cache and run slower
_IDFT_BATCH_SAMPLES = 16384


@dataclass(frozen=True)
class ConstellationSpec:
    order: int
    points: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))


@dataclass(frozen=True)
class FrequencyFrame:
    X: np.ndarray
    hermitian: bool

    @property
    def n(self) -> int:
        return self.X.shape[-1]


@dataclass(frozen=True)
class TimeSymbol:
    x: np.ndarray
    sigma2: float

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.x)

    @property
    def n(self) -> int:
        return self.x.shape[-1]


def _gray_decode(u: int) -> int:
    b, shift = u, u >> 1
    while shift:
        b ^= shift
        shift >>= 1
    return b


def make_constellation(M: int) -> ConstellationSpec:
    """Unit-energy square QAM with Gray labels.

    Point ``p`` takes its in-phase level from the high half of its label and
    the quadrature level from the low half, so points are listed row-major
    with Gray-coded rows and columns.
    """
    if M not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {M}; allowed: {SUPPORTED_ORDERS}")
    side = math.isqrt(M)
    half_bits = int(math.log2(side))
    levels = np.array([2 * _gray_decode(u) - (side - 1) for u in range(side)], dtype=float)
    labels = np.arange(M)
    pts = levels[labels >> half_bits] + 1j * levels[labels & (side - 1)]
    # mean of a^2 + b^2 over the odd-integer grid is 2(M - 1)/3
    pts /= math.sqrt(2.0 * (M - 1) / 3.0)
    pts.setflags(write=False)
    return ConstellationSpec(M, pts)


def _check_n(N: int) -> None:
    if N < 8 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 8, got {N}")


def random_frame(
    N: int, constellation: ConstellationSpec, rng: RandomStream, hermitian: bool = True
) -> FrequencyFrame:
    _check_n(N)
    X = np.zeros(N, dtype=complex)
    if hermitian:
        data = constellation.points[rng.integers(constellation.order, N // 2 - 1)]
        X[1 : N // 2] = data
        X[N // 2 + 1 :] = np.conj(data[::-1])
    else:
        X[:] = constellation.points[rng.integers(constellation.order, N)]
    return FrequencyFrame(X, hermitian)


@functools.lru_cache(maxsize=None)
def _plan(N: int) -> tuple[np.ndarray, np.ndarray]:
    bits = int(math.log2(N))
    idx = np.arange(N)
    rev = np.zeros(N, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = np.exp(2j * np.pi * np.arange(N // 2) / N)
    rev.setflags(write=False)
    twiddles.setflags(write=False)
    return rev, twiddles


def ifft_radix2(X: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT along the last axis, iterative radix-2 DIT.

    ``x[n] = N**-0.5 * sum_k X[k] exp(2j*pi*k*n/N)``; works on any leading
    batch shape.
    """
    X = np.asarray(X, dtype=complex)
    N = X.shape[-1]
    if N < 1 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    lead = X.shape[:-1]
    rev, twiddles = _plan(N)
    a = X[..., rev]
    size = 2
    while size <= N:
        half = size // 2
        w = twiddles[:: N // size]
        blocks = a.reshape(lead + (N // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * w
        a = np.concatenate((even + odd, even - odd), axis=-1)
        size *= 2
    return a.reshape(lead + (N,)) / math.sqrt(N)


def ensemble_variance(N: int, hermitian: bool = True) -> float:
    """E[|x[n]|^2] for unit-energy data on the active bins."""
    return (N - 2) / N if hermitian else 1.0


def _to_real(x: np.ndarray) -> np.ndarray:
    resid = np.max(np.abs(x.imag)) if x.size else 0.0
    if resid > REALNESS_TOL:
        raise ValueError(f"Hermitian frame produced imaginary residue {resid:.3g}")
    return np.ascontiguousarray(x.real)


def idft(frame: FrequencyFrame) -> TimeSymbol:
    x = ifft_radix2(frame.X)
    if frame.hermitian:
        x = _to_real(x)
    return TimeSymbol(x, ensemble_variance(frame.n, frame.hermitian))


def frame_block(
    seed: int,
    start: int,
    count: int,
    N: int,
    constellation: ConstellationSpec,
    hermitian: bool = True,
) -> np.ndarray:
    """Frames for symbol indices ``start .. start+count-1`` as a (count, N) array."""
    _check_n(N)
    X = np.zeros((count, N), dtype=complex)
    pts, M = constellation.points, constellation.order
    width = N // 2 - 1 if hermitian else N
    idx = np.empty((count, width), dtype=np.int64)
    for i in range(count):
        idx[i] = RandomStream(seed, start + i).integers(M, width)
    if hermitian:
        data = pts[idx]
        X[:, 1 : N // 2] = data
        X[:, N // 2 + 1 :] = np.conj(data[:, ::-1])
    else:
        X[:] = pts[idx]
    return X


def symbol_block(
    seed: int,
    start: int,
    count: int,
    N: int,
    constellation: ConstellationSpec,
    hermitian: bool = True,
) -> np.ndarray:
    """Time-domain samples for a contiguous range of symbol indices."""
    X = frame_block(seed, start, count, N, constellation, hermitian)
    step = max(1, _IDFT_BATCH_SAMPLES // N)
    x = np.concatenate([ifft_radix2(X[i : i + step]) for i in range(0, count, step)])
    return _to_real(x) if hermitian else x


def batch_generate(
    count: int,
    N: int,
    constellation: ConstellationSpec,
    seed: int,
    hermitian: bool = True,
) -> Iterator[TimeSymbol]:
    """Stream ``count`` symbols; symbol ``i`` uses substream ``(seed, i)``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    _check_n(N)
    for i in range(count):
        yield idft(random_frame(N, constellation, RandomStream(seed, i), hermitian))
