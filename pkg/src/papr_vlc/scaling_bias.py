"""LED front end: scaling, biasing and dynamic-range bookkeeping.

A drive symbol is ``y[n] = alpha * x[n] + B`` and must stay inside
``[i_low, i_high]``.  Plans whose biasing ratio exceeds 0.5 are handled by
reflection: the symbol is built for the mirrored bias ``i_high + i_low - B``
and then mapped back with ``s[n] = i_high + i_low - y[n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ofdm_signal import TimeSymbol, ensemble_variance
from .papr_stats import peak_arrays, symbol_extrema


@dataclass(frozen=True)
class BiasScalePlan:
    """Dynamic range, bias and scaling mode.

    ``gamma`` is the linear power back-off ``D**2 / (alpha**2 sigma_x**2)``
    for symbol-invariant scaling; ``gamma=None`` selects symbol-variant
    (greatest per-symbol) scaling.
    """

    i_low: float
    i_high: float
    bias: float
    gamma: float | None = None
    reflected: bool = field(init=False)

    def __post_init__(self):
        if not self.i_high > self.i_low:
            raise ValueError("i_high must exceed i_low")
        if not self.i_low < self.bias < self.i_high:
            raise ValueError("bias must lie strictly inside (i_low, i_high)")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("back-off gamma must be > 0")
        object.__setattr__(self, "reflected", self.requested_ratio > 0.5)

    @classmethod
    def normalized(cls, varsigma: float, gamma: float | None = None) -> "BiasScalePlan":
        """Plan on the unit range ``[0, 1]`` with bias at ``varsigma``."""
        return cls(0.0, 1.0, varsigma, gamma)

    @property
    def mode(self) -> str:
        return "symbol_variant" if self.gamma is None else "fixed_backoff"

    @property
    def dynamic_range(self) -> float:
        return self.i_high - self.i_low

    @property
    def requested_ratio(self) -> float:
        return (self.bias - self.i_low) / self.dynamic_range

    @property
    def effective_bias(self) -> float:
        return self.i_high + self.i_low - self.bias if self.reflected else self.bias

    @property
    def varsigma(self) -> float:
        """Biasing ratio after reflection, always in (0, 0.5]."""
        return (self.effective_bias - self.i_low) / self.dynamic_range


@dataclass(frozen=True)
class DriveSymbol:
    y: np.ndarray
    alpha: float
    clipped: bool
    clip_count: int


def backoff_alpha(plan: BiasScalePlan, sigma2: float) -> float:
    """Scaling that realises the plan's back-off for signal variance ``sigma2``."""
    if plan.gamma is None:
        raise ValueError("symbol-variant plan has no fixed back-off")
    return plan.dynamic_range / (math.sqrt(plan.gamma) * math.sqrt(sigma2))


def greatest_alpha(sym: TimeSymbol, plan: BiasScalePlan) -> float:
    """Largest scaling that keeps ``alpha * x + B`` inside the range.

    Uses the plan's effective (possibly reflected) bias.
    """
    if not sym.is_real:
        raise TypeError("greatest_alpha needs a real-mode symbol")
    hi = float(np.max(sym.x))
    lo = float(np.min(sym.x))
    if not (hi > 0 and lo < 0):
        raise ValueError("symbol must have both positive and negative samples")
    b = plan.effective_bias
    return min((plan.i_high - b) / hi, (plan.i_low - b) / lo)


def scale_and_bias(sym: TimeSymbol, plan: BiasScalePlan, saturate: bool = False) -> DriveSymbol:
    """Apply ``y = alpha x + B``.

    Fixed back-off only counts out-of-range samples; ``saturate=True`` also
    clamps them (not part of any probability computation).
    """
    if not sym.is_real:
        raise TypeError("scale_and_bias needs a real-mode symbol")
    if plan.gamma is None:
        alpha = greatest_alpha(sym, plan)
    else:
        alpha = backoff_alpha(plan, sym.sigma2)
    y = alpha * sym.x + plan.effective_bias
    # decided before reflecting so mirrored plans count identically
    outside = (y < plan.i_low) | (y > plan.i_high)
    if plan.reflected:
        y = plan.i_high + plan.i_low - y
    if plan.gamma is None:
        # rounding in alpha * x + B may overshoot the boundary sample by an ulp
        y = np.clip(y, plan.i_low, plan.i_high)
        outside[:] = False
    elif saturate:
        y = np.clip(y, plan.i_low, plan.i_high)
    count = int(np.count_nonzero(outside))
    return DriveSymbol(y, alpha, count > 0, count)


def violation_rate_mc(plan: BiasScalePlan, N: int, M: int, symbols: int, seed: int) -> float:
    """Fraction of generated symbols with at least one sample out of range."""
    if plan.gamma is None:
        raise ValueError("symbol-variant plans never clip; use a fixed back-off plan")
    hi, lo = symbol_extrema(N, M, symbols, seed)
    b = plan.effective_bias
    alpha = backoff_alpha(plan, ensemble_variance(N))
    clip = (alpha * hi + b > plan.i_high) | (alpha * lo + b < plan.i_low)
    return float(np.count_nonzero(clip)) / symbols


def variance_mc(varsigma: float, N: int, M: int, symbols: int, seed: int, D: float = 1.0) -> float:
    """Monte Carlo ``D**2 E[min((1 - s)**2 / UPAPR, s**2 / LPAPR)]``."""
    if symbols < 1000:
        raise ValueError("symbols must be >= 1000")
    pk = peak_arrays(N, M, symbols, seed)
    with np.errstate(divide="ignore"):
        terms = np.minimum((1.0 - varsigma) ** 2 / pk["upapr"], varsigma**2 / pk["lpapr"])
    return D * D * float(np.mean(terms))
