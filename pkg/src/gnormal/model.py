"""Generators of one-dimensional G-normal distributions and time schedules.

A generator is the sublinear function G(a) = (sigma_hi^2 a+ - sigma_lo^2 a-)/2
parameterized by a volatility interval [sigma_lo, sigma_hi].  A Schedule is a
piecewise-constant-in-time generator, used by the solver for switched problems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateGeneratorError",
    "GFunction",
    "Schedule",
    "g_eval",
    "beta_of",
    "sigma_of",
    "generator_at",
]


class DegenerateGeneratorError(ValueError):
    """Operation requires sigma_lo > 0 but the generator is degenerate."""


@dataclass(frozen=True)
class GFunction:
    """Volatility-interval generator; immutable and validated on construction."""

    sigma_lo: float
    sigma_hi: float

    def __post_init__(self) -> None:
        lo, hi = self.sigma_lo, self.sigma_hi
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("volatility bounds must be finite")
        if not (0.0 <= lo <= hi) or hi <= 0.0:
            raise ValueError(
                f"need 0 <= sigma_lo <= sigma_hi and sigma_hi > 0, got ({lo}, {hi})"
            )

    @property
    def is_degenerate(self) -> bool:
        return self.sigma_lo == 0.0

    @property
    def beta(self) -> float:
        return beta_of(self)

    @property
    def sigma(self) -> float:
        return sigma_of(self)


def g_eval(g: GFunction, a):
    """Evaluate G(a); accepts a scalar or ndarray argument."""
    half_hi = 0.5 * g.sigma_hi**2
    half_lo = 0.5 * g.sigma_lo**2
    if np.ndim(a) == 0:
        a = float(a)
        return half_hi * a if a > 0.0 else half_lo * a
    a = np.asarray(a, dtype=float)
    return np.where(a > 0.0, half_hi * a, half_lo * a)


def beta_of(g: GFunction) -> float:
    """Volatility ratio sigma_hi / sigma_lo; undefined for degenerate generators."""
    if g.is_degenerate:
        raise DegenerateGeneratorError(
            "volatility ratio undefined for sigma_lo = 0"
        )
    return g.sigma_hi / g.sigma_lo


def sigma_of(g: GFunction) -> float:
    """Midpoint volatility (sigma_lo + sigma_hi) / 2."""
    return 0.5 * (g.sigma_lo + g.sigma_hi)


@dataclass(frozen=True)
class Schedule:
    """Ordered (generator, duration) segments; durations strictly positive."""

    segments: tuple[tuple[GFunction, float], ...]

    def __post_init__(self) -> None:
        if len(self.segments) == 0:
            raise ValueError("schedule must contain at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))
        for g, dur in self.segments:
            if not isinstance(g, GFunction):
                raise TypeError("schedule segments must pair a GFunction with a duration")
            if not (math.isfinite(dur) and dur > 0.0):
                raise ValueError(f"segment durations must be positive and finite, got {dur}")

    @property
    def total_duration(self) -> float:
        return sum(dur for _, dur in self.segments)

    @property
    def sigma_hi_max(self) -> float:
        return max(g.sigma_hi for g, _ in self.segments)

    @classmethod
    def single(cls, g: GFunction, duration: float = 1.0) -> "Schedule":
        return cls(((g, duration),))

    def scaled(self, factor: float) -> "Schedule":
        """Schedule with every duration multiplied by a positive factor."""
        if factor <= 0.0:
            raise ValueError("duration scale factor must be positive")
        return Schedule(tuple((g, d * factor) for g, d in self.segments))


def generator_at(s: Schedule, t: float) -> GFunction:
    """Generator active at time t.

    Segment boundaries belong to the earlier segment: segment k covers the
    half-open interval (c_{k-1}, c_k] of cumulative time.  t = 0 maps to the
    first segment.
    """
    total = s.total_duration
    if not (0.0 <= t <= total):
        raise ValueError(f"t = {t} outside schedule range [0, {total}]")
    if t == 0.0:
        return s.segments[0][0]
    cum = 0.0
    for g, dur in s.segments:
        cum += dur
        if t <= cum:
            return g
    return s.segments[-1][0]  # t == total up to rounding
