"""Numerical verification harness for the eigenfunction decay, the separation
inequality, the convolution closure criterion, and the commutativity criterion.

Every checker returns a TheoremReport whose verdict is 'confirmed' only when
the decisive margin stays positive after subtracting two-grid error estimates;
when error bars swamp the theoretical gap the verdict is 'inconclusive'.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .charfun import PhiParams, phi_eval, separation_gap
from .expectation import (
    ClippedAbsSpec,
    ClippedPolySpec,
    CosineSpec,
    ExpectConfig,
    GaussBumpSpec,
    PhiSpec,
    TestFunctionSpec,
    candidate_normal,
    convolve_expect,
    expect,
    expect_scaled,
)
from .model import DegenerateGeneratorError, GFunction, beta_of, sigma_of

__all__ = [
    "SweepPoint",
    "TheoremReport",
    "check_eigen_decay",
    "verify_theorem1",
    "verify_theorem2",
    "check_separation",
    "SWEEP_DEFAULT",
    "EXIT_CODES",
]

SWEEP_DEFAULT = (0.5, 1.0, 2.0, 4.0, 8.0)
SWEEP_CONFIG = ExpectConfig(n=1024)

EXIT_CODES = {"confirmed": 0, "violated": 1, "inconclusive": 2}


@dataclass(frozen=True)
class SweepPoint:
    t: float
    measured: float
    reference: float
    error_estimate: float
    x: float = 0.0
    bound: Optional[float] = None


@dataclass(frozen=True)
class TheoremReport:
    name: str
    verdict: str
    sweep: tuple[SweepPoint, ...]
    margin: float
    tolerances: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


def _require_nondegenerate(*gs: GFunction) -> None:
    for g in gs:
        if g.is_degenerate:
            raise DegenerateGeneratorError(
                "theorem checkers require sigma_lo > 0"
            )


def check_eigen_decay(
    g: GFunction,
    t_list: Sequence[float],
    probes: Sequence[float] = (0.0, math.pi / 3.0, math.pi),
    tol: float = 1e-3,
    cfg: ExpectConfig = SWEEP_CONFIG,
) -> TheoremReport:
    """Compare u(t, x) for initial phi_{beta_g} against exp(-sigma^2 t/2) phi(x)."""
    _require_nondegenerate(g)
    beta = beta_of(g)
    sigma = sigma_of(g)
    f = PhiSpec(PhiParams(beta))
    points: list[SweepPoint] = []
    margin = math.inf
    for t in t_list:
        for x in probes:
            res = expect_scaled(g, f, t, x, cfg)
            ref = math.exp(-0.5 * sigma**2 * t) * phi_eval(beta, x)
            points.append(SweepPoint(t, res.value, ref, res.error_estimate, x=x))
            margin = min(margin, tol + res.error_estimate - abs(res.value - ref))
    if not points:
        return TheoremReport("eigen-decay", "inconclusive", (), 0.0, {"tol": tol})
    verdict = "confirmed" if margin > 0.0 else "violated"
    return TheoremReport("eigen-decay", verdict, tuple(points), margin, {"tol": tol})


_CLOSURE_BATTERY: tuple[TestFunctionSpec, ...] = (
    CosineSpec(1.0, 0.0),
    GaussBumpSpec(0.0, 1.5),
    ClippedAbsSpec(6.0),
    ClippedPolySpec((0.5, 0.3, 0.05), 6.0),
)


def _betas_equal(b1: float, b2: float) -> bool:
    return math.isclose(b1, b2, rel_tol=1e-12, abs_tol=1e-12)


def verify_theorem1(
    g1: GFunction,
    g2: GFunction,
    t_list: Sequence[float] = SWEEP_DEFAULT,
    tol: float = 5e-3,
    cfg: ExpectConfig = SWEEP_CONFIG,
) -> TheoremReport:
    """Closure check: the convolution is G-normal iff the volatility ratios match.

    Equal ratios: the convolution must reproduce the candidate generator's
    expectation on the scaled characteristic function for every t and on a
    four-function battery.  Unequal ratios: some t must separate the measured
    convolution from the candidate prediction by at least half the separation
    gap, after error bars.
    """
    _require_nondegenerate(g1, g2)
    b1, b2 = beta_of(g1), beta_of(g2)
    cand = candidate_normal(g1, g2)
    beta_n = beta_of(cand)
    sigma_n = sigma_of(cand)
    equal = _betas_equal(b1, b2)
    b_big = max(b1, b2)
    floor = 0.0 if equal else separation_gap(min(beta_n, b_big), max(beta_n, b_big))

    points: list[SweepPoint] = []
    diffs: list[tuple[float, float]] = []  # (diff - err, diff + err)
    for t in t_list:
        f = PhiSpec(PhiParams(beta_n, 1.0, math.sqrt(t), 0.0))
        conv = convolve_expect([g1, g2], f, cfg)
        pred = 2.0 / (1.0 + beta_n) * math.exp(-0.5 * sigma_n**2 * t)
        bound = None
        if not equal and b2 == b_big:
            # explicit lower-bound curve from the inner generator's branch
            bound = (-2.0 * b2 / (1.0 + b2) * math.exp(-0.5 * sigma_of(g2) ** 2 * t)
                     + separation_gap(min(beta_n, b2), max(beta_n, b2)))
        points.append(SweepPoint(t, conv.value, pred, conv.error_estimate, bound=bound))
        dev = abs(conv.value - pred)
        diffs.append((dev - conv.error_estimate, dev + conv.error_estimate))

    tolerances = {"tol": tol, "separation_floor": floor}
    if not points:
        return TheoremReport("theorem1", "inconclusive", (), 0.0, tolerances)

    if equal:
        margin = min(tol + p.error_estimate - abs(p.measured - p.reference) for p in points)
        battery_ok = True
        for f in _CLOSURE_BATTERY:
            conv = convolve_expect([g1, g2], f, cfg)
            ref = expect(cand, f, cfg)
            err = conv.error_estimate + ref.error_estimate
            slack = tol + err - abs(conv.value - ref.value)
            margin = min(margin, slack)
            battery_ok = battery_ok and slack > 0.0
        verdict = "confirmed" if margin > 0.0 and battery_ok else "violated"
        return TheoremReport("theorem1", verdict, tuple(points), margin, tolerances)

    best_pessimistic = max(lo for lo, _ in diffs)
    best_optimistic = max(hi for _, hi in diffs)
    margin = best_pessimistic - 0.5 * floor
    if margin > 0.0:
        verdict = "confirmed"
    elif best_optimistic >= 0.5 * floor:
        verdict = "inconclusive"
    else:
        verdict = "violated"
    return TheoremReport("theorem1", verdict, tuple(points), margin, tolerances)


def verify_theorem2(
    g1: GFunction,
    g2: GFunction,
    t_list: Sequence[float] = SWEEP_DEFAULT,
    tol: float = 5e-3,
    cfg: ExpectConfig = SWEEP_CONFIG,
) -> TheoremReport:
    """Commutativity check: the two convolution orders agree iff ratios match.

    The probe function is the characteristic member of the smaller ratio; the
    gap is forward minus reverse order at x = 0.
    """
    _require_nondegenerate(g1, g2)
    b1, b2 = beta_of(g1), beta_of(g2)
    if b1 > b2:
        g1, g2 = g2, g1
        b1, b2 = b2, b1
    equal = _betas_equal(b1, b2)
    floor = 0.0 if equal else separation_gap(b1, b2)

    points: list[SweepPoint] = []
    gaps: list[tuple[float, float]] = []
    for t in t_list:
        f = PhiSpec(PhiParams(b1, 1.0, math.sqrt(t), 0.0))
        fwd = convolve_expect([g1, g2], f, cfg)
        rev = convolve_expect([g2, g1], f, cfg)
        err = fwd.error_estimate + rev.error_estimate
        gap = fwd.value - rev.value
        points.append(SweepPoint(t, fwd.value, rev.value, err))
        gaps.append((gap - err, gap + err))

    tolerances = {"tol": tol, "separation_floor": floor}
    if not points:
        return TheoremReport("theorem2", "inconclusive", (), 0.0, tolerances)

    if equal:
        margin = min(tol + (hi - lo) / 2.0 - abs((hi + lo) / 2.0) for lo, hi in gaps)
        verdict = "confirmed" if margin > 0.0 else "violated"
        return TheoremReport("theorem2", verdict, tuple(points), margin, tolerances)

    best_pessimistic = max(lo for lo, _ in gaps)
    best_optimistic = max(hi for _, hi in gaps)
    margin = best_pessimistic - 0.5 * floor
    if margin > 0.0:
        verdict = "confirmed"
    elif best_optimistic >= 0.5 * floor:
        verdict = "inconclusive"
    else:
        verdict = "violated"
    return TheoremReport("theorem2", verdict, tuple(points), margin, tolerances)


def check_separation(
    alpha: float,
    beta: float,
    n_grid: int = 100001,
    grid_tol: float = 1e-9,
    zero_tol: float = 1e-12,
) -> TheoremReport:
    """Grid scan of phi_alpha - phi_beta against the uniform gap bound.

    The bound is tight at x = 0, so the scan additionally checks the value
    there to near machine precision.
    """
    if not (1.0 <= alpha < beta):
        raise ValueError(f"need 1 <= alpha < beta, got alpha={alpha}, beta={beta}")
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    gap = separation_gap(alpha, beta)
    xs = 2.0 * math.pi * np.arange(n_grid) / n_grid
    diff = phi_eval(alpha, xs) - phi_eval(beta, xs)
    min_diff = float(np.min(diff))
    at_zero = float(diff[0])
    margin = min_diff - gap + grid_tol
    tight = abs(at_zero - gap) <= zero_tol
    verdict = "confirmed" if margin > 0.0 and tight else "violated"
    points = (
        SweepPoint(0.0, min_diff, gap, 0.0, x=float(xs[int(np.argmin(diff))])),
        SweepPoint(0.0, at_zero, gap, 0.0, x=0.0),
    )
    return TheoremReport(
        "separation", verdict, points, margin,
        {"grid_tol": grid_tol, "zero_tol": zero_tol, "gap": gap},
    )
