"""Piecewise-cosine characteristic family of G-normal distributions.

phi_beta is the 2*pi-periodic C^2 function built from two cosine branches on a
fundamental interval; it is an eigenfunction of the G-heat semigroup with decay
rate sigma^2/2 when beta matches the generator's volatility ratio.  All
evaluators accept scalars or ndarrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GFunction, beta_of, g_eval, sigma_of

__all__ = [
    "PhiParams",
    "EigenRate",
    "phi_eval",
    "phi_d1",
    "phi_d2",
    "phi_family_eval",
    "separation_gap",
    "eigen_residual",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhiParams:
    """Member lam * phi_beta(c*x + theta) of the scaled characteristic family."""

    beta: float
    lam: float = 1.0
    c: float = 1.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta >= 1.0):
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not (math.isfinite(self.c) and math.isfinite(self.theta)):
            raise ValueError("c and theta must be finite")


@dataclass(frozen=True)
class EigenRate:
    """Decay-rate parameter of the separated solution exp(-rho^2 t / 2) phi(x)."""

    rho: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and self.rho >= 0.0):
            raise ValueError(f"rho must be >= 0, got {self.rho}")

    @classmethod
    def canonical(cls, g: GFunction) -> "EigenRate":
        """Rate attained by phi_{beta_g} under generator g: the midpoint volatility."""
        return cls(sigma_of(g))


def _check_beta(beta: float) -> float:
    if not (math.isfinite(beta) and beta >= 1.0):
        raise ValueError(f"beta must be >= 1, got {beta}")
    return float(beta)


def _reduce(beta: float, x):
    """Map x into the fundamental interval [-pi/(1+beta), (2*beta+1)*pi/(1+beta))."""
    s = math.pi / (1.0 + beta)
    xr = x - TWO_PI * np.floor((x + s) / TWO_PI)
    # guard against rounding pushing the reduction onto the right endpoint
    return np.where(xr >= TWO_PI - s, xr - TWO_PI, xr)


def _branches(beta: float, x):
    xr = _reduce(beta, x)
    s = math.pi / (1.0 + beta)
    first = xr < s
    arg1 = 0.5 * (1.0 + beta) * xr
    arg2 = (1.0 + beta) / (2.0 * beta) * xr + (beta - 1.0) / (2.0 * beta) * math.pi
    return first, arg1, arg2


def _as_input(x, out):
    return float(out) if np.ndim(x) == 0 else out


def phi_eval(beta: float, x):
    """Two-branch piecewise cosine; range [-2*beta/(1+beta), 2/(1+beta)]."""
    beta = _check_beta(beta)
    first, arg1, arg2 = _branches(beta, x)
    out = np.where(
        first,
        2.0 / (1.0 + beta) * np.cos(arg1),
        2.0 * beta / (1.0 + beta) * np.cos(arg2),
    )
    return _as_input(x, out)


def phi_d1(beta: float, x):
    """First derivative of phi_eval; continuous across branch junctions."""
    beta = _check_beta(beta)
    first, arg1, arg2 = _branches(beta, x)
    out = np.where(first, -np.sin(arg1), -np.sin(arg2))
    return _as_input(x, out)


def phi_d2(beta: float, x):
    """Second derivative of phi_eval; continuous across branch junctions."""
    beta = _check_beta(beta)
    first, arg1, arg2 = _branches(beta, x)
    out = np.where(
        first,
        -0.5 * (1.0 + beta) * np.cos(arg1),
        -(1.0 + beta) / (2.0 * beta) * np.cos(arg2),
    )
    return _as_input(x, out)


def phi_family_eval(p: PhiParams, x):
    """Evaluate lam * phi_beta(c*x + theta)."""
    return p.lam * phi_eval(p.beta, np.multiply(x, p.c) + p.theta)


def separation_gap(alpha: float, beta: float) -> float:
    """Uniform lower bound 2*(beta-alpha)/((1+alpha)*(1+beta)) on phi_alpha - phi_beta."""
    if not (1.0 <= alpha <= beta):
        raise ValueError(f"need 1 <= alpha <= beta, got alpha={alpha}, beta={beta}")
    return 2.0 * (beta - alpha) / ((1.0 + alpha) * (1.0 + beta))


def eigen_residual(g: GFunction, beta: float, n_samples: int) -> float:
    """Max of |G(phi'') + (sigma^2/2) * phi| over one period.

    The identity holds only when beta equals the generator's volatility ratio;
    any mismatch is rejected rather than silently producing a large residual.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    beta_g = beta_of(g)
    if not math.isclose(beta, beta_g, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(
            f"beta = {beta} does not match the generator's ratio {beta_g}"
        )
    start = -math.pi / (1.0 + beta)
    xs = start + TWO_PI * np.arange(n_samples) / n_samples
    half_rate = 0.5 * sigma_of(g) ** 2
    res = g_eval(g, phi_d2(beta, xs)) + half_rate * phi_eval(beta, xs)
    return float(np.max(np.abs(res)))
