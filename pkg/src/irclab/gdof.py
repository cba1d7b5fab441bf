"""GDoF expressions, upper bounds and regime classification for the strong-interference IRC.

All rates are in bits (base-2 logarithms). GDoF values are normalized by
``0.5*log2(P h_d^2)`` and are therefore base invariant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gaussian.model import GaussianChannel

BOUNDARY_TOL = 1e-9

# Labels of the four terms of the achievable GDoF, in tie-breaking order.
TERM_RELAY_LIMIT = "2max(1,beta)"
TERM_FUTURE_LIMIT = "max(alpha,beta)+gamma-alpha"
TERM_SOURCE_LIMIT = "gamma+alpha"
TERM_NEW = "alpha+beta"
GDOF_TERMS = (TERM_RELAY_LIMIT, TERM_FUTURE_LIMIT, TERM_SOURCE_LIMIT, TERM_NEW)

# Labels of the four terms of the known bound.
KNOWN_TERMS = ("2max(1,beta)", "2max(1,gamma)", "max(alpha,beta)+(gamma-alpha)+", "gamma+alpha")


class OutOfScopeError(ValueError):
    """Raised when the closed-form GDoF is requested outside ``1 < alpha < gamma``."""


class DegenerateChannelError(ValueError):
    pass


def c_of(x: float) -> float:
    """``0.5*log2(1 + x)``; defined for ``x > -1``."""
    if not 1.0 + x > 0.0:
        raise ValueError(f"C(x) needs 1 + x > 0, got x={x}")
    return 0.5 * math.log2(1.0 + x)


def c_plus(x: float) -> float:
    """``max(0, C(x))``."""
    return max(0.0, c_of(x))


@dataclass(frozen=True)
class GdofParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")

    @property
    def strong_interference(self) -> bool:
        return self.alpha > 1

    @property
    def in_theorem_scope(self) -> bool:
        return 1 < self.alpha < self.gamma


class Regime(enum.Enum):
    FUTURE_RICH = "FutureRich"          # 2 alpha < gamma
    BOUNDARY = "Boundary"               # 2 alpha == gamma
    FUTURE_LIMITED = "FutureLimited"    # 2 alpha > gamma
    OUT_OF_SCOPE = "OutOfTheoremScope"


@dataclass(frozen=True)
class GdofPoint:
    params: GdofParams
    bound_new: float
    bound_known: float
    gdof_irc: Optional[float]
    gdof_ic: float
    binding_term: str
    regime: Regime

    @property
    def min_bound(self) -> float:
        return min(self.bound_new, self.bound_known)


def exponents_from_gains(ch: GaussianChannel) -> GdofParams:
    snr = ch.P * ch.h_d**2
    if snr <= 1:
        raise DegenerateChannelError(f"P*h_d^2 must exceed 1, got {snr}")
    if 0 in (ch.h_c, ch.h_r, ch.h_s):
        raise DegenerateChannelError("all gains must be nonzero")
    denom = math.log(snr)
    return GdofParams(
        alpha=math.log(ch.P * ch.h_c**2) / denom,
        beta=math.log(ch.P * ch.h_r**2) / denom,
        gamma=math.log(ch.P * ch.h_s**2) / denom,
    )


def bound_new(p: GdofParams) -> float:
    return p.alpha + p.beta


def known_bound_terms(p: GdofParams) -> tuple[float, float, float, float]:
    a, b, g = p.alpha, p.beta, p.gamma
    return (2 * max(1.0, b), 2 * max(1.0, g), max(a, b) + max(g - a, 0.0), g + a)


def bound_known(p: GdofParams) -> tuple[float, str]:
    """Minimum of the four previously known bounds and the label of the (first) minimizer."""
    terms = known_bound_terms(p)
    i = int(np.argmin(terms))
    return terms[i], KNOWN_TERMS[i]


def gdof_terms(p: GdofParams) -> tuple[float, float, float, float]:
    a, b, g = p.alpha, p.beta, p.gamma
    return (2 * max(1.0, b), max(a, b) + g - a, g + a, a + b)


def binding_term(p: GdofParams) -> str:
    terms = gdof_terms(p)
    return GDOF_TERMS[int(np.argmin(terms))]


def gdof_irc(p: GdofParams) -> float:
    if not p.in_theorem_scope:
        raise OutOfScopeError(f"closed form holds only for 1 < alpha < gamma, got {p}")
    return min(gdof_terms(p))


def gdof_ic(p: GdofParams) -> float:
    """GDoF of the interference channel without relay (strong interference)."""
    return min(p.alpha, 2.0)


def classify_regime(p: GdofParams, tol: float = BOUNDARY_TOL) -> Regime:
    if not p.in_theorem_scope:
        return Regime.OUT_OF_SCOPE
    gap = 2 * p.alpha - p.gamma
    if abs(gap) <= tol:
        return Regime.BOUNDARY
    return Regime.FUTURE_RICH if gap < 0 else Regime.FUTURE_LIMITED


def evaluate(p: GdofParams) -> GdofPoint:
    known, _ = bound_known(p)
    return GdofPoint(
        params=p,
        bound_new=bound_new(p),
        bound_known=known,
        gdof_irc=gdof_irc(p) if p.in_theorem_scope else None,
        gdof_ic=gdof_ic(p),
        binding_term=binding_term(p),
        regime=classify_regime(p),
    )


def alpha_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid ``start, start+step, ..., stop`` free of accumulated rounding."""
    if not step > 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError(f"empty alpha range [{start}, {stop}]")
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def sweep(alpha_range: tuple[float, float, float], beta: float, gamma: float) -> list[GdofPoint]:
    """Evaluate every bound along an alpha grid ``(start, stop, step)`` with beta, gamma fixed."""
    start, stop, step = alpha_range
    if start < 0 or stop > gamma + 1:
        raise ValueError(f"alpha range must lie within [0, gamma+1] = [0, {gamma + 1}]")
    grid = alpha_grid(start, stop, step)
    if grid.size == 0:
        raise ValueError("empty alpha range")
    return [evaluate(GdofParams(float(a), beta, gamma)) for a in grid]


SWEEP_COLUMNS = ("alpha", "bound_new", "bound_known", "gdof_irc", "gdof_ic", "binding_term", "regime")


def point_row(pt: GdofPoint) -> dict:
    return {
        "alpha": pt.params.alpha,
        "bound_new": pt.bound_new,
        "bound_known": pt.bound_known,
        "gdof_irc": pt.gdof_irc,
        "gdof_ic": pt.gdof_ic,
        "binding_term": pt.binding_term,
        "regime": pt.regime.value,
    }
