"""Derivative-free power allocation for the achievable sum rate, and GDoF slope estimation.

Powers are parameterized on the GDoF scale: a component with exponent ``e``
gets ``P * snr**(-e)`` where ``snr = P h_d^2`` (``e = inf`` switches it off).
The search starts from layouts suggested by the regime (how much future CN the
relay can absorb) and improves them by coordinate ascent on an exponent grid,
then refines the grid locally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..gdof import GdofParams, Regime, classify_regime
from .model import GaussianChannel, PowerAllocation, RateAllocation
from .rates import achievable_sum_rate, half_log_snr, upper_bound_sumrate

OFF = math.inf
MAX_SPLITS = 8
EXPONENT_KEYS = ("cn", "cnF", "cf", "df", "cm", "r_cf", "r_df")


@dataclass(frozen=True)
class OptimizerConfig:
    W: int = 2
    L: int = 2
    grid_step: float = 0.05
    tol: float = 1e-4
    max_sweeps: int = 40
    refine_levels: int = 3
    seed_exponents: Optional[dict] = None

    def __post_init__(self):
        if not (1 <= self.W <= MAX_SPLITS and 1 <= self.L <= MAX_SPLITS):
            raise ValueError(f"W and L must lie in 1..{MAX_SPLITS}")
        if not self.grid_step > 0 or not self.tol > 0:
            raise ValueError("grid_step and tol must be positive")
        if self.max_sweeps < 1 or self.refine_levels < 0:
            raise ValueError("max_sweeps must be >= 1 and refine_levels >= 0")
        if self.seed_exponents is not None:
            unknown = set(self.seed_exponents) - set(EXPONENT_KEYS)
            if unknown:
                raise ValueError(f"unknown seed exponent keys: {sorted(unknown)}")


class _Layout:
    """Maps between a flat exponent vector and named components."""

    def __init__(self, W: int, L: int):
        self.W, self.L = W, L
        self.slices = {
            "cn": slice(0, W),
            "cnF": slice(W, 2 * W),
            "cf": slice(2 * W, 2 * W + L),
            "df": slice(2 * W + L, 2 * W + L + 1),
            "cm": slice(2 * W + L + 1, 2 * W + L + 2),
            "r_cf": slice(2 * W + L + 2, 2 * W + L + 3),
            "r_df": slice(2 * W + L + 3, 2 * W + L + 4),
        }
        self.size = 2 * W + L + 4

    def empty(self) -> np.ndarray:
        return np.full(self.size, OFF)

    def from_dict(self, d: dict) -> np.ndarray:
        e = self.empty()
        for key, val in d.items():
            vals = np.atleast_1d(np.asarray(val, dtype=float))
            sl = self.slices[key]
            n = sl.stop - sl.start
            e[sl.start:sl.start + min(n, vals.size)] = vals[:n]
        return e


def allocation_from_exponents(ch: GaussianChannel, e: np.ndarray, W: int, L: int) -> PowerAllocation:
    """Feasible allocation for exponent vector ``e``.

    Transmit powers are scaled down together when they overshoot ``P``; the relay
    trio (CN, CF, DF) likewise, with the CN scaling pushed back to the
    transmitters since the relay's CN power is tied to theirs.
    """
    lay = _Layout(W, L)
    snr = ch.P * ch.h_d**2
    with np.errstate(over="ignore"):
        raw = np.where(np.isinf(e), 0.0, ch.P * snr ** (-np.asarray(e, dtype=float)))
    tx = raw[: 2 * W + L + 2].copy()
    total = tx.sum()
    if total > ch.P:
        tx *= ch.P / total
    cn = np.sort(tx[:W])[::-1]
    cnF, cf = tx[W:2 * W], tx[2 * W:2 * W + L]
    df, cm = tx[2 * W + L], tx[2 * W + L + 1]
    r_cf, r_df = raw[lay.slices["r_cf"]][0], raw[lay.slices["r_df"]][0]
    r_cn = (ch.h_c**2 / ch.h_r**2) * cn.sum() if ch.h_r != 0 else (math.inf if cn.sum() > 0 else 0.0)
    relay_total = r_cn + r_cf + r_df
    if relay_total > ch.P:
        f = ch.P / relay_total
        cn, r_cf, r_df = cn * f, r_cf * f, r_df * f
    return PowerAllocation(
        P_cn=tuple(cn), P_cnF=tuple(cnF), P_cf=tuple(cf),
        P_df=float(df), P_cm=float(cm), P_r_cf=float(r_cf), P_r_df=float(r_df),
    )


def regime_seeds(params: GdofParams, W: int, L: int) -> list[np.ndarray]:
    """Starting exponent layouts derived from the received-level picture of each regime.

    Each CN split can carry ``alpha - 1`` GDoF before its own direct copy
    swamps it, so current splits are stacked ``alpha - 1`` apart from the top
    and their future parts start ``alpha`` down (just under the cross
    receiver's noise floor) so the relay still hears them. When the relay
    cannot absorb all of that future stack, CN is shortened and a CF split
    takes the top level instead.
    """
    lay = _Layout(W, L)
    a, g = params.alpha, params.gamma
    step = a - 1 if a > 1 else 0.5
    seeds = []

    def cn_stack(first_level: float, budget: float):
        n = min(W, max(1, int(math.floor(budget / step + 1e-9))))
        cn = [first_level + w * step for w in range(n)]
        fut = [a + w * step for w in range(n)]
        return cn, fut

    regime = classify_regime(params)
    rich_budget = a if regime in (Regime.FUTURE_RICH, Regime.BOUNDARY) else max(g - a, step)
    cn, fut = cn_stack(0.0, min(a, rich_budget) + step - 1e-9)
    seeds.append(lay.from_dict({"cn": cn, "cnF": fut, "df": 0.0, "r_df": 0.0}))
    cn, fut = cn_stack(step, max(min(g - a, a) , step))
    seeds.append(lay.from_dict({"cn": cn, "cnF": fut, "cf": 0.0, "df": 0.0, "r_df": 0.0, "r_cf": 0.0}))
    seeds.append(lay.from_dict({"df": 0.0, "r_df": 0.0}))
    seeds.append(lay.from_dict({"cf": 0.0, "r_cf": 0.0}))
    seeds.append(lay.from_dict({"cm": 0.0}))
    return seeds


def _search_exponents(ch: GaussianChannel) -> GdofParams:
    """Exponent ratios used to place the grid and seeds; links weaker than noise count as 0."""
    snr = ch.P * ch.h_d**2
    if snr <= 1:
        raise ValueError(f"P*h_d^2 must exceed 1, got {snr}")

    def ratio(h):
        return max(math.log(ch.P * h * h) / math.log(snr), 0.0) if h != 0 else 0.0

    return GdofParams(ratio(ch.h_c), ratio(ch.h_r), ratio(ch.h_s))


@dataclass
class OptimizeResult:
    allocation: PowerAllocation
    rates: RateAllocation
    exponents: np.ndarray
    iterations: int
    last_improvement: float
    evaluations: int

    @property
    def sum_rate(self) -> float:
        return self.rates.sum_rate

    def __iter__(self):
        yield self.allocation
        yield self.rates


def optimize_powers(ch: GaussianChannel, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizeResult:
    """Maximize the achievable sum rate over power allocations.

    Deterministic for a given ``(ch, cfg)``. Requires strong interference.
    """
    if not ch.strong_interference:
        raise ValueError("power optimization targets strong interference (h_c^2 > h_d^2)")
    params = _search_exponents(ch)
    W, L = cfg.W, cfg.L
    e_max = max(params.alpha, params.beta, params.gamma, 1.0) + 1.0
    grid = np.append(np.arange(0.0, e_max + 1e-9, cfg.grid_step), OFF)
    evals = 0

    def score(e):
        nonlocal evals
        evals += 1
        return achievable_sum_rate(ch, allocation_from_exponents(ch, e, W, L), check=False).sum_rate

    def ascend(e, candidates_for):
        best = score(e)
        sweeps, gain = 0, 0.0
        for sweeps in range(1, cfg.max_sweeps + 1):
            start = best
            for i in range(e.size):
                keep = e[i]
                for v in candidates_for(e[i]):
                    if v == keep:
                        continue
                    e[i] = v
                    s = score(e)
                    if s > best + 1e-12:
                        best, keep = s, v
                e[i] = keep
            gain = best - start
            if gain < cfg.tol:
                break
        return e, best, sweeps, gain

    seeds = regime_seeds(params, W, L)
    if cfg.seed_exponents:
        seeds.insert(0, _Layout(W, L).from_dict(cfg.seed_exponents))

    best_e, best_val, iterations, last_gain = None, -1.0, 0, 0.0
    for seed in seeds:
        e, val, sweeps, gain = ascend(seed.copy(), lambda _: grid)
        iterations += sweeps
        if val > best_val + 1e-12:
            best_e, best_val, last_gain = e, val, gain

    h = cfg.grid_step
    for _ in range(cfg.refine_levels):
        h /= 2

        def local(v, h=h):
            if math.isinf(v):
                return grid
            return [x for x in (v - 2 * h, v - h, v + h, v + 2 * h, OFF) if x >= 0]

        best_e, best_val, sweeps, last_gain = ascend(best_e, local)
        iterations += sweeps

    pa = allocation_from_exponents(ch, best_e, W, L)
    pa.check(ch)
    return OptimizeResult(
        allocation=pa, rates=achievable_sum_rate(ch, pa), exponents=best_e,
        iterations=iterations, last_improvement=last_gain, evaluations=evals,
    )


@dataclass
class GdofEstimate:
    slope: float
    intercept: float
    snrs: list[float]
    sum_rates: list[float]
    upper_bounds: list[float]
    results: list[OptimizeResult] = field(repr=False, default_factory=list)


def estimate_gdof(pattern: GdofParams, snr_list: Sequence[float], cfg: OptimizerConfig = OptimizerConfig()) -> GdofEstimate:
    """Least-squares slope of the optimized sum rate against ``0.5*log2(P h_d^2)``.

    Gains are synthesized at each SNR so the exponent ratios equal ``pattern``.
    """
    snrs = [float(s) for s in snr_list]
    if len(snrs) < 2:
        raise ValueError("at least two SNR points are needed for a slope")
    if any(b <= a for a, b in zip(snrs, snrs[1:])):
        raise ValueError("SNR points must be strictly ascending")
    xs, ys, ubs, results = [], [], [], []
    for snr in snrs:
        ch = GaussianChannel.from_exponents(pattern.alpha, pattern.beta, pattern.gamma, snr)
        res = optimize_powers(ch, cfg)
        results.append(res)
        xs.append(half_log_snr(ch))
        ys.append(res.sum_rate)
        ubs.append(upper_bound_sumrate(ch))
    slope, intercept = np.polyfit(xs, ys, 1)
    return GdofEstimate(float(slope), float(intercept), snrs, ys, ubs, results)
