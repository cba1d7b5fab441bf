import math

import numpy as np
import pytest

from irclab.gdof import GdofParams, bound_known, bound_new
from irclab.gaussian.model import GaussianChannel, PowerAllocation, RateAllocation
from irclab.gaussian.optimize import (
    OptimizerConfig,
    allocation_from_exponents,
    estimate_gdof,
    optimize_powers,
    regime_seeds,
)
from irclab.gaussian.rates import (
    achievable_sum_rate,
    cap,
    cf_relay_first,
    cn_dest_cap_two_split,
    cn_relay_cap_two_split,
    destination_constraints,
    relay_constraints,
    upper_bound_sumrate,
)

import oracles
from sampling import draw_feasible

prop = pytest.mark.property


def gains(d2, c2, r2, s2, P):
    """Channel from received SNRs ``h^2 P``."""
    return GaussianChannel(math.sqrt(d2 / P), math.sqrt(c2 / P), math.sqrt(r2 / P), math.sqrt(s2 / P), P)


# --- model ---------------------------------------------------------------------

def test_channel_validation():
    with pytest.raises(ValueError):
        GaussianChannel(1, 2, 1, 1, 0)
    with pytest.raises(ValueError):
        GaussianChannel(1, math.inf, 1, 1, 1)
    assert GaussianChannel(1, 2, 1, 1, 1).strong_interference
    assert not GaussianChannel(2, 1, 1, 1, 1).strong_interference


def test_from_exponents():
    ch = GaussianChannel.from_exponents(1.2, 2, 3, 1e6)
    assert ch.P * ch.h_c**2 == pytest.approx(10**7.2, rel=1e-12)
    assert ch.P * ch.h_r**2 == pytest.approx(1e12, rel=1e-12)
    assert ch.P * ch.h_s**2 == pytest.approx(1e18, rel=1e-12)


def test_allocation_checks():
    ch = GaussianChannel(1, 2, 1, 1, 10)
    PowerAllocation((1.5, 0.5), (1, 1), (1,), P_df=1).check(ch)   # relay CN power 4 * 2 = 8
    with pytest.raises(ValueError, match="non-increasing"):
        PowerAllocation((0.5, 1), (0, 0), (0,)).check(ch)
    with pytest.raises(ValueError, match="transmitter budget"):
        PowerAllocation((1,), (5,), (5,)).check(ch)
    with pytest.raises(ValueError, match="relay budget"):
        PowerAllocation((3,), (0,), (0,)).check(ch)   # relay CN power 4 * 3 = 12 > 10
    with pytest.raises(ValueError, match="non-negative"):
        PowerAllocation((1,), (0,), (-1,)).check(ch)
    with pytest.raises(ValueError):
        PowerAllocation((1,), (0, 0), (0,))
    assert PowerAllocation((1.0,), (0.0,), (0.0,)).relay_cn_powers(ch) == (4.0,)


def test_rate_allocation_sum():
    r = RateAllocation(R_cn=(1.0, 0.5), R_cf=(0.25,), R_cm=0.125, R_df=0.125, R_r_cf=0.25)
    assert r.sum_rate == 4.0


# --- caps -----------------------------------------------------------------------

def test_cap_clamping():
    assert cap(0.0) == 0.0
    assert cap(0.4, 0.5) == 0.0
    assert cap(0.5, 0.5) == 0.0
    assert cap(1.5, 0.5) == 0.5
    assert cap(3.0, 1.0) == pytest.approx(0.5 * math.log2(3))


def test_zero_allocation_gives_zero_caps():
    ch = GaussianChannel.from_exponents(1.2, 2, 3, 1e4)
    pa = PowerAllocation.zeros(2, 2)
    for caps in (relay_constraints(ch, pa), destination_constraints(ch, pa)):
        assert all(v == 0.0 for d in caps.values() for v in d.values())
    assert achievable_sum_rate(ch, pa).sum_rate == 0.0


def test_single_split_relay_cn_cap():
    ch = gains(1e2, 1e3, 1e4, 1e6, 1.0)
    pa = PowerAllocation((0.0,), (1.0,), (0.0,))
    got = relay_constraints(ch, pa)["cn1"]["relay-cn"]
    assert got == pytest.approx(0.5 * math.log2(1e6 + 0.5), rel=1e-12)
    assert got == pytest.approx(9.966, abs=1e-3)


def test_two_equal_future_splits():
    ch = gains(1e2, 1e3, 1e4, 1e6, 2.0)
    pa = PowerAllocation((0.0, 0.0), (1.0, 1.0), (0.0,))
    hs2 = ch.h_s**2
    expected = oracles.Cp(hs2 * 1.0 / (2 * hs2 * 1.0 + 1) - 0.5)
    assert relay_constraints(ch, pa)["cn1"]["relay-cn"] == pytest.approx(expected, rel=1e-12)


def test_dest_cm_without_interference():
    ch = gains(1e4, 1e6, 1e8, 1e7, 1e4)
    pa = PowerAllocation((0.0,), (0.0,), (0.0,), P_cm=50.0)
    assert destination_constraints(ch, pa)["cm"]["dest-cm"] == pytest.approx(oracles.C(ch.h_d**2 * 50.0), rel=1e-12)


def test_dest_cn_single_split_denominator():
    ch = gains(1e4, 1e6, 1e8, 1e7, 1e4)
    pa = PowerAllocation((20.0,), (3.0,), (0.0,))
    pa.check(ch)
    d2, c2 = ch.h_d**2, ch.h_c**2
    expected = oracles.Cp(c2 * 20.0 / (d2 * 20.0 + c2 * 3.0 + 1) - 1)
    assert destination_constraints(ch, pa)["cn1"]["dest-cn"] == pytest.approx(expected, rel=1e-12)


def test_cn_only_sum_is_twice_the_min():
    ch = gains(1e4, 1e6, 1e8, 1e7, 1e4)
    pa = PowerAllocation((20.0,), (3.0,), (0.0,))
    relay = relay_constraints(ch, pa)["cn1"]["relay-cn"]
    dest = destination_constraints(ch, pa)["cn1"]["dest-cn"]
    assert achievable_sum_rate(ch, pa).sum_rate == pytest.approx(2 * min(relay, dest), rel=1e-12)


def test_golden_point():
    """FutureRich-shaped allocation on h_d^2P=1e4, h_c^2P=1e6, h_r^2P=1e8, h_s^2P=1e7 (locked after first run)."""
    ch = gains(1e4, 1e6, 1e8, 1e7, 1e4)
    seed = regime_seeds(GdofParams(1.5, 2.0, 1.75), 2, 2)[0]
    pa = allocation_from_exponents(ch, seed, 2, 2)
    pa.check(ch)
    assert achievable_sum_rate(ch, pa).sum_rate == pytest.approx(5.784973948760454, rel=1e-12)


def test_cf_trimmed_to_forwarding_budget():
    rng = np.random.default_rng(2)
    for _ in range(500):
        ch, pa = draw_feasible(rng)
        r = achievable_sum_rate(ch, pa)
        budget = destination_constraints(ch, pa)["r_cf"]["dest-relay-cf"]
        assert sum(r.R_cf) <= budget + 1e-12
        assert r.R_r_cf == pytest.approx(sum(r.R_cf))


def test_idle_relay_drops_relay_caps():
    ch = GaussianChannel(1.0, 2.0, 1.0, 1e-3, 1e4)
    pa = PowerAllocation((0.0,), (0.0,), (0.0,), P_cm=ch.P)
    r = achievable_sum_rate(ch, pa)
    assert r.binding["cm"].startswith("dest-")
    assert r.sum_rate > 0


def test_decode_order_branch():
    assert cf_relay_first(GaussianChannel(1, 2, 3, 1, 1))
    assert not cf_relay_first(GaussianChannel(1, 3, 2, 1, 1))


def test_budget_violation_raises():
    ch = GaussianChannel(1, 2, 1, 1, 1)
    bad = PowerAllocation((0.0,), (2.0,), (0.0,))
    with pytest.raises(ValueError):
        relay_constraints(ch, bad)
    with pytest.raises(ValueError):
        destination_constraints(ch, bad)


# --- converse bound --------------------------------------------------------------

def test_upper_bound_equal_gains():
    ch = GaussianChannel(1.0, 1.0, 2.0, 1.0, 3.0)
    rest = oracles.C(1 + 3.0 * 2) + oracles.C(3.0 * 4)
    assert upper_bound_sumrate(ch) - rest == pytest.approx(0.5, abs=1e-12)


def test_upper_bound_vanishing_power():
    ch = GaussianChannel(1.0, 2.0, 1.0, 1.0, 1e-12)
    assert upper_bound_sumrate(ch) == pytest.approx(oracles.C(0.25 + 0.25) + oracles.C(1), abs=1e-9)


def test_upper_bound_direct_evaluation():
    ch = gains(1e4, 1e6, 1e8, 1e7, 1e4)
    expected = oracles.C(0.01 + 0.81) + oracles.C(1 + 1.01e6) + oracles.C(1e8)
    assert upper_bound_sumrate(ch) == pytest.approx(expected, rel=1e-12)
    assert upper_bound_sumrate(ch) == pytest.approx(oracles.converse_bound(ch.h_d, ch.h_c, ch.h_r, ch.P), rel=1e-12)


def test_upper_bound_needs_cross_gain():
    with pytest.raises(ValueError):
        upper_bound_sumrate(GaussianChannel(1, 0, 1, 1, 1))


# --- optimizer ------------------------------------------------------------------

def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(W=0)
    with pytest.raises(ValueError):
        OptimizerConfig(grid_step=0)
    with pytest.raises(ValueError):
        OptimizerConfig(seed_exponents={"bogus": 1})


def test_optimizer_is_feasible_and_deterministic():
    ch = GaussianChannel.from_exponents(1.2, 2, 3, 1e5)
    r1 = optimize_powers(ch)
    r2 = optimize_powers(ch)
    r1.allocation.check(ch)
    assert r1.allocation == r2.allocation and r1.sum_rate == r2.sum_rate
    assert r1.last_improvement < OptimizerConfig().tol
    pa, rates = r1
    assert rates.sum_rate <= upper_bound_sumrate(ch)


def test_optimizer_rejects_weak_interference():
    with pytest.raises(ValueError):
        optimize_powers(GaussianChannel(2, 1, 1, 1, 10))


def test_optimizer_seed_exponents_are_used():
    ch = GaussianChannel.from_exponents(1.2, 2, 3, 1e5)
    plain = optimize_powers(ch)
    seeded = optimize_powers(ch, OptimizerConfig(seed_exponents={"cn": [0.0, 0.2], "cnF": [1.2, 1.4], "df": 0.0, "r_df": 0.0}))
    seeded.allocation.check(ch)
    assert seeded.evaluations > plain.evaluations
    assert seeded.sum_rate >= 0.9 * plain.sum_rate


def test_large_relay_link_leaves_cf_unused():
    ch = GaussianChannel.from_exponents(1.2, 2, 6, 1e6)
    res = optimize_powers(ch)
    assert sum(res.allocation.P_cf) < 1e-6 * ch.P
    assert sum(res.rates.R_cf) < 1e-3


def test_relay_off_is_below_point_to_point_pair():
    ch = GaussianChannel(1.0, 2.0, 1e-6, 1e-6, 1e4)
    res = optimize_powers(ch)
    assert res.sum_rate <= 2 * oracles.C(ch.h_d**2 * ch.P)


def test_estimate_needs_two_points():
    with pytest.raises(ValueError):
        estimate_gdof(GdofParams(1.2, 2, 3), [1e4])
    with pytest.raises(ValueError):
        estimate_gdof(GdofParams(1.2, 2, 3), [1e6, 1e4])


def test_relay_disabled_slope_matches_ic():
    est = estimate_gdof(GdofParams(1.2, 0, 0), [1e4, 1e6, 1e8])
    assert est.slope == pytest.approx(1.2, abs=0.1)
    assert est.slope <= 2


# --- properties ---------------------------------------------------------------------

@prop
def test_converse_dominance():
    rng = np.random.default_rng(20240601)
    for _ in range(10_000):
        ch, pa = draw_feasible(rng)
        assert achievable_sum_rate(ch, pa).sum_rate <= upper_bound_sumrate(ch)


@prop
def test_caps_are_clamped():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        ch, pa = draw_feasible(rng)
        for caps in (relay_constraints(ch, pa), destination_constraints(ch, pa)):
            for d in caps.values():
                for v in d.values():
                    assert v >= 0.0 and math.isfinite(v)
        r = achievable_sum_rate(ch, pa)
        assert all(x >= 0 for x in (*r.R_cn, *r.R_cf, r.R_cm, r.R_df))


@prop
def test_scaling_powers_down_never_raises_a_cap():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        ch, pa = draw_feasible(rng)
        f = rng.uniform(0.05, 1.0)
        scaled = PowerAllocation(
            P_cn=tuple(f * x for x in pa.P_cn), P_cnF=tuple(f * x for x in pa.P_cnF),
            P_cf=tuple(f * x for x in pa.P_cf), P_df=f * pa.P_df, P_cm=f * pa.P_cm,
            P_r_cf=f * pa.P_r_cf, P_r_df=f * pa.P_r_df,
        )
        scaled.check(ch)
        for fn in (relay_constraints, destination_constraints):
            full, low = fn(ch, pa), fn(ch, scaled)
            for msg, d in full.items():
                for label, v in d.items():
                    assert low[msg][label] <= v + 1e-12


@prop
def test_own_power_monotonicity():
    """Each cap is nondecreasing in its own message's power when nothing else changes."""
    rng = np.random.default_rng(9)
    for _ in range(500):
        ch, pa = draw_feasible(rng)
        slack = ch.P - pa.tx_power()
        if slack <= 0:
            continue
        bumped = PowerAllocation(pa.P_cn, pa.P_cnF, pa.P_cf, pa.P_df, pa.P_cm + slack, pa.P_r_cf, pa.P_r_df)
        for fn, labels in ((relay_constraints, ("relay-cm", "relay-cm-pair")), (destination_constraints, ("dest-cm", "dest-cm-pair"))):
            before, after = fn(ch, pa)["cm"], fn(ch, bumped)["cm"]
            for lab in labels:
                assert after[lab] >= before[lab] - 1e-12


@prop
def test_reduction_two_splits():
    rng = np.random.default_rng(10)
    for _ in range(100):
        ch, pa = draw_feasible(rng, W=2, L=1)
        rc, dc = relay_constraints(ch, pa), destination_constraints(ch, pa)
        oracle = oracles.relay_caps_w2_l1(ch.h_s, pa.P_cm, pa.P_cf[0], *pa.P_cnF, pa.P_df)
        for w in (1, 2):
            assert rc[f"cn{w}"]["relay-cn"] == pytest.approx(cn_relay_cap_two_split(ch, pa.P_cnF, w), rel=1e-12, abs=1e-12)
            assert rc[f"cn{w}"]["relay-cn"] == pytest.approx(oracle[f"cn{w}"], rel=1e-12, abs=1e-12)
            assert dc[f"cn{w}"]["dest-cn"] == pytest.approx(cn_dest_cap_two_split(ch, pa.P_cn, pa.P_cnF, w), rel=1e-12, abs=1e-12)
        dest = oracles.dest_cn_caps_w2(ch.h_d, ch.h_c, *pa.P_cn, *pa.P_cnF)
        for w in (1, 2):
            assert dc[f"cn{w}"]["dest-cn"] == pytest.approx(dest[f"cn{w}"], rel=1e-12, abs=1e-12)
        assert min(rc["cm"].values()) == pytest.approx(oracle["cm"], rel=1e-12, abs=1e-12)
        assert rc["cf1"]["relay-cf"] == pytest.approx(oracle["cf1"], rel=1e-12, abs=1e-12)
        assert min(rc["df"].values()) == pytest.approx(oracle["df"], rel=1e-12, abs=1e-12)


@prop
@pytest.mark.parametrize("pattern", [(1.2, 2, 3), (2.0, 2, 5)])
def test_snr_monotonicity(pattern):
    rates = [optimize_powers(GaussianChannel.from_exponents(*pattern, snr)).sum_rate for snr in (1e3, 1e4, 1e5, 1e6)]
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))


@prop
@pytest.mark.parametrize("pattern", [(1.2, 2, 3), (1.5, 1, 2.5), (2.0, 2, 5), (1.5, 0.5, 2)])
def test_slope_sanity(pattern):
    p = GdofParams(*pattern)
    est = estimate_gdof(p, [1e4, 1e6, 1e8])
    assert est.slope <= min(bound_new(p), bound_known(p)[0]) + 0.05
