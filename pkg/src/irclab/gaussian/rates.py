"""Rate constraints of the CN/CF/DF/common-message scheme and the genie-aided sum-rate bound.

Caps are per-user rates in bits per channel use. Constraints written on twice
a rate (pairs decoded jointly, or the relay's DF codeword carrying both DF
messages) are halved before they are reported. Message keys are ``"cm"``,
``"df"``, ``"r_cf"``, ``"cf1".."cfL"`` and ``"cn1".."cnW"``.
"""

from __future__ import annotations

import math

from ..gdof import c_of
from .model import GaussianChannel, PowerAllocation, RateAllocation

Caps = dict[str, dict[str, float]]


def cap(x: float, penalty: float = 0.0) -> float:
    """``C(x - penalty)`` clamped at zero; a non-positive argument disables the split."""
    arg = x - penalty
    if arg <= 0:
        return 0.0
    return c_of(arg)


def _ratio(num: float, den: float) -> float:
    return num / den if num > 0 else 0.0


def _tail(values, start):
    return sum(values[start:])


def relay_constraints(ch: GaussianChannel, pa: PowerAllocation, check: bool = True) -> Caps:
    """Caps for decoding at the relay after the known current CN sums are removed.

    Decoding order: common pair, CF sums (split 1 first), DF pair, future CN
    sums (split 1 first); everything not yet decoded is noise.
    """
    if check:
        pa.check(ch)
    hs2 = ch.h_s**2
    P_cf, P_cnF = sum(pa.P_cf), sum(pa.P_cnF)
    caps: Caps = {}

    den = 2 * hs2 * (P_cf + P_cnF + pa.P_df) + 1
    caps["cm"] = {
        "relay-cm": cap(_ratio(hs2 * pa.P_cm, den)),
        "relay-cm-pair": 0.5 * cap(_ratio(2 * hs2 * pa.P_cm, den)),
    }
    for l in range(pa.L):
        den = 2 * hs2 * (_tail(pa.P_cf, l + 1) + P_cnF + pa.P_df) + 1
        caps[f"cf{l + 1}"] = {"relay-cf": cap(_ratio(hs2 * pa.P_cf[l], den), 0.5)}
    den = 2 * hs2 * P_cnF + 1
    caps["df"] = {
        "relay-df": cap(_ratio(hs2 * pa.P_df, den)),
        "relay-df-pair": 0.5 * cap(_ratio(2 * hs2 * pa.P_df, den)),
    }
    for w in range(pa.W):
        den = 2 * hs2 * _tail(pa.P_cnF, w + 1) + 1
        caps[f"cn{w + 1}"] = {"relay-cn": cap(_ratio(hs2 * pa.P_cnF[w], den), 0.5)}
    return caps


def cf_relay_first(ch: GaussianChannel) -> bool:
    """True when the relay's CF codeword is decoded before the interferer's first CF split.

    The interferer's split arrives stronger when ``h_c > h_r``; otherwise the
    relay's codeword goes first.
    """
    return not abs(ch.h_c) > abs(ch.h_r)


def destination_constraints(ch: GaussianChannel, pa: PowerAllocation, check: bool = True) -> Caps:
    """Caps for backward successive decoding at a receiver.

    Order: common pair, relay DF codeword, CF (interferer split 1 and the
    relay's CF codeword, in power order), interferer CF splits 2..L, then the
    neutralized CN splits 1..W.
    """
    if check:
        pa.check(ch)
    hd2, hc2, hr2 = ch.h_d**2, ch.h_c**2, ch.h_r**2
    P_cf, P_cn, P_cnF = sum(pa.P_cf), sum(pa.P_cn), sum(pa.P_cnF)
    # relay CN power as seen through h_r; equals h_c^2 P_cn without dividing by h_r
    rx_r_cn_w = [hc2 * p for p in pa.P_cn]
    rx_r_cn = sum(rx_r_cn_w)
    cf_tail = _tail(pa.P_cf, 1)
    caps: Caps = {}

    den = (hd2 + hc2) * (P_cf + P_cn) + hc2 * P_cnF + hr2 * (pa.P_r_cf + pa.P_r_df) + rx_r_cn + 1
    caps["cm"] = {
        "dest-cm": cap(_ratio(hd2 * pa.P_cm, den)),
        "dest-cm-pair": 0.5 * cap(_ratio((hd2 + hc2) * pa.P_cm, den)),
    }
    den = (hd2 + hc2) * (P_cf + P_cn) + hc2 * P_cnF + hr2 * pa.P_r_cf + rx_r_cn + 1
    caps["df"] = {"dest-df": 0.5 * cap(_ratio(hr2 * pa.P_r_df, den))}

    if not cf_relay_first(ch):
        den_cf1 = hd2 * (P_cf + P_cn) + hc2 * (P_cnF + P_cn + cf_tail) + hr2 * pa.P_r_cf + rx_r_cn + 1
        den_rcf = (hd2 + hc2) * (cf_tail + P_cn) + hc2 * P_cnF + rx_r_cn + 1
    else:
        den_rcf = hd2 * (P_cf + P_cn) + hc2 * (P_cnF + P_cn + P_cf) + rx_r_cn + 1
        den_cf1 = (hd2 + hc2) * (cf_tail + P_cn) + hd2 * pa.P_cf[0] + hc2 * P_cnF + rx_r_cn + 1
    caps["cf1"] = {"dest-cf": cap(_ratio(hc2 * pa.P_cf[0], den_cf1))}
    caps["r_cf"] = {"dest-relay-cf": cap(_ratio(hr2 * pa.P_r_cf, den_rcf))}
    for l in range(1, pa.L):
        den = (hd2 + hc2) * P_cn + hc2 * (P_cnF + _tail(pa.P_cf, l + 1)) + hd2 * _tail(pa.P_cf, l) + rx_r_cn + 1
        caps[f"cf{l + 1}"] = {"dest-cf": cap(_ratio(hc2 * pa.P_cf[l], den))}

    for w in range(pa.W):
        later = _tail(pa.P_cn, w + 1)
        den = hd2 * _tail(pa.P_cn, w) + hc2 * (P_cnF + later) + hc2 * later + 1
        caps[f"cn{w + 1}"] = {"dest-cn": cap(_ratio(rx_r_cn_w[w], den), 1.0)}
    return caps


def cn_relay_cap_two_split(ch: GaussianChannel, P_cnF: tuple[float, float], w: int) -> float:
    """Future-CN sum decoding at the relay written out for exactly two splits (``w`` 1-based)."""
    hs2 = ch.h_s**2
    den = sum(2 * P_cnF[i] * hs2 for i in range(w, 2)) + 1
    return cap(_ratio(P_cnF[w - 1] * hs2, den), 0.5)


def cn_dest_cap_two_split(ch: GaussianChannel, P_cn: tuple[float, float], P_cnF: tuple[float, float], w: int) -> float:
    """Neutralized CN decoding at the receiver written out for exactly two splits (``w`` 1-based)."""
    hd2, hc2 = ch.h_d**2, ch.h_c**2
    den = sum(P_cn[i] * hd2 for i in range(w - 1, 2)) + hc2 * (2 * sum(P_cn[i] for i in range(w, 2)) + sum(P_cnF)) + 1
    return cap(_ratio(P_cn[w - 1] * hc2, den), 1.0)


def _merge(*caps: Caps) -> Caps:
    out: Caps = {}
    for c in caps:
        for msg, d in c.items():
            out.setdefault(msg, {}).update(d)
    return out


def _binding(d: dict[str, float]) -> tuple[float, str]:
    label = min(d, key=lambda k: d[k])
    return d[label], label


def achievable_sum_rate(ch: GaussianChannel, pa: PowerAllocation, check: bool = True) -> RateAllocation:
    """Largest per-message rates meeting every relay and destination cap.

    The relay's CF codeword carries all CF sums, so the CF rates are trimmed
    (last split first) until they fit under its forwarding cap. A relay that
    forwards nothing (no CN, CF or DF power) decodes nothing, so its caps are
    dropped; this is what reduces the scheme to a plain interference channel.
    """
    if check:
        pa.check(ch)
    dest = destination_constraints(ch, pa, check=False)
    idle = sum(pa.P_cn) == 0 and pa.P_r_cf == 0 and pa.P_r_df == 0
    caps = dest if idle else _merge(relay_constraints(ch, pa, check=False), dest)
    binding = {}
    R_cm, binding["cm"] = _binding(caps["cm"])
    R_df, binding["df"] = _binding(caps["df"])
    R_cn = []
    for w in range(pa.W):
        r, binding[f"cn{w + 1}"] = _binding(caps[f"cn{w + 1}"])
        R_cn.append(r)
    R_cf = []
    for l in range(pa.L):
        r, binding[f"cf{l + 1}"] = _binding(caps[f"cf{l + 1}"])
        R_cf.append(r)
    budget = caps["r_cf"]["dest-relay-cf"]
    excess = sum(R_cf) - budget
    for l in reversed(range(pa.L)):
        if excess <= 0:
            break
        cut = min(R_cf[l], excess)
        R_cf[l] -= cut
        excess -= cut
        binding[f"cf{l + 1}"] = "dest-relay-cf"
    return RateAllocation(
        R_cn=tuple(R_cn), R_cf=tuple(R_cf), R_cm=R_cm, R_df=R_df,
        R_r_cf=sum(R_cf), binding=binding,
    )


def upper_bound_sumrate(ch: GaussianChannel) -> float:
    """Genie-aided sum-rate bound (relay-destination side information plus one receiver's output)."""
    if ch.h_c == 0:
        raise ValueError("the bound needs h_c != 0")
    ratio = ch.h_d / ch.h_c
    return c_of(ratio**2 + (ratio - 1) ** 2) + c_of(1 + ch.P * (ch.h_d**2 + ch.h_c**2)) + c_of(ch.P * ch.h_r**2)


def half_log_snr(ch: GaussianChannel) -> float:
    return 0.5 * math.log2(ch.P * ch.h_d**2)
