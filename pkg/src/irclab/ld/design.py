"""Level allocations for general LD channels: a closed-form constructor and a brute-force search."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Optional

from .channel import LdParams
from .scheme import (
    Allocation,
    RelayLayout,
    UnsupportedRegimeError,
    UserLayout,
    relay_failures,
    simulate,
    validate_allocation,
)


def target_bits(p: LdParams) -> int:
    """``n_d`` times the closed-form GDoF, in bits per block (both users)."""
    n_d, n_c, n_r, n_s = p.n_d, p.n_c, p.n_r, p.n_s
    return min(2 * max(n_d, n_r), max(n_c, n_r) + n_s - n_c, n_s + n_c, n_c + n_r)


def construct_allocation(p: LdParams) -> Allocation:
    """Allocation reaching ``target_bits(p)`` for ``n_d < n_c < n_s`` and ``n_c < n_r``.

    When ``n_s >= 2 n_c`` the relay hears every future CN bit below the cross
    receiver's range, so CN fills all ``n_c`` cross-visible levels and DF uses
    the ``n_r - n_c`` relay levels above them. Otherwise only ``n_s - n_c``
    future CN bits fit under the relay's cutoff; CN shrinks to that, CF takes
    the vacated top levels and DF gets what the relay has left.

    Raises ``UnsupportedRegimeError`` when the per-user share is fractional or
    the required DF bits do not fit on the CN levels.
    """
    n_d, n_c, n_r, n_s = p.n_d, p.n_c, p.n_r, p.n_s
    if not (0 < n_d < n_c < n_s):
        raise UnsupportedRegimeError(f"need 0 < n_d < n_c < n_s, got {p}")
    if not n_c < n_r:
        raise UnsupportedRegimeError(f"need n_c < n_r for the DF/CN split, got {p}")
    target = target_bits(p)
    if target % 2:
        raise UnsupportedRegimeError(
            f"target of {target} bits per block gives a fractional per-user share; "
            "a symbol extension over several blocks would be needed"
        )
    if n_s >= 2 * n_c:
        k_cn, k_cf, two_df = n_c, 0, n_r - n_c
    else:
        k_cn, k_cf, two_df = n_s - n_c, 2 * n_c - n_s, n_r + n_s - 3 * n_c
    if two_df < 0 or two_df % 2 or two_df > k_cn:
        raise UnsupportedRegimeError(f"{two_df} DF bits cannot be paired onto {k_cn} CN levels for {p}")
    k_df = two_df // 2
    if 2 * (k_cn + k_cf + k_df) != target:
        raise UnsupportedRegimeError(f"level counting reaches {2 * (k_cn + k_cf + k_df)} of {target} bits")

    cf = tuple(range(1, k_cf + 1))
    cn = tuple(range(k_cf + 1, k_cf + k_cn + 1))
    future = tuple(range(n_c + 1, n_c + k_cn + 1))
    u1 = UserLayout(cf=cf, cn=cn, cn_future=future, df=cn[:k_df])
    u2 = UserLayout(cf=cf, cn=cn, cn_future=future, df=cn[k_df:2 * k_df])
    relay = RelayLayout(
        df=(tuple(range(1, k_df + 1)), tuple(range(k_df + 1, 2 * k_df + 1))),
        cf_sum=tuple(range(2 * k_df + 1, 2 * k_df + k_cf + 1)),
        cn_sum=tuple(n_r - n_c + c for c in cn),
    )
    return Allocation(users=(u1, u2), relay=relay)


@dataclass
class SearchResult:
    allocation: Optional[Allocation]
    evaluated: int
    exhausted: bool

    @property
    def total_bits(self) -> int:
        return self.allocation.total_bits if self.allocation is not None else 0


def _size_vectors(p: LdParams):
    """Per-user (k_cn, k_cf, k_df) counts that pass simple counting limits, largest total first."""
    q = p.q
    top = max(p.n_r, p.n_c, p.n_d)
    out = []
    for k_cn in range(0, min(p.n_c, q) + 1):
        for k_cf in range(0, q + 1):
            for k_df in range(0, q + 1):
                if 2 * k_cn + k_cf > q:                       # distinct transmit levels
                    continue
                if k_cn + k_cf + 2 * k_df > p.n_s:            # relay observations
                    continue
                if k_cn + k_cf + 2 * k_df > p.n_r:            # relay transmit levels
                    continue
                if k_cn + 2 * k_cf + 2 * k_df > top:          # receiver observations
                    continue
                out.append((k_cn, k_cf, k_df))
    out.sort(key=lambda s: (-(s[0] + s[1] + s[2]), s))
    return out


def _placements(p: LdParams, k_cn: int, k_cf: int, k_df: int):
    """Transmit layouts (shared CN/CF/future levels, per-user DF levels) for given counts."""
    q = p.q
    cn_candidates = [c for c in range(1, q + 1) if c <= p.n_c and 1 <= p.n_r - p.n_c + c <= q]
    for cn in itertools.combinations(cn_candidates, k_cn):
        rest = [t for t in range(1, min(p.n_s, q) + 1) if t not in cn]
        for cf in itertools.combinations(rest, k_cf):
            busy = set(cn) | set(cf)
            low = max(busy | {p.n_c})
            fut_candidates = [t for t in range(low + 1, min(p.n_s, q) + 1)]
            for fut in itertools.combinations(fut_candidates, k_cn):
                occupied = busy | set(fut)
                df_candidates = [t for t in range(1, min(p.n_s, q) + 1) if t in cn or t not in occupied]
                if k_cn and max(df_candidates, default=0) >= min(fut):
                    df_candidates = [t for t in df_candidates if t < min(fut)]
                for d1 in itertools.combinations(df_candidates, k_df):
                    for d2 in itertools.combinations([t for t in df_candidates if t not in d1], k_df):
                        yield (UserLayout(cf=cf, cn=cn, cn_future=fut, df=d1),
                               UserLayout(cf=cf, cn=cn, cn_future=fut, df=d2))


def search_allocation(p: LdParams, budget: int = 200_000, smoke_blocks: int = 3) -> SearchResult:
    """Exhaustive search for the allocation with the most bits per block.

    Size vectors are visited from the largest total down; within one, every
    transmit layout and every choice of relay levels for the forwarded bits is
    tried (CN sums sit where alignment forces them). The first allocation that
    validates and survives a short zero-error simulation wins. ``budget``
    caps the number of candidate allocations; on exhaustion a warning is
    issued and the best allocation seen so far (possibly none) is returned.
    """
    if p.q > 8:
        raise ValueError("search is limited to q <= 8")
    q = p.q
    evaluated = 0
    for k_cn, k_cf, k_df in _size_vectors(p):
        if k_cn + k_cf + k_df == 0:
            break
        for u1, u2 in _placements(p, k_cn, k_cf, k_df):
            cn_sum = tuple(p.n_r - p.n_c + c for c in u1.cn)
            probe = Allocation((u1, u2), RelayLayout(df=((0,) * k_df, (0,) * k_df), cf_sum=(0,) * k_cf, cn_sum=cn_sum))
            if evaluated >= budget:
                return _exhausted(evaluated)
            evaluated += 1
            if relay_failures(probe, p):
                continue
            free = [r for r in range(1, q + 1) if r not in cn_sum]
            for chosen in itertools.combinations(free, 2 * k_df + k_cf):
                relay = RelayLayout(
                    df=(chosen[:k_df], chosen[k_df:2 * k_df]),
                    cf_sum=chosen[2 * k_df:],
                    cn_sum=cn_sum,
                )
                a = Allocation((u1, u2), relay)
                if evaluated >= budget:
                    return _exhausted(evaluated)
                evaluated += 1
                if validate_allocation(a, p).ok and simulate(p, a, smoke_blocks, seed=0).error_count == 0:
                    return SearchResult(a, evaluated, False)
    return SearchResult(None, evaluated, False)


def _exhausted(evaluated: int) -> SearchResult:
    warnings.warn(f"allocation search budget exhausted after {evaluated} candidates", RuntimeWarning, stacklevel=3)
    return SearchResult(None, evaluated, True)
