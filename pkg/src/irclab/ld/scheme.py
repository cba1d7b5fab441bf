"""Block-Markov CN/CF/DF transmission over the linear-deterministic IRC.

Every transmitted bit is an information bit (or the XOR of a DF bit with a
current CN bit on a shared level). Decodability is decided symbolically: each
received level is a GF(2) combination of information variables, and a node can
recover a quantity exactly when that combination lies in the span of what it
observed plus what it learned earlier.

Block timeline for ``B`` message blocks: block 0 carries only the future CN bits
of block 1, blocks 1..B carry fresh messages (block B has no future part), and
block B+1 is a relay-only flush so the last DF bits and CF sums reach the
receivers. Receivers decode backwards from block B+1 down to block 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channel import LdParams, relay_rx, render_column, rx_signal
from .gf2 import Gf2System, VarIndex

CATEGORIES = ("cf", "cn", "df")


@dataclass(frozen=True)
class UserLayout:
    """Transmit levels (1-based, 1 = top) used by one transmitter.

    ``cf[l]`` hosts CF split l, ``cn[w]`` the current CN bit of split w,
    ``cn_future[w]`` the CN bit of split w for the next block and ``df[k]`` the
    k-th DF bit. A DF bit may share a level with a current CN bit.
    """

    cf: tuple[int, ...] = ()
    cn: tuple[int, ...] = ()
    cn_future: tuple[int, ...] = ()
    df: tuple[int, ...] = ()

    @property
    def bits_per_block(self) -> int:
        return len(self.cf) + len(self.cn) + len(self.df)


@dataclass(frozen=True)
class RelayLayout:
    """Relay transmit levels: forwarded DF bits per user, CF sums and CN sums."""

    df: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())
    cf_sum: tuple[int, ...] = ()
    cn_sum: tuple[int, ...] = ()

    def used_levels(self) -> list[int]:
        return [*self.df[0], *self.df[1], *self.cf_sum, *self.cn_sum]


@dataclass(frozen=True)
class Allocation:
    users: tuple[UserLayout, UserLayout]
    relay: RelayLayout

    @property
    def total_bits(self) -> int:
        """Information bits delivered per block, both users."""
        return self.users[0].bits_per_block + self.users[1].bits_per_block

    @property
    def W(self) -> int:
        return len(self.users[0].cn)

    @property
    def L(self) -> int:
        return len(self.users[0].cf)


@dataclass
class ValidationReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def reason(self) -> str | None:
        return self.failures[0] if self.failures else None

    def __bool__(self):
        return self.ok


class UnsupportedRegimeError(ValueError):
    """The requested channel levels fall outside what the constructor covers."""


def toy_allocation() -> Allocation:
    """Layout for ``(n_d, n_c, n_r, n_s) = (2, 3, 6, 5)``: 4 bits per user and block.

    Each user sends one CF bit on level 1, current CN splits on levels 2-3 and
    future CN splits on levels 4-5 (seen by the relay on its two lowest levels,
    invisible at the cross receiver). The DF bit rides on a current CN level;
    the users pick different levels so the relay can peel each one off after
    removing the known CN sum. The relay forwards DF1, DF2 and the CF sum on its
    top three levels and sends the CN sums on levels 5-6, aligned with the
    interfering CN bits at each receiver.
    """
    u1 = UserLayout(cf=(1,), cn=(2, 3), cn_future=(4, 5), df=(2,))
    u2 = UserLayout(cf=(1,), cn=(2, 3), cn_future=(4, 5), df=(3,))
    relay = RelayLayout(df=((1,), (2,)), cf_sum=(3,), cn_sum=(5, 6))
    return Allocation(users=(u1, u2), relay=relay)


# ---------------------------------------------------------------------------
# symbolic contents

def cf_var(user, l, b):
    return ("cf", user, l, b)


def cn_var(user, w, b):
    return ("cn", user, w, b)


def df_var(user, k, b):
    return ("df", user, k, b)


def _empty(q):
    return [[] for _ in range(q)]


def tx_symbols(a: Allocation, user: int, b: int, B: int, q: int) -> list[list[tuple]]:
    """Variables superposed on each transmit level of ``user`` (0 or 1) in block ``b``."""
    col = _empty(q)
    lay = a.users[user]
    if 1 <= b <= B:
        for l, t in enumerate(lay.cf):
            col[t - 1].append(cf_var(user, l, b))
        for w, t in enumerate(lay.cn):
            col[t - 1].append(cn_var(user, w, b))
        for k, t in enumerate(lay.df):
            col[t - 1].append(df_var(user, k, b))
    if 0 <= b < B:
        for w, t in enumerate(lay.cn_future):
            col[t - 1].append(cn_var(user, w, b + 1))
    return col


def relay_targets(a: Allocation, b: int, B: int) -> dict[tuple, list[tuple]]:
    """What the relay must learn in block ``b``, keyed by the symbol it forwards later."""
    out = {}
    if 1 <= b <= B:
        for u in (0, 1):
            for k in range(len(a.users[u].df)):
                out[("df", u, k, b)] = [df_var(u, k, b)]
        for l in range(a.L):
            out[("cfsum", l, b)] = [cf_var(0, l, b), cf_var(1, l, b)]
    if 0 <= b < B:
        for w in range(a.W):
            out[("cnsum", w, b + 1)] = [cn_var(0, w, b + 1), cn_var(1, w, b + 1)]
    return out


def relay_symbols(a: Allocation, b: int, B: int, q: int) -> list[list[tuple]]:
    """Relay transmit column in block ``b``: entries are relay-target keys."""
    col = [[] for _ in range(q)]
    r = a.relay
    if 2 <= b <= B + 1:
        for u in (0, 1):
            for k, lvl in enumerate(r.df[u]):
                col[lvl - 1].append(("df", u, k, b - 1))
        for l, lvl in enumerate(r.cf_sum):
            col[lvl - 1].append(("cfsum", l, b - 1))
    if 1 <= b <= B:
        for w, lvl in enumerate(r.cn_sum):
            col[lvl - 1].append(("cnsum", w, b))
    return col


def _expand(col, expansions):
    """Replace relay-target keys by the information variables they stand for."""
    return [[v for key in entry for v in expansions(key)] for entry in col]


def _target_vars(key):
    kind, idx, b = key[0], key[-2], key[-1]
    if kind == "df":
        return [df_var(key[1], idx, b)]
    if kind == "cfsum":
        return [cf_var(0, idx, b), cf_var(1, idx, b)]
    return [cn_var(0, idx, b), cn_var(1, idx, b)]


def _shift(col, n, q):
    out = _empty(q)
    if n:
        out[q - n:] = [list(e) for e in col[:n]]
    return out


def _xor_cols(*cols):
    q = len(cols[0])
    return [[v for c in cols for v in c[i]] for i in range(q)]


def relay_view(a: Allocation, p: LdParams, b: int, B: int):
    q = p.q
    x1, x2 = tx_symbols(a, 0, b, B, q), tx_symbols(a, 1, b, B, q)
    return _shift(_xor_cols(x1, x2), p.n_s, q)


def rx_view(a: Allocation, p: LdParams, j: int, b: int, B: int):
    """Symbolic output at receiver ``j`` assuming the relay forwards correct values."""
    q = p.q
    xj, xl = tx_symbols(a, j, b, B, q), tx_symbols(a, 1 - j, b, B, q)
    xr = _expand(relay_symbols(a, b, B, q), _target_vars)
    return _xor_cols(_shift(xj, p.n_d, q), _shift(xl, p.n_c, q), _shift(xr, p.n_r, q))


def rx_targets(a: Allocation, j: int, b: int, B: int) -> dict[tuple, list[tuple]]:
    """Quantities receiver ``j`` must extract from block ``b`` during backward decoding."""
    out = {}
    if 1 <= b <= B:
        for l in range(a.L):
            out[cf_var(j, l, b)] = [cf_var(j, l, b)]
        for w in range(a.W):
            out[cn_var(j, w, b)] = [cn_var(j, w, b)]
    if 2 <= b <= B + 1:
        for u in (0, 1):
            for k in range(len(a.users[u].df)):
                out[("df", u, k, b - 1)] = [df_var(u, k, b - 1)]
        for l in range(a.L):
            out[("cfsum", l, b - 1)] = [cf_var(0, l, b - 1), cf_var(1, l, b - 1)]
    return out


def rx_prior(a: Allocation, j: int, b: int, B: int) -> dict[tuple, list[tuple]]:
    """Quantities receiver ``j`` already holds when it starts on block ``b``."""
    out = {}
    if 1 <= b <= B:
        for u in (0, 1):
            for k in range(len(a.users[u].df)):
                out[("df", u, k, b)] = [df_var(u, k, b)]
        for l in range(a.L):
            out[("cfsum", l, b)] = [cf_var(0, l, b), cf_var(1, l, b)]
    if 1 <= b < B:
        for w in range(a.W):
            out[cn_var(j, w, b + 1)] = [cn_var(j, w, b + 1)]
    return out


def relay_prior(a: Allocation, b: int, B: int) -> dict[tuple, list[tuple]]:
    if 1 <= b <= B:
        return {("cnsum", w, b): [cn_var(0, w, b), cn_var(1, w, b)] for w in range(a.W)}
    return {}


def _solve(view, observed, prior: dict, prior_values: dict, targets: dict):
    """Build the GF(2) system of one decoding step and evaluate every target.

    Returns ``(estimates, undetermined, conflicts)``; undetermined targets read as 0.
    """
    idx = VarIndex()
    sys_ = Gf2System()
    for key, variables in prior.items():
        sys_.add(idx.mask(variables), prior_values.get(key, 0))
    for i, entry in enumerate(view):
        m = idx.mask(entry)
        y = int(observed[i]) if observed is not None else 0
        if m or y:
            sys_.add(m, y)
    est, missing = {}, []
    for key, variables in targets.items():
        v = sys_.solve(idx.mask(variables))
        if v is None:
            missing.append(key)
            v = 0
        est[key] = v
    return est, missing, sys_.conflicts


# ---------------------------------------------------------------------------
# validation

def _structure_failures(a: Allocation, p: LdParams) -> list[str]:
    q = p.q
    fails = []
    u1, u2 = a.users
    if (len(u1.cf), len(u1.cn)) != (len(u2.cf), len(u2.cn)):
        fails.append("shape: both users need the same CF and CN split counts")
    for i, u in enumerate(a.users, start=1):
        if len(u.cn_future) != len(u.cn):
            fails.append(f"shape: TX{i} needs one future CN level per CN split")
    r = a.relay
    if len(r.cf_sum) != a.L or len(r.cn_sum) != a.W:
        fails.append("shape: relay needs one level per CF sum and per CN sum")
    if tuple(len(d) for d in r.df) != (len(u1.df), len(u2.df)):
        fails.append("shape: relay must forward every DF bit")
    if fails:
        return fails

    for i, u in enumerate(a.users, start=1):
        for lvl in (*u.cf, *u.cn, *u.cn_future, *u.df):
            if not 1 <= lvl <= q:
                fails.append(f"range: TX{i} level {lvl} outside 1..{q}")
    for lvl in r.used_levels():
        if not 1 <= lvl <= q:
            fails.append(f"range: relay level {lvl} outside 1..{q}")
    if fails:
        return fails

    for i, u in enumerate(a.users, start=1):
        plain = [*u.cf, *u.cn, *u.cn_future]
        if len(set(plain)) != len(plain):
            fails.append(f"collision: TX{i} places two signals on one level")
        if len(set(u.df)) != len(u.df):
            fails.append(f"collision: TX{i} places two DF bits on one level")
        for lvl in u.df:
            if lvl in (*u.cf, *u.cn_future):
                fails.append(f"collision: TX{i} DF bit on level {lvl} shares it with a non-CN signal")
    used = r.used_levels()
    if len(set(used)) != len(used):
        fails.append("collision: relay places two signals on one level")
    return fails


def _alignment_failures(a: Allocation, p: LdParams) -> list[str]:
    fails = []
    u1, u2 = a.users
    for w in range(a.W):
        c = u1.cn[w]
        if u2.cn[w] != c:
            fails.append(f"alignment: CN split {w + 1} sits on different levels at the two transmitters")
            continue
        if c > p.n_c:
            fails.append(f"alignment: CN split {w + 1} on level {c} is not seen at the cross receiver")
            continue
        r = a.relay.cn_sum[w]
        if p.n_r - r != p.n_c - c:
            fails.append(
                f"alignment: relay CN sum {w + 1} on level {r} misses the interfering level {c} "
                f"(need n_r - r = n_c - c)"
            )
    return fails


def _causality_failures(a: Allocation, p: LdParams) -> list[str]:
    fails = []
    u1, u2 = a.users
    for w in range(a.W):
        f = u1.cn_future[w]
        if u2.cn_future[w] != f:
            fails.append(f"causality: future CN split {w + 1} on different levels at the two transmitters")
            continue
        if f > p.n_s:
            fails.append(f"causality: future CN split {w + 1} on level {f} is below the relay's n_s={p.n_s} cutoff")
        elif f <= p.n_c:
            fails.append(f"causality: future CN split {w + 1} on level {f} reaches the cross receiver")
        for i, u in enumerate(a.users, start=1):
            if any(lvl >= f for lvl in (*u.cf, *u.cn, *u.df)):
                fails.append(f"causality: TX{i} current signal below future CN split {w + 1}")
                break
    return fails


def relay_failures(a: Allocation, p: LdParams) -> list[str]:
    """Targets the relay cannot isolate in a steady-state block."""
    B, b = 3, 2
    _, missing, _ = _solve(relay_view(a, p, b, B), None, relay_prior(a, b, B), {}, relay_targets(a, b, B))
    return [f"relay-decode: relay cannot recover {_describe(k)}" for k in missing]


def rx_failures(a: Allocation, p: LdParams) -> list[str]:
    B, b = 3, 2
    fails = []
    for j in (0, 1):
        _, missing, _ = _solve(rx_view(a, p, j, b, B), None, rx_prior(a, j, b, B), {}, rx_targets(a, j, b, B))
        fails += [f"rx-decode: RX{j + 1} cannot recover {_describe(k)}" for k in missing]
    return fails


def _describe(key) -> str:
    kind = key[0]
    if kind in ("cf", "cn"):
        return f"{kind.upper()} split {key[2] + 1} of TX{key[1] + 1}"
    if kind == "df":
        return f"DF bit {key[2] + 1} of TX{key[1] + 1}"
    return f"{'CF' if kind == 'cfsum' else 'CN'} sum of split {key[1] + 1}"


def validate_allocation(a: Allocation, p: LdParams) -> ValidationReport:
    """Check an allocation in the order: structure, CN alignment, causality, relay, receivers.

    Later stages run only when the earlier ones pass, so ``reason`` is always
    the first violated condition.
    """
    for stage in (_structure_failures, _alignment_failures, _causality_failures, relay_failures, rx_failures):
        fails = stage(a, p)
        if fails:
            return ValidationReport(fails)
    return ValidationReport()


# ---------------------------------------------------------------------------
# simulation

@dataclass
class SimReport:
    blocks: int
    seed: int
    params: LdParams
    delivered: dict[str, tuple[int, int]]   # category -> bits per user over all blocks
    errors: dict[str, tuple[int, int]]
    per_block: list[dict[str, tuple[int, int]]]  # delivered correct bits per block
    relay_misses: int = 0
    conflicts: int = 0

    @property
    def error_count(self) -> int:
        return sum(sum(v) for v in self.errors.values())

    @property
    def total_bits(self) -> int:
        return sum(sum(v) for v in self.delivered.values())

    @property
    def normalized_gdof(self) -> float:
        return self.total_bits / (self.blocks * self.params.n_d)

    CSV_COLUMNS = ("seed", "blocks", "category", "user1_bits", "user2_bits", "errors", "normalized_gdof")

    def rows(self) -> list[dict]:
        out = []
        for cat in CATEGORIES:
            d, e = self.delivered[cat], self.errors[cat]
            out.append({"seed": self.seed, "blocks": self.blocks, "category": cat, "user1_bits": d[0],
                        "user2_bits": d[1], "errors": sum(e), "normalized_gdof": ""})
        tot = [sum(self.delivered[c][u] for c in CATEGORIES) for u in (0, 1)]
        out.append({"seed": self.seed, "blocks": self.blocks, "category": "total", "user1_bits": tot[0],
                    "user2_bits": tot[1], "errors": self.error_count, "normalized_gdof": self.normalized_gdof})
        return out


class Relay:
    """Causal relay: decodes block ``b`` on reception, transmits it from block ``b+1`` on.

    ``transmit(b)`` reads only the estimates produced by earlier ``receive`` calls.
    """

    def __init__(self, a: Allocation, p: LdParams, B: int):
        self.a, self.p, self.B = a, p, B
        self.estimates: dict[tuple, int] = {}
        self.misses = 0
        self.conflicts = 0

    def receive(self, b: int, y_r: np.ndarray):
        est, missing, conflicts = _solve(
            relay_view(self.a, self.p, b, self.B), y_r,
            relay_prior(self.a, b, self.B), self.estimates, relay_targets(self.a, b, self.B),
        )
        self.estimates.update(est)
        self.misses += len(missing)
        self.conflicts += conflicts

    def transmit(self, b: int) -> np.ndarray:
        col = relay_symbols(self.a, b, self.B, self.p.q)
        x = np.zeros(self.p.q, dtype=np.uint8)
        for i, keys in enumerate(col):
            for key in keys:
                x[i] ^= self.estimates.get(key, 0)
        return x


def _tx_vector(col, values) -> np.ndarray:
    x = np.zeros(len(col), dtype=np.uint8)
    for i, entry in enumerate(col):
        for v in entry:
            x[i] ^= values[v]
    return x


def draw_messages(a: Allocation, B: int, rng: np.random.Generator) -> dict[tuple, int]:
    values = {}
    for b in range(1, B + 1):
        for u in (0, 1):
            for l in range(a.L):
                values[cf_var(u, l, b)] = int(rng.integers(2))
            for w in range(a.W):
                values[cn_var(u, w, b)] = int(rng.integers(2))
            for k in range(len(a.users[u].df)):
                values[df_var(u, k, b)] = int(rng.integers(2))
    return values


def run_blocks(a: Allocation, p: LdParams, B: int, values: dict, trace=None):
    """Forward pass over blocks ``0..B+1``; returns received vectors and the relay."""
    q = p.q
    relay = Relay(a, p, B)
    y = {0: {}, 1: {}}
    for b in range(B + 2):
        x1 = _tx_vector(tx_symbols(a, 0, b, B, q), values)
        x2 = _tx_vector(tx_symbols(a, 1, b, B, q), values)
        xr = relay.transmit(b)
        y_r = relay_rx(x1, x2, p)
        y[0][b] = rx_signal(x1, x2, xr, p)
        y[1][b] = rx_signal(x2, x1, xr, p)
        relay.receive(b, y_r)
        if trace is not None:
            trace.extend(render_block(a, p, b, B, x1, x2, xr, y_r, y[0][b], y[1][b]))
    return y, relay


def simulate(p: LdParams, a: Allocation, B: int, seed: int, *, check: bool = True, trace=None) -> SimReport:
    """Run the scheme end to end on uniformly random message bits.

    With ``check`` the allocation is validated first and a failure raises
    ``ValueError``; with ``check=False`` the run proceeds and decoding mistakes
    show up in the error counts. ``trace`` (a list) collects text diagrams.
    """
    if B < 2:
        raise ValueError("need at least two message blocks")
    if check:
        rep = validate_allocation(a, p)
        if not rep.ok:
            raise ValueError(f"invalid allocation: {rep.reason}")
    rng = np.random.default_rng(seed)
    values = draw_messages(a, B, rng)
    y, relay = run_blocks(a, p, B, values, trace)

    delivered = {c: [0, 0] for c in CATEGORIES}
    errors = {c: [0, 0] for c in CATEGORIES}
    per_block = [{c: [0, 0] for c in CATEGORIES} for _ in range(B)]
    conflicts = relay.conflicts
    for j in (0, 1):
        known: dict[tuple, int] = {}
        for b in range(B + 1, 0, -1):
            est, _, c = _solve(rx_view(a, p, j, b, B), y[j][b], rx_prior(a, j, b, B), known, rx_targets(a, j, b, B))
            conflicts += c
            known.update(est)
        for b in range(1, B + 1):
            checks = [("cf", cf_var(j, l, b), cf_var(j, l, b)) for l in range(a.L)]
            checks += [("cn", cn_var(j, w, b), cn_var(j, w, b)) for w in range(a.W)]
            checks += [("df", ("df", j, k, b), df_var(j, k, b)) for k in range(len(a.users[j].df))]
            for cat, key, var in checks:
                delivered[cat][j] += 1
                if known.get(key, 0) != values[var]:
                    errors[cat][j] += 1
                else:
                    per_block[b - 1][cat][j] += 1
    return SimReport(
        blocks=B, seed=seed, params=p,
        delivered={c: tuple(v) for c, v in delivered.items()},
        errors={c: tuple(v) for c, v in errors.items()},
        per_block=[{c: tuple(v) for c, v in d.items()} for d in per_block],
        relay_misses=relay.misses, conflicts=conflicts,
    )


# ---------------------------------------------------------------------------
# trace rendering

def _label(entry: Iterable) -> str:
    parts = []
    for v in entry:
        kind = v[0]
        if kind in ("cf", "cn", "df"):
            user, idx, b = v[1], v[2], v[3]
            parts.append(f"x{user + 1},{kind}{idx + 1}({b})")
        else:
            name = {"cfsum": "cf", "cnsum": "cn"}.get(kind)
            if name:
                parts.append(f"sum {name}{v[1] + 1}({v[2]})")
            else:
                parts.append(f"fwd x{v[1] + 1},df{v[2] + 1}({v[3]})")
    return " + ".join(parts)


def render_block(a, p, b, B, x1, x2, xr, y_r, y1, y2) -> list[str]:
    q = p.q
    cols = [
        render_column(x1, [_label(e) for e in tx_symbols(a, 0, b, B, q)], "TX1"),
        render_column(x2, [_label(e) for e in tx_symbols(a, 1, b, B, q)], "TX2"),
        render_column(xr, [_label(e) for e in relay_symbols(a, b, B, q)], "relay tx"),
        render_column(y_r, [_label(e) for e in relay_view(a, p, b, B)], "relay rx"),
        render_column(y1, None, "RX1"),
        render_column(y2, None, "RX2"),
    ]
    widths = [max(len(s) for s in c) for c in cols]
    lines = [f"--- block {b} ---"]
    for i in range(q + 1):
        lines.append(" | ".join(c[i].ljust(wd) for c, wd in zip(cols, widths)).rstrip())
    return lines
