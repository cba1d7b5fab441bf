"""Linear-deterministic IRC: binary level vectors, down-shifts and XOR superposition.

Index 0 of a vector is the top (most significant) level; the figures in the
literature count it as level 1, and level numbers used elsewhere in this
package follow that 1-based convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

BitVector = np.ndarray


@dataclass(frozen=True)
class LdParams:
    n_d: int
    n_c: int
    n_r: int
    n_s: int

    def __post_init__(self):
        for name in ("n_d", "n_c", "n_r", "n_s"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
        if self.q == 0:
            raise ValueError("at least one channel level must be positive")

    @property
    def q(self) -> int:
        return max(self.n_d, self.n_c, self.n_r, self.n_s)

    def exponents(self) -> tuple[float, float, float]:
        if self.n_d == 0:
            raise ValueError("exponent ratios need n_d > 0")
        return self.n_c / self.n_d, self.n_r / self.n_d, self.n_s / self.n_d


def bits(values: Sequence[int]) -> BitVector:
    arr = np.asarray(values, dtype=np.uint8)
    if arr.ndim != 1 or np.any(arr > 1):
        raise ValueError("a bit vector is a 1-d sequence of 0/1 values")
    return arr


def zeros(q: int) -> BitVector:
    return np.zeros(q, dtype=np.uint8)


def shift_apply(x: BitVector, n: int, q: int) -> BitVector:
    """Apply ``S^(q-n)``: the top ``n`` entries of ``x`` land on the bottom ``n`` positions."""
    if not 0 <= n <= q:
        raise ValueError(f"level {n} out of range [0, {q}]")
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (q,):
        raise ValueError(f"expected a length-{q} vector, got shape {x.shape}")
    out = np.zeros(q, dtype=np.uint8)
    if n:
        out[q - n:] = x[:n]
    return out


def _check_len(q: int, *vectors):
    for v in vectors:
        if np.shape(v) != (q,):
            raise ValueError(f"length mismatch: expected {q}, got {np.shape(v)}")


def rx_signal(xj: BitVector, xl: BitVector, xr: BitVector, p: LdParams) -> BitVector:
    """Output at receiver j from own input ``xj``, interferer ``xl`` and relay ``xr``."""
    q = p.q
    _check_len(q, xj, xl, xr)
    return shift_apply(xj, p.n_d, q) ^ shift_apply(xl, p.n_c, q) ^ shift_apply(xr, p.n_r, q)


def relay_rx(x1: BitVector, x2: BitVector, p: LdParams) -> BitVector:
    q = p.q
    _check_len(q, x1, x2)
    return shift_apply(np.asarray(x1, dtype=np.uint8) ^ np.asarray(x2, dtype=np.uint8), p.n_s, q)


def render_column(x: BitVector, labels: Sequence[str] | None = None, title: str = "") -> list[str]:
    """Text diagram of one vector, top level first; ``labels`` annotate each level."""
    lines = [title] if title else []
    for i, b in enumerate(np.asarray(x)):
        note = f"  {labels[i]}" if labels is not None and labels[i] else ""
        lines.append(f"{i + 1:>2} [{int(b)}]{note}")
    return lines
