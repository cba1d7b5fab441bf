"""Incremental linear systems over GF(2) with rows stored as Python int bitmasks."""

from __future__ import annotations

from typing import Hashable, Iterable


class VarIndex:
    """Assigns a bit position to every symbolic variable on first use."""

    def __init__(self):
        self._pos: dict[Hashable, int] = {}

    def bit(self, var: Hashable) -> int:
        pos = self._pos.get(var)
        if pos is None:
            pos = self._pos[var] = len(self._pos)
        return 1 << pos

    def mask(self, variables: Iterable[Hashable]) -> int:
        m = 0
        for v in variables:
            m ^= self.bit(v)
        return m


class Gf2System:
    """Row-reduced set of equations ``<mask, x> = rhs``.

    ``add`` keeps the basis fully reduced so ``solve`` is a single pass.
    Contradictory rows (zero mask, rhs 1) are counted, not raised.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}  # pivot bit -> (mask, rhs)
        self.conflicts = 0

    def _reduce(self, mask: int, rhs: int) -> tuple[int, int]:
        for pivot, (m, r) in self._rows.items():
            if mask & pivot:
                mask ^= m
                rhs ^= r
        return mask, rhs

    def add(self, mask: int, rhs: int = 0) -> bool:
        """Insert a row; returns True if it increased the rank."""
        mask, rhs = self._reduce(mask, rhs & 1)
        if mask == 0:
            if rhs:
                self.conflicts += 1
            return False
        pivot = mask & -mask
        for p, (m, r) in list(self._rows.items()):
            if m & pivot:
                self._rows[p] = (m ^ mask, r ^ rhs)
        self._rows[pivot] = (mask, rhs)
        return True

    def solve(self, target: int) -> int | None:
        """Value of the combination ``target`` if it lies in the row space, else None."""
        mask, rhs = self._reduce(target, 0)
        return rhs if mask == 0 else None

    def determined(self, target: int) -> bool:
        return self.solve(target) is not None

    @property
    def rank(self) -> int:
        return len(self._rows)
