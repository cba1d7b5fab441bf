"""Value types for the symmetric Gaussian interference relay channel."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class GaussianChannel:
    """Real gains of the symmetric IRC and the per-node power budget.

    ``h_d`` desired link, ``h_c`` cross (interference) link, ``h_r`` relay to
    destination, ``h_s`` source to relay. Noise is unit variance everywhere.
    """

    h_d: float
    h_c: float
    h_r: float
    h_s: float
    P: float

    def __post_init__(self):
        for name in ("h_d", "h_c", "h_r", "h_s", "P"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.P <= 0:
            raise ValueError(f"power budget must be positive, got P={self.P}")

    @property
    def strong_interference(self) -> bool:
        return self.h_c**2 > self.h_d**2

    @property
    def snr(self) -> float:
        """Direct-link SNR ``P h_d^2``."""
        return self.P * self.h_d**2

    @classmethod
    def from_exponents(cls, alpha: float, beta: float, gamma: float, snr: float, P: float | None = None):
        """Synthesize gains so that the exponent ratios equal ``(alpha, beta, gamma)`` at ``P h_d^2 = snr``.

        With ``P`` omitted the direct gain is fixed to one and ``P = snr``.
        """
        if snr <= 1:
            raise ValueError("snr must exceed 1 for the exponent ratios to be defined")
        if P is None:
            P = snr
        h_d = math.sqrt(snr / P)
        return cls(
            h_d=h_d,
            h_c=math.sqrt(snr**alpha / P),
            h_r=math.sqrt(snr**beta / P),
            h_s=math.sqrt(snr**gamma / P),
            P=P,
        )


@dataclass(frozen=True)
class PowerAllocation:
    """Per-split transmit powers of one transmitter and the relay's split.

    ``P_cn[w]`` is the power of the current CN codeword of split ``w`` and
    ``P_cnF[w]`` the power spent on the future codeword of the same split.
    The relay's CN power is not a free variable; see :meth:`relay_cn_powers`.
    """

    P_cn: tuple[float, ...]
    P_cnF: tuple[float, ...]
    P_cf: tuple[float, ...]
    P_df: float = 0.0
    P_cm: float = 0.0
    P_r_cf: float = 0.0
    P_r_df: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "P_cn", tuple(float(x) for x in self.P_cn))
        object.__setattr__(self, "P_cnF", tuple(float(x) for x in self.P_cnF))
        object.__setattr__(self, "P_cf", tuple(float(x) for x in self.P_cf))
        for name in ("P_df", "P_cm", "P_r_cf", "P_r_df"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if len(self.P_cn) != len(self.P_cnF):
            raise ValueError("P_cn and P_cnF must have one entry per CN split")
        if len(self.P_cn) < 1 or len(self.P_cf) < 1:
            raise ValueError("at least one CN split and one CF split are required")

    @property
    def W(self) -> int:
        return len(self.P_cn)

    @property
    def L(self) -> int:
        return len(self.P_cf)

    @classmethod
    def zeros(cls, W: int = 2, L: int = 2) -> PowerAllocation:
        return cls(P_cn=(0.0,) * W, P_cnF=(0.0,) * W, P_cf=(0.0,) * L)

    def relay_cn_powers(self, ch: GaussianChannel) -> tuple[float, ...]:
        scale = ch.h_c**2 / ch.h_r**2 if ch.h_r != 0 else (math.inf if ch.h_c != 0 else 0.0)
        return tuple(scale * p if p > 0 else 0.0 for p in self.P_cn)

    def tx_power(self) -> float:
        return sum(self.P_cn) + sum(self.P_cnF) + sum(self.P_cf) + self.P_df + self.P_cm

    def relay_power(self, ch: GaussianChannel) -> float:
        return self.P_r_cf + self.P_r_df + sum(self.relay_cn_powers(ch))

    def check(self, ch: GaussianChannel, rtol: float = 1e-12):
        """Raise ``ValueError`` unless both power budgets and the CN ordering hold."""
        values = (*self.P_cn, *self.P_cnF, *self.P_cf, self.P_df, self.P_cm, self.P_r_cf, self.P_r_df)
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError("all powers must be finite and non-negative")
        limit = ch.P * (1 + rtol)
        if self.tx_power() > limit:
            raise ValueError(f"transmitter budget violated: {self.tx_power():.6g} > P={ch.P:.6g}")
        if self.relay_power(ch) > limit:
            raise ValueError(f"relay budget violated: {self.relay_power(ch):.6g} > P={ch.P:.6g}")
        if any(a < b for a, b in zip(self.P_cn, self.P_cn[1:])):
            raise ValueError("CN split powers must be non-increasing in the split index")


@dataclass(frozen=True)
class RateAllocation:
    """Per-user message rates in bits per channel use."""

    R_cn: tuple[float, ...]
    R_cf: tuple[float, ...]
    R_cm: float
    R_df: float
    R_r_cf: float
    binding: dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def sum_rate(self) -> float:
        return 2.0 * (sum(self.R_cn) + sum(self.R_cf) + self.R_cm + self.R_df)
