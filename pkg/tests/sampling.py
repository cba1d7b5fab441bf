"""Random feasible (channel, power allocation) draws in the strong-interference regime."""

import numpy as np

from irclab.gaussian.model import GaussianChannel, PowerAllocation


def draw_channel(rng: np.random.Generator) -> GaussianChannel:
    P = 10 ** rng.uniform(0, 8)
    h_d = 10 ** rng.uniform(-2, 1)
    h_c = h_d * 10 ** rng.uniform(1e-3, 2)
    h_r = 10 ** rng.uniform(-2, 2) * rng.choice([-1, 1])
    h_s = 10 ** rng.uniform(-2, 2)
    return GaussianChannel(h_d=h_d, h_c=h_c, h_r=h_r, h_s=h_s, P=P)


def draw_allocation(rng: np.random.Generator, ch: GaussianChannel, W=None, L=None) -> PowerAllocation:
    """Random split of both budgets; some components are switched off at random."""
    W = W or int(rng.integers(1, 5))
    L = L or int(rng.integers(1, 5))
    n = 2 * W + L + 2
    w = rng.dirichlet(np.ones(n + 1))[:n] * (rng.random(n) > 0.25)
    tx = w * ch.P
    cn = np.sort(tx[:W])[::-1]
    relay = rng.dirichlet(np.ones(4))[:3] * (rng.random(3) > 0.25) * ch.P
    # relay CN power is tied to the transmitters'; shrink CN to fit the relay's share
    ratio = ch.h_c**2 / ch.h_r**2
    if cn.sum() * ratio > relay[0]:
        cn = cn * (relay[0] / (cn.sum() * ratio))
    return PowerAllocation(
        P_cn=tuple(cn), P_cnF=tuple(tx[W:2 * W]), P_cf=tuple(tx[2 * W:2 * W + L]),
        P_df=tx[2 * W + L], P_cm=tx[2 * W + L + 1], P_r_cf=relay[1], P_r_df=relay[2],
    )


def draw_feasible(rng: np.random.Generator, W=None, L=None):
    ch = draw_channel(rng)
    pa = draw_allocation(rng, ch, W, L)
    pa.check(ch)
    return ch, pa
