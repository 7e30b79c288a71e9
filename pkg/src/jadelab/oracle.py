"""Exact channel probabilities for a single listener.

For independent senders with probabilities ``p_1..p_m`` around a listener:

* ``q0`` = probability that nobody transmits (idle channel),
* ``q1`` = probability that exactly one transmits (a reception).

``exact_q0_q1`` uses the closed-form products, ``enumerate_q0_q1`` sums over
all ``2^m`` transmit patterns, and ``empirical_vs_exact`` estimates both by
pushing the engine's own coin streams and channel resolution through many
disjoint stars at once.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .engine import resolve_arrays
from .protocol import Event
from .rng import Purpose, RoundStreams
from .topology import build_udg, place_explicit

TOLERANCE = 1e-12
MAX_ENUMERATION = 20


def _as_probs(pv: Sequence[float]) -> np.ndarray:
    p = np.asarray(pv, dtype=np.float64).reshape(-1)
    if np.any((p <= 0.0) | (p >= 1.0)) or not np.all(np.isfinite(p)):
        raise ValueError("send probabilities must lie strictly between 0 and 1")
    return p


def exact_q0_q1(pv: Sequence[float]) -> tuple[float, float]:
    p = _as_probs(pv)
    if len(p) == 0:
        return 1.0, 0.0
    miss = 1.0 - p
    # products of all (1 - p_j) except j = i, without dividing by (1 - p_i)
    before = np.concatenate(([1.0], np.cumprod(miss[:-1])))
    after = np.concatenate((np.cumprod(miss[::-1][:-1])[::-1], [1.0]))
    q0 = float(np.prod(miss))
    q1 = float(np.sum(p * before * after))
    return q0, q1


def enumerate_q0_q1(pv: Sequence[float]) -> tuple[float, float]:
    """Brute force over every transmit pattern (``m <= 20``)."""
    p = _as_probs(pv)
    if len(p) > MAX_ENUMERATION:
        raise ValueError(f"enumeration is capped at m = {MAX_ENUMERATION}")
    weight = np.ones(1)
    senders = np.zeros(1, dtype=np.int64)
    for pi in p:
        weight = np.concatenate((weight * (1.0 - pi), weight * pi))
        senders = np.concatenate((senders, senders + 1))
    return float(weight[senders == 0].sum()), float(weight[senders == 1].sum())


def check_lemma1(pv: Sequence[float], p_hat: float, slack: float = TOLERANCE) -> bool:
    """``q0 * p <= q1 <= q0 * p / (1 - p_hat)`` with ``p = sum(pv)``.

    Raises ``ValueError`` if some entry exceeds ``p_hat``, since the upper
    bound only holds under that precondition.
    """
    p = _as_probs(pv)
    if np.any(p > p_hat):
        raise ValueError(f"every send probability must be <= p_hat = {p_hat}")
    q0, q1 = exact_q0_q1(p)
    total = float(p.sum())
    return q0 * total - slack <= q1 <= q0 * total / (1.0 - p_hat) + slack


def _stars(m: int, count: int):
    """``count`` far-apart stars: a listener with ``m`` leaves at radius 0.4."""
    side = max(1, math.ceil(math.sqrt(count)))
    ang = 2 * math.pi * np.arange(m) / max(m, 1)
    ring = 0.4 * np.column_stack([np.cos(ang), np.sin(ang)])
    pts = []
    for i in range(count):
        c = 3.0 * np.array([i % side, i // side], dtype=np.float64)
        pts.append(c[None, :])
        pts.append(c + ring)
    return build_udg(place_explicit(np.vstack(pts)))


def empirical_vs_exact(
    pv: Sequence[float], trials: int, seed: int = 0, batch: int = 1000
) -> dict:
    """Monte Carlo idle / single-sender frequencies against the exact values.

    Each simulated round resolves ``batch`` independent stars, each a
    never-transmitting listener surrounded by senders with probabilities
    ``pv``; one star-round is one trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = _as_probs(pv)
    m = len(p)
    B = min(trials, batch)
    topo = _stars(m, B)
    listeners = np.arange(B) * (m + 1)
    probs = np.tile(np.concatenate(([0.0], p)), B)
    coins = RoundStreams(seed, Purpose.TRANSMIT)
    no_jam = np.zeros(topo.n, dtype=bool)

    idle = one = done = 0
    t = 0
    while done < trials:
        take = min(B, trials - done)
        tx = coins.at(t).random(topo.n) < probs
        events, _ = resolve_arrays(topo, tx, no_jam)
        ev = events[listeners[:take]]
        idle += int((ev == Event.IDLE).sum())
        one += int((ev == Event.RECEIVED).sum())
        done += take
        t += 1

    q0, q1 = exact_q0_q1(p)
    rep = {"m": m, "trials": trials, "q0_exact": q0, "q1_exact": q1,
           "q0_sim": idle / trials, "q1_sim": one / trials}
    for key, q in (("q0", q0), ("q1", q1)):
        se = math.sqrt(q * (1.0 - q) / trials)
        dev = abs(rep[f"{key}_sim"] - q)
        rep[f"{key}_se"] = se
        rep[f"{key}_within_3se"] = dev <= 3.0 * se if se > 0 else dev == 0.0
    return rep
