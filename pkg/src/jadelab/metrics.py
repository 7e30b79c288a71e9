"""Throughput, contention and convergence measurements over traces.

Everything here reads completed :class:`~jadelab.trace.Trace` objects and
never re-derives channel outcomes: reception counts come straight from the
recorded observations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import TraceError
from .protocol import Event, p_from_exponent
from .topology import NUM_SECTORS
from .trace import Trace


@dataclass(frozen=True)
class ThresholdSet:
    """Contention levels for a sector's probability sum."""

    rho_green: float = 5.0
    rho_yellow: float = 5.0 * math.e
    rho_red: float = 5.0 * math.e**2

    def __post_init__(self):
        if not self.rho_green < self.rho_yellow < self.rho_red:
            raise ValueError("thresholds must be strictly increasing")

    def level(self, p_sum: float) -> str:
        if p_sum <= self.rho_green:
            return "green"
        if p_sum <= self.rho_yellow:
            return "yellow"
        if p_sum <= self.rho_red:
            return "red"
        return "over"


THRESHOLDS = ThresholdSet()


@dataclass(frozen=True)
class IntervalStats:
    """Per-node counts over rounds ``[start, stop)``."""

    start: int
    stop: int
    f: np.ndarray  # non-jammed rounds
    s: np.ndarray  # rounds with a successful reception
    o: np.ndarray  # open rounds
    jam: np.ndarray  # jammed rounds

    @property
    def length(self) -> int:
        return self.stop - self.start

    def ratio(self, nodes: Optional[Sequence[int]] = None) -> Optional[float]:
        """``sum s / sum f`` over ``nodes`` (all nodes by default)."""
        idx = slice(None) if nodes is None else np.asarray(nodes, dtype=np.int64)
        f = int(self.f[idx].sum())
        return None if f == 0 else int(self.s[idx].sum()) / f

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "stop": self.stop,
            "sum_f": int(self.f.sum()),
            "sum_s": int(self.s.sum()),
            "sum_o": int(self.o.sum()),
            "sum_jam": int(self.jam.sum()),
            "competitiveness": competitiveness(self),
        }


def interval_stats(trace: Trace, interval: Optional[tuple[int, int]] = None) -> IntervalStats:
    """Exact counts over ``interval`` (whole trace by default).

    Full-detail traces accept any interval; metrics-only traces need both
    bounds to be snapshot rounds.
    """
    start, stop = (0, trace.rounds) if interval is None else map(int, interval)
    if not 0 <= start <= stop <= trace.rounds:
        raise TraceError(f"interval [{start}, {stop}) outside trace of {trace.rounds} rounds")
    if trace.is_full:
        jam = trace.jam[start:stop]
        clear = ~jam
        A = trace.topology.matrix
        nb_clear = (A @ clear.T.astype(np.int32)).T if stop > start else np.zeros_like(clear, int)
        return IntervalStats(
            start, stop,
            f=clear.sum(axis=0),
            s=(trace.events[start:stop] == Event.RECEIVED).sum(axis=0),
            o=(clear & (nb_clear > 0)).sum(axis=0),
            jam=jam.sum(axis=0),
        )
    try:
        a = trace.snapshot_index(start)
        b = trace.snapshot_index(stop)
    except TraceError:
        raise TraceError(
            f"metrics-only trace: interval bounds must be snapshot rounds "
            f"(multiples of {trace.config.snapshot_stride} or {trace.rounds})"
        ) from None
    return IntervalStats(
        start, stop,
        f=trace.cum_f[b] - trace.cum_f[a],
        s=trace.cum_s[b] - trace.cum_s[a],
        o=trace.cum_o[b] - trace.cum_o[a],
        jam=trace.cum_jam[b] - trace.cum_jam[a],
    )


def competitiveness(stats: IntervalStats) -> Optional[float]:
    """``sum_v s_v / sum_v f_v``; ``None`` when no node had a non-jammed round."""
    return stats.ratio()


def disk_contention(trace: Trace, u: int, round: int) -> float:
    """Sum of send probabilities over ``D(u)`` at the snapshot nearest ``round``."""
    i = trace.snapshot_index(round, nearest=True)
    p = trace.snapshot_p(i)
    nb = trace.topology.neighbors(u)
    return float(p[u] + p[nb].sum())


def disk_contention_all(trace: Trace, snapshot: int) -> np.ndarray:
    """Disk contention for every node at snapshot index ``snapshot``."""
    p = trace.snapshot_p(snapshot)
    return p + trace.topology.matrix @ p


def sector_series(trace: Trace, u: int, sector: int) -> tuple[np.ndarray, np.ndarray]:
    """``(snapshot rounds, p_S)`` for one sector of ``u``'s disk."""
    if not 0 <= sector < NUM_SECTORS:
        raise ValueError(f"sector must be in 0..{NUM_SECTORS - 1}, got {sector}")
    members = trace.topology.sector_members(u, sector)
    if len(members) == 0:
        return trace.snap_rounds.copy(), np.zeros(len(trace.snap_rounds))
    p = p_from_exponent(trace.snap_k[:, members], trace.config.protocol)
    return trace.snap_rounds.copy(), p.sum(axis=1)


@dataclass(frozen=True)
class FramePlan:
    """Subframe/frame lengths used by the sector diagnostics."""

    subframe: int
    subframes_per_frame: int = 1

    def __post_init__(self):
        if self.subframe < 1 or self.subframes_per_frame < 1:
            raise ValueError("subframe length and count must be >= 1")

    @property
    def frame(self) -> int:
        return self.subframe * self.subframes_per_frame

    @classmethod
    def for_run(cls, T: int, n: int, gamma: float, epsilon: float, alpha: float = 1.0) -> "FramePlan":
        """``f = alpha [T + log^3 n / (gamma^2 eps)]`` rounded up to a multiple
        of ``T``; ``ceil(alpha log n / eps)`` subframes per frame (base-2 logs)."""
        lg = math.log2(n) if n > 1 else 0.0
        f = alpha * (T + lg**3 / (gamma**2 * epsilon))
        f = max(T, int(math.ceil(f / T)) * T)
        per = max(1, int(math.ceil(alpha * lg / epsilon)))
        return cls(f, per)


def classify_subframes(
    trace: Trace,
    plan: FramePlan,
    u: int,
    sector: int,
    thresholds: ThresholdSet = THRESHOLDS,
) -> list[bool]:
    """One flag per complete subframe: True (good) iff ``p_S <= rho_red`` at
    every snapshot inside it.

    With a snapshot stride above 1 only the snapshot rounds are inspected.
    """
    count = trace.rounds // plan.subframe
    if count == 0:
        raise TraceError(f"trace of {trace.rounds} rounds is shorter than a subframe ({plan.subframe})")
    rounds, p_s = sector_series(trace, u, sector)
    keep = rounds < count * plan.subframe
    bad_sub = np.zeros(count, dtype=bool)
    over = keep & (p_s > thresholds.rho_red)
    bad_sub[np.unique(rounds[over] // plan.subframe)] = True
    return (~bad_sub).tolist()


def convergence_summary(trace: Trace) -> dict[str, np.ndarray]:
    """Columns ``round, mean_p, mean_T, successes`` at each snapshot round."""
    r = trace.snap_rounds[trace.snap_rounds < trace.rounds]
    return {
        "round": r,
        "mean_p": trace.mean_p[r],
        "mean_T": trace.mean_T[r],
        "successes": trace.successes[r],
    }


def tail_mean(series: np.ndarray, fraction: float = 0.1) -> float:
    """Mean over the last ``fraction`` of a per-round series."""
    m = max(1, int(round(len(series) * fraction)))
    return float(np.mean(series[-m:]))


def startup_rounds(trace: Trace, factor: float = 0.5) -> Optional[int]:
    """First round whose mean send probability is below ``factor * p_hat``."""
    hit = np.flatnonzero(trace.mean_p < factor * trace.config.protocol.p_hat)
    return int(hit[0]) if len(hit) else None


def node_ratio(stats: IntervalStats, v: int) -> Optional[float]:
    """Personal ratio ``s_v / f_v`` (``None`` if ``v`` was always jammed)."""
    return stats.ratio([v])
