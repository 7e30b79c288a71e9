"""Jamming strategies and the (T, 1-eps) budget machinery.

A strategy proposes a boolean jam mask (True = jammed) for the upcoming round
from a :class:`HistoryView` of completed rounds. Transmit decisions of the
upcoming round are never visible to it. :class:`JamWindow` clips proposals so
that no node is jammed more than ``floor((1-eps) T)`` times in any window of
``T`` consecutive rounds, and :func:`audit_masks` re-checks that post hoc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Optional

import numpy as np

from .exceptions import ConfigError

if TYPE_CHECKING:
    from .protocol import ProtocolParams, StateArrays
    from .topology import Topology


@dataclass(frozen=True)
class AdversaryBudget:
    T: int
    epsilon: float

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ConfigError(f"T: must be an integer >= 1, got {self.T}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon: must satisfy 0 < epsilon < 1, got {self.epsilon}")

    @property
    def max_jams(self) -> int:
        """Jammed rounds allowed per node per window of ``T``."""
        # tolerance absorbs representation error, e.g. (1 - 0.3) * 200
        return int(math.floor((1.0 - self.epsilon) * self.T + 1e-9))

    @property
    def clear_rounds(self) -> int:
        """Non-jammed rounds per T-interval in the periodic attack patterns."""
        return self.T - self.max_jams


@dataclass
class HistoryView:
    """What the adversary may look at before deciding round ``round``.

    Arrays are read-only views into engine state and are only valid for the
    duration of the ``decide`` call.
    """

    round: int
    topology: "Topology"
    params: "ProtocolParams"
    state: "StateArrays"
    p: np.ndarray
    prev_transmitters: Optional[np.ndarray] = None
    prev_events: Optional[np.ndarray] = None
    prev_jam: Optional[np.ndarray] = None
    recent_jams: Optional[np.ndarray] = None  # jam counts over the last T-1 rounds
    trace: Any = None  # full trace so far, when recorded at full detail

    @property
    def n(self) -> int:
        return self.topology.n


class Strategy:
    """Base class; subclasses implement :meth:`decide`."""

    kind = "base"

    def decide(self, view: HistoryView, round: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}


class NoJam(Strategy):
    kind = "nojam"

    def decide(self, view, round, rng):
        return np.zeros(view.n, dtype=bool)


class Bernoulli(Strategy):
    """Each node independently jammed with probability ``prob`` every round."""

    kind = "bernoulli"

    def __init__(self, prob: float):
        if not 0.0 <= prob <= 1.0:
            raise ConfigError(f"prob: must lie in [0, 1], got {prob}")
        self.prob = float(prob)

    def decide(self, view, round, rng):
        return rng.random(view.n) < self.prob

    def params(self):
        return {"prob": self.prob}


class _Periodic(Strategy):
    def __init__(self, budget: AdversaryBudget):
        self.budget = budget

    def phase(self, round: int) -> int:
        return round % self.budget.T

    def params(self):
        return {}


class Burst1Uniform(_Periodic):
    """1-uniform bursts: everyone clear for the first ``T - floor((1-eps)T)``
    rounds of each T-interval, everyone jammed for the rest."""

    kind = "burst1u"

    def decide(self, view, round, rng):
        jam = self.phase(round) >= self.budget.clear_rounds
        return np.full(view.n, jam, dtype=bool)


def _groups(U: Iterable[int], v: int, n: Optional[int] = None) -> tuple[np.ndarray, int]:
    U = np.unique(np.asarray(list(U), dtype=np.int64))
    v = int(v)
    if len(U) == 0:
        raise ConfigError("U: attack group must be nonempty")
    if v in set(U.tolist()):
        raise ConfigError(f"v: victim {v} must not belong to U")
    if n is not None and (U.min() < 0 or U.max() >= n or not 0 <= v < n):
        raise ConfigError("U/v: node ids out of range")
    return U, v


class Split2Uniform(_Periodic):
    """Per T-interval, U is clear at the start and ``v`` at the end; both are
    jammed otherwise. Nodes outside ``U | {v}`` are never jammed."""

    kind = "split2u"

    def __init__(self, budget: AdversaryBudget, U: Iterable[int], v: int, n: Optional[int] = None):
        super().__init__(budget)
        self.U, self.v = _groups(U, v, n)

    def decide(self, view, round, rng):
        ph = self.phase(round)
        clear = self.budget.clear_rounds
        mask = np.zeros(view.n, dtype=bool)
        mask[self.U] = ph >= clear
        mask[self.v] = ph < self.budget.T - clear
        return mask

    def params(self):
        return {"U": self.U.tolist(), "v": self.v}


class LowDensity(_Periodic):
    """``v`` is never jammed; U is clear only at the start of each T-interval."""

    kind = "lowdensity"

    def __init__(self, budget: AdversaryBudget, U: Iterable[int], v: int, n: Optional[int] = None):
        super().__init__(budget)
        self.U, self.v = _groups(U, v, n)

    def decide(self, view, round, rng):
        mask = np.zeros(view.n, dtype=bool)
        mask[self.U] = self.phase(round) >= self.budget.clear_rounds
        return mask

    def params(self):
        return {"U": self.U.tolist(), "v": self.v}


class Greedy(Strategy):
    """Adaptive jammer that reads the exact send probabilities.

    Proposes to jam every node whose probability of receiving a message this
    round (exactly one transmitting neighbor) is at least ``threshold``. Meant
    to run behind the budget enforcer, which decides where the budget runs out.
    """

    kind = "greedy"

    def __init__(self, threshold: float = 0.2):
        if not 0.0 <= threshold <= 1.0:
            raise ConfigError(f"threshold: must lie in [0, 1], got {threshold}")
        self.threshold = float(threshold)

    def decide(self, view, round, rng):
        A = view.topology.matrix
        p = view.p
        log_q0 = A @ np.log1p(-p)
        q1 = np.exp(log_q0) * (A @ (p / (1.0 - p)))
        return q1 >= self.threshold

    def params(self):
        return {"threshold": self.threshold}


STRATEGY_KINDS = ("nojam", "bernoulli", "burst1u", "split2u", "lowdensity", "greedy")


def make_strategy(kind: str, params: Mapping[str, Any], budget: AdversaryBudget, n: int) -> Strategy:
    """Instantiate a strategy from its config spec."""
    params = dict(params or {})
    try:
        if kind == "nojam":
            return NoJam()
        if kind == "bernoulli":
            return Bernoulli(params.get("prob", 1.0 - budget.epsilon))
        if kind == "burst1u":
            return Burst1Uniform(budget)
        if kind == "split2u":
            return Split2Uniform(budget, params["U"], params["v"], n)
        if kind == "lowdensity":
            return LowDensity(budget, params["U"], params["v"], n)
        if kind == "greedy":
            return Greedy(params.get("threshold", 0.2))
    except KeyError as e:
        raise ConfigError(f"adversary.params: missing {e.args[0]!r} for kind {kind!r}") from None
    raise ConfigError(f"adversary.kind: unknown strategy {kind!r} (expected one of {STRATEGY_KINDS})")


def enforce(budget: AdversaryBudget, proposed: np.ndarray, recent_jams: np.ndarray) -> np.ndarray:
    """Clear bits that would push a node over budget.

    ``recent_jams`` holds each node's jammed-round count over the previous
    ``T - 1`` rounds (or fewer at the start of a run).
    """
    proposed = np.asarray(proposed, dtype=bool)
    return proposed & (np.asarray(recent_jams) + 1 <= budget.max_jams)


class JamWindow:
    """Ring buffer of the last ``T`` jam masks.

    Tracks per-node counts over the current window and the worst full window
    seen so far, in O(n) per round.
    """

    def __init__(self, budget: AdversaryBudget, n: int):
        self.budget = budget
        self._ring = np.zeros((budget.T, n), dtype=bool)
        self._pos = 0
        self.filled = 0
        self.count = np.zeros(n, dtype=np.int64)
        self.worst = np.zeros(n, dtype=np.int64)

    def recent(self) -> np.ndarray:
        """Per-node jam count over the previous ``T - 1`` rounds."""
        return self.count - self._ring[self._pos]

    def enforce(self, proposed: np.ndarray) -> np.ndarray:
        return enforce(self.budget, proposed, self.recent())

    def push(self, mask: np.ndarray) -> None:
        old = self._ring[self._pos]
        self.count += mask
        self.count -= old
        self._ring[self._pos] = mask
        self._pos = (self._pos + 1) % self.budget.T
        self.filled += 1
        if self.filled >= self.budget.T:
            np.maximum(self.worst, self.count, out=self.worst)


@dataclass
class AuditReport:
    T: int
    epsilon: float
    allowed: int
    worst_window: np.ndarray  # max jammed count over any size-T window, per node
    open_fraction: Optional[np.ndarray] = None  # open / non-jammed rounds, per node
    rounds: int = 0
    violators: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violators

    @property
    def worst_fraction(self) -> np.ndarray:
        return self.worst_window / self.T

    def as_dict(self) -> dict:
        d = {
            "T": self.T,
            "epsilon": self.epsilon,
            "allowed_per_window": self.allowed,
            "rounds": self.rounds,
            "passed": self.passed,
            "violators": self.violators,
            "max_jammed_fraction": float(self.worst_fraction.max()) if len(self.worst_window) else 0.0,
        }
        if self.open_fraction is not None:
            of = self.open_fraction[~np.isnan(self.open_fraction)]
            d["min_open_fraction"] = float(of.min()) if len(of) else None
            d["mean_open_fraction"] = float(of.mean()) if len(of) else None
        return d


def sliding_window_max(masks: np.ndarray, T: int) -> np.ndarray:
    """Per-column max of jammed counts over all windows of exactly ``T`` rows.

    Returns zeros when there are fewer than ``T`` rows.
    """
    masks = np.asarray(masks, dtype=bool)
    R, n = masks.shape
    if R < T:
        return np.zeros(n, dtype=np.int64)
    cs = np.zeros((R + 1, n), dtype=np.int64)
    np.cumsum(masks, axis=0, out=cs[1:])
    return (cs[T:] - cs[:-T]).max(axis=0)


def open_rounds(masks: np.ndarray, topology: "Topology") -> np.ndarray:
    """Boolean ``(R, n)``: node non-jammed and at least one neighbor non-jammed."""
    clear = ~np.asarray(masks, dtype=bool)
    nb_clear = (topology.matrix @ clear.T.astype(np.int32)).T
    return clear & (nb_clear > 0)


def audit_masks(
    masks: np.ndarray, budget: AdversaryBudget, topology: Optional["Topology"] = None
) -> AuditReport:
    """Post-hoc audit of a full ``(rounds, n)`` jam history."""
    masks = np.asarray(masks, dtype=bool)
    worst = sliding_window_max(masks, budget.T)
    open_frac = None
    if topology is not None:
        f = (~masks).sum(axis=0)
        o = open_rounds(masks, topology).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            open_frac = np.where(f > 0, o / np.maximum(f, 1), np.nan)
    return AuditReport(
        T=budget.T,
        epsilon=budget.epsilon,
        allowed=budget.max_jams,
        worst_window=worst,
        open_fraction=open_frac,
        rounds=masks.shape[0],
        violators=np.flatnonzero(worst > budget.max_jams).tolist(),
    )


def audit(trace, budget: Optional[AdversaryBudget] = None) -> AuditReport:
    """Audit a :class:`~jadelab.trace.Trace`.

    Full-detail traces are re-scanned from their jam masks; metrics-only
    traces fall back to the engine's online window tracker, which is only
    available for the trace's own budget.
    """
    budget = budget or trace.config.budget
    if trace.jam is not None:
        return audit_masks(trace.jam, budget, trace.topology)
    if budget != trace.config.budget:
        raise ValueError("metrics-only traces can only be audited against their own budget")
    f = trace.cum_f[-1]
    o = trace.cum_o[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        open_frac = np.where(f > 0, o / np.maximum(f, 1), np.nan)
    worst = trace.window_worst
    return AuditReport(
        T=budget.T,
        epsilon=budget.epsilon,
        allowed=budget.max_jams,
        worst_window=worst,
        open_fraction=open_frac,
        rounds=trace.rounds,
        violators=np.flatnonzero(worst > budget.max_jams).tolist(),
    )
