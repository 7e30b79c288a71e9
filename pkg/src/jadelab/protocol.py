"""JADE per-node state machine.

The send probability is stored as an integer exponent ``k`` with
``p_v = p_hat * (1 + gamma) ** -k``. Every update moves ``k`` by an integer,
so probabilities never drift no matter how many rounds are simulated.

Two equivalent code paths exist: :func:`apply_observation` works on a single
immutable :class:`NodeState`, and :func:`apply_observations` updates the
engine's per-node arrays in place for a whole round at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional

import numpy as np

from .exceptions import ConfigError

# Largest threshold cap we represent; keeps T_v inside int64.
_T_CAP_LIMIT = 2**62

NO_ROUND = np.iinfo(np.int64).min // 2


class Event(IntEnum):
    TRANSMITTED = 0
    IDLE = 1
    BUSY = 2
    RECEIVED = 3

    @property
    def label(self) -> str:
        return _LABELS[self]


# plain ints for hot loops
_TRANSMITTED, _IDLE, _BUSY, _RECEIVED = (int(e) for e in Event)

_LABELS = {
    Event.TRANSMITTED: "transmit",
    Event.IDLE: "idle",
    Event.BUSY: "busy",
    Event.RECEIVED: "receive",
}


@dataclass(frozen=True)
class Observation:
    """What one node perceived in one round."""

    event: Event
    sender: Optional[int] = None

    def __post_init__(self):
        if (self.event == Event.RECEIVED) != (self.sender is not None):
            raise ValueError("sender is required for, and only for, RECEIVED")

    @classmethod
    def transmitted(cls) -> "Observation":
        return cls(Event.TRANSMITTED)

    @classmethod
    def idle(cls) -> "Observation":
        return cls(Event.IDLE)

    @classmethod
    def busy(cls) -> "Observation":
        return cls(Event.BUSY)

    @classmethod
    def received(cls, sender: int) -> "Observation":
        return cls(Event.RECEIVED, int(sender))


@dataclass(frozen=True)
class ProtocolParams:
    p_hat: float = 1.0 / 24.0
    gamma: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.p_hat <= 1.0 / 24.0):
            raise ConfigError(f"p_hat: must satisfy 0 < p_hat <= 1/24, got {self.p_hat}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ConfigError(f"gamma: must be a positive finite number, got {self.gamma}")

    @property
    def T_cap(self) -> int:
        """``floor(2 ** (1 / (4 gamma)))``, at least 1."""
        x = 1.0 / (4.0 * self.gamma)
        if x >= 62:
            return _T_CAP_LIMIT
        return max(1, int(math.floor(2.0 ** x)))

    @property
    def log_step(self) -> float:
        return math.log1p(self.gamma)


@dataclass(frozen=True)
class NodeState:
    k: int = 0
    T: int = 1
    c: int = 1
    last_useful_round: Optional[int] = None
    last_round: Optional[int] = None  # last round applied, for ordering checks


def init_state(params: ProtocolParams) -> NodeState:
    return NodeState()


def current_p(s: NodeState, params: ProtocolParams) -> float:
    return p_from_exponent(s.k, params)


def log_p_from_exponent(k, params: ProtocolParams):
    """Natural log of the send probability; exact in the exponent."""
    return math.log(params.p_hat) - np.asarray(k, dtype=np.float64) * params.log_step


def p_from_exponent(k, params: ProtocolParams):
    """``p_hat * (1 + gamma) ** -k`` for scalar or array ``k``.

    Very large ``k`` underflows to 0.0 in double precision; the exponent
    itself is unaffected.
    """
    out = np.exp(log_p_from_exponent(k, params))
    if np.ndim(out) == 0:
        # exp(log(p_hat)) may differ from p_hat in the last bit
        return params.p_hat if int(k) == 0 else float(out)
    out = np.asarray(out)
    out[np.asarray(k) == 0] = params.p_hat
    return out


def decide_transmit(s: NodeState, params: ProtocolParams, coin: float) -> bool:
    if not 0.0 <= coin < 1.0:
        raise ValueError(f"coin must be in [0, 1), got {coin}")
    return coin < current_p(s, params)


def apply_observation(
    s: NodeState, obs: Observation, round: int, params: ProtocolParams
) -> NodeState:
    """Advance one node's state by one round."""
    if s.last_round is not None and round <= s.last_round:
        raise ValueError(f"round {round} applied after round {s.last_round}")
    k, T, c, useful = s.k, s.T, s.c, s.last_useful_round

    if obs.event == Event.IDLE:
        k = max(k - 1, 0)
        useful = round
    elif obs.event == Event.RECEIVED:
        k += 1
        T = max(T - 1, 1)
        useful = round

    c += 1
    if c > T:
        c = 1
        # no idle or receive among the T most recent rounds, this one included
        if useful is None or useful < round - T + 1:
            k += 1
            T = min(T + 1, params.T_cap)

    return replace(s, k=k, T=T, c=c, last_useful_round=useful, last_round=round)


class StateArrays:
    """Per-node protocol state for a whole network, as int64 arrays."""

    __slots__ = ("k", "T", "c", "last_useful")

    def __init__(self, n: int):
        self.k = np.zeros(n, dtype=np.int64)
        self.T = np.ones(n, dtype=np.int64)
        self.c = np.ones(n, dtype=np.int64)
        self.last_useful = np.full(n, NO_ROUND, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.k)

    def node(self, v: int) -> NodeState:
        lu = int(self.last_useful[v])
        return NodeState(
            k=int(self.k[v]),
            T=int(self.T[v]),
            c=int(self.c[v]),
            last_useful_round=None if lu == NO_ROUND else lu,
        )

    def copy(self) -> "StateArrays":
        other = StateArrays.__new__(StateArrays)
        for name in self.__slots__:
            setattr(other, name, getattr(self, name).copy())
        return other


def apply_observations(
    st: StateArrays, events: np.ndarray, round: int, params: ProtocolParams
) -> None:
    """Vectorized :func:`apply_observation` over all nodes, in place."""
    idle = events == _IDLE
    recv = events == _RECEIVED
    k, T, c = st.k, st.T, st.c

    k -= idle & (k > 0)
    k += recv
    T -= recv & (T > 1)
    np.putmask(st.last_useful, idle | recv, round)

    c += 1
    over = c > T
    np.putmask(c, over, 1)
    penal = over & (st.last_useful < round + 1 - T)
    k += penal
    T += penal & (T < params.T_cap)
