"""Append-only record of a simulation run."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import ExperimentConfig
from .exceptions import TraceError
from .protocol import Event, p_from_exponent
from .topology import Topology


@dataclass
class Trace:
    """Everything recorded by :func:`jadelab.engine.run`.

    Per-round aggregates (``successes``, ``mean_p``, ``mean_T``, ...) always
    cover every round; ``mean_p``/``mean_T`` describe the state at the start
    of the round. Node-state snapshots and cumulative per-node counters are
    taken at ``snap_rounds``: every ``snapshot_stride`` rounds plus the final
    round index ``rounds`` (state after the last round). Counters at snapshot
    ``r`` cover rounds ``[0, r)``.

    At ``detail == "full"`` the per-node, per-round arrays ``tx``, ``jam``,
    ``events`` and ``peers`` are kept as well.
    """

    config: ExperimentConfig
    topology: Topology
    rounds: int
    successes: np.ndarray
    transmissions: np.ndarray
    jammed: np.ndarray
    mean_p: np.ndarray
    mean_T: np.ndarray
    snap_rounds: np.ndarray
    snap_k: np.ndarray
    snap_T: np.ndarray
    snap_c: np.ndarray
    cum_f: np.ndarray
    cum_s: np.ndarray
    cum_o: np.ndarray
    cum_jam: np.ndarray
    window_worst: np.ndarray
    tx: Optional[np.ndarray] = None
    jam: Optional[np.ndarray] = None
    events: Optional[np.ndarray] = None
    peers: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.topology.n

    @property
    def is_full(self) -> bool:
        return self.events is not None

    def snapshot_index(self, round: int, nearest: bool = False) -> int:
        """Index into ``snap_*`` for ``round``.

        With ``nearest``, the closest snapshot round is used (earlier on ties).
        """
        if len(self.snap_rounds) == 0:
            raise TraceError("trace holds no snapshots")
        i = int(np.searchsorted(self.snap_rounds, round))
        if i < len(self.snap_rounds) and self.snap_rounds[i] == round:
            return i
        if not nearest:
            raise TraceError(f"no snapshot at round {round}")
        cands = [j for j in (i - 1, i) if 0 <= j < len(self.snap_rounds)]
        return min(cands, key=lambda j: (abs(int(self.snap_rounds[j]) - round), j))

    def snapshot_p(self, index: int) -> np.ndarray:
        return p_from_exponent(self.snap_k[index], self.config.protocol)

    def event_counts(self, start: int, stop: int, event: Event) -> np.ndarray:
        if not self.is_full:
            raise TraceError("per-round events are only kept at detail='full'")
        return (self.events[start:stop] == event).sum(axis=0)
