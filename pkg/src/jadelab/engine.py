"""Synchronous round loop.

Each round runs, in order: adversary decision (plus budget enforcement),
transmit coin flips, channel resolution, protocol updates, and recording.
All randomness comes from counter-based streams derived from the master seed,
so a run is a pure function of its :class:`ExperimentConfig`.
"""
from __future__ import annotations

import logging
from typing import Iterable, Optional

import numpy as np

from .adversary import Bernoulli, HistoryView, JamWindow, enforce, make_strategy
from .config import ExperimentConfig
from .protocol import Event, Observation, StateArrays, apply_observations, p_from_exponent
from .rng import Purpose, RoundStreams, derive_stream
from .topology import Topology, build_udg
from .trace import Trace

__all__ = ["resolve_round", "resolve_arrays", "run", "derive_stream", "Purpose"]

log = logging.getLogger(__name__)

_TRANSMITTED, _IDLE, _BUSY, _RECEIVED = (int(e) for e in Event)
_BY_COUNT = np.array([_IDLE, _RECEIVED, _BUSY], dtype=np.int8)
# dense adjacency is faster for the per-round open-round count up to here
_DENSE_LIMIT = 3000


def _gather(topology: Topology, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated neighbor lists of ``rows`` and the row each entry came from."""
    starts = topology.indptr[rows]
    lengths = topology.indptr[rows + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    owner = np.repeat(np.arange(len(rows)), lengths)
    offs = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return topology.indices[starts[owner] + offs], rows[owner]


def resolve_arrays(
    topology: Topology, tx: np.ndarray, jam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized channel resolution.

    Returns ``(events, peers)``: an int8 :class:`Event` code per node, and the
    sender id for ``RECEIVED`` entries (-1 elsewhere).
    """
    n = topology.n
    tx = np.asarray(tx, dtype=bool)
    jam = np.asarray(jam, dtype=bool)
    nbrs, senders = _gather(topology, np.flatnonzero(tx))
    count = np.bincount(nbrs, minlength=n)
    events = _BY_COUNT[np.minimum(count, 2)]
    np.putmask(events, jam, _BUSY)
    np.putmask(events, tx, _TRANSMITTED)
    peers = np.full(n, -1, dtype=np.int32)
    got = events == _RECEIVED
    if got.any():
        sender_sum = np.bincount(nbrs, weights=senders, minlength=n)
        peers[got] = sender_sum[got]
    return events, peers


def resolve_round(
    topology: Topology, transmitters: Iterable[int], jam: np.ndarray
) -> list[Observation]:
    """Per-node :class:`Observation` for one round."""
    tx = np.zeros(topology.n, dtype=bool)
    tx[np.fromiter(transmitters, dtype=np.int64)] = True
    events, peers = resolve_arrays(topology, tx, jam)
    return [
        Observation.received(int(pe)) if ev == Event.RECEIVED else Observation(Event(int(ev)))
        for ev, pe in zip(events, peers)
    ]


def run(
    config: ExperimentConfig,
    topology: Optional[Topology] = None,
    strategy=None,
    initial_k: Optional[np.ndarray] = None,
    adapt: bool = True,
) -> Trace:
    """Run one experiment.

    ``topology`` and ``strategy`` override what the config would build;
    ``initial_k`` sets starting probability exponents (default all 0, i.e.
    every node starts at ``p_hat``). ``adapt=False`` freezes every node's
    state, which is only useful for checking coin flips and channel
    resolution against closed forms.
    """
    seed = config.seed
    R = config.total_rounds
    params = config.protocol
    if topology is None:
        topology = build_udg(config.topology.place(seed))
    n = topology.n
    budget = config.budget
    if strategy is None:
        strategy = make_strategy(config.adversary.kind, config.adversary.params, budget, n)
    needs_rng = isinstance(strategy, Bernoulli) or getattr(strategy, "uses_rng", False)
    if n <= _DENSE_LIMIT:
        A = topology.matrix.toarray().astype(np.float32)
    else:
        A = topology.matrix
    coins = RoundStreams(seed, Purpose.TRANSMIT)
    adv_streams = RoundStreams(seed, Purpose.ADVERSARY) if needs_rng else None
    enforcing = config.adversary.enforce
    full = config.detail == "full"
    stride = config.snapshot_stride

    st = StateArrays(n)
    if initial_k is not None:
        st.k[:] = np.asarray(initial_k, dtype=np.int64)
        if (st.k < 0).any():
            raise ValueError("initial_k must be non-negative")
    window = JamWindow(budget, n)

    snap_rounds = np.unique(np.r_[np.arange(0, R, stride), R]).astype(np.int64)
    S = len(snap_rounds)
    snap_k = np.empty((S, n), dtype=np.int64)
    snap_T = np.empty((S, n), dtype=np.int32)
    snap_c = np.empty((S, n), dtype=np.int32)
    cum = {key: np.zeros((S, n), dtype=np.int64) for key in ("f", "s", "o", "jam")}
    f = np.zeros(n, np.int64)
    s = np.zeros(n, np.int64)
    o = np.zeros(n, np.int64)
    jc = np.zeros(n, np.int64)

    successes = np.zeros(R, dtype=np.int32)
    transmissions = np.zeros(R, dtype=np.int32)
    jammed = np.zeros(R, dtype=np.int32)
    mean_p = np.zeros(R)
    mean_T = np.zeros(R)

    if full:
        tx_all = np.zeros((R, n), dtype=bool)
        jam_all = np.zeros((R, n), dtype=bool)
        ev_all = np.zeros((R, n), dtype=np.int8)
        peer_all = np.full((R, n), -1, dtype=np.int32)
    else:
        tx_all = jam_all = ev_all = peer_all = None

    trace = Trace(
        config=config, topology=topology, rounds=R,
        successes=successes, transmissions=transmissions, jammed=jammed,
        mean_p=mean_p, mean_T=mean_T, snap_rounds=snap_rounds,
        snap_k=snap_k, snap_T=snap_T, snap_c=snap_c,
        cum_f=cum["f"], cum_s=cum["s"], cum_o=cum["o"], cum_jam=cum["jam"],
        window_worst=window.worst,
        tx=tx_all, jam=jam_all, events=ev_all, peers=peer_all,
    )

    def snapshot(i: int) -> None:
        snap_k[i] = st.k
        snap_T[i] = st.T
        snap_c[i] = st.c
        cum["f"][i] = f
        cum["s"][i] = s
        cum["o"][i] = o
        cum["jam"][i] = jc

    prev = (None, None, None)
    si = 0
    log.debug("running %s: n=%d rounds=%d", config.name, n, R)
    for t in range(R):
        p = p_from_exponent(st.k, params)
        mean_p[t] = p.sum() / n
        mean_T[t] = st.T.sum() / n
        if snap_rounds[si] == t:
            snapshot(si)
            si += 1

        recent = window.recent()
        view = HistoryView(
            round=t, topology=topology, params=params, state=st, p=p,
            prev_transmitters=prev[0], prev_events=prev[1], prev_jam=prev[2],
            recent_jams=recent, trace=trace if full else None,
        )
        rng = adv_streams.at(t) if needs_rng else None
        mask = np.asarray(strategy.decide(view, t, rng), dtype=bool)
        if enforcing:
            mask = enforce(budget, mask, recent)
        window.push(mask)

        tx = coins.at(t).random(n) < p
        events, peers = resolve_arrays(topology, tx, mask)
        if adapt:
            apply_observations(st, events, t, params)

        clear = ~mask
        recv = events == _RECEIVED
        f += clear
        s += recv
        jc += mask
        o += clear & ((A @ clear.astype(A.dtype)) > 0)
        successes[t] = recv.sum()
        transmissions[t] = tx.sum()
        jammed[t] = mask.sum()
        if full:
            tx_all[t] = tx
            jam_all[t] = mask
            ev_all[t] = events
            peer_all[t] = peers
        prev = (tx, events, mask)

    snapshot(si)
    return trace
