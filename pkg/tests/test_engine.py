import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jadelab.adversary import AdversaryBudget
from jadelab.config import AdversarySpec, ExperimentConfig, TopologySpec
from jadelab.engine import resolve_arrays, resolve_round, run
from jadelab.exceptions import ConfigError
from jadelab.protocol import Event, ProtocolParams, StateArrays, apply_observations, p_from_exponent
from jadelab.rng import transmit_coins
from jadelab.topology import build_udg, place_explicit, place_uniform


def cfg(coords=None, kind="nojam", rounds=100, detail="full", **kw):
    topo = (TopologySpec(kind="explicit", coords=coords) if coords is not None
            else TopologySpec(kind="uniform", n=kw.pop("n", 40), side=2.0))
    return ExperimentConfig(
        name="e", topology=topo, adversary=AdversarySpec(kind, kw.pop("params", {})),
        budget=kw.pop("budget", AdversaryBudget(T=20, epsilon=0.3)),
        rounds=rounds, seed=kw.pop("seed", 2), detail=detail, **kw,
    )


def brute_resolve(adj, tx, jam):
    out = []
    for u in range(len(adj)):
        if tx[u]:
            out.append((Event.TRANSMITTED, -1))
            continue
        talkers = [w for w in adj[u] if tx[w]]
        if jam[u] or len(talkers) >= 2:
            out.append((Event.BUSY, -1))
        elif len(talkers) == 1:
            out.append((Event.RECEIVED, talkers[0]))
        else:
            out.append((Event.IDLE, -1))
    return out


# -- channel resolution --------------------------------------------------------

TRIANGLE = build_udg(place_explicit([(0, 0), (0.5, 0), (0.25, 0.4)]))


def test_resolve_idle():
    obs = resolve_round(TRIANGLE, [], np.zeros(3, bool))
    assert [o.event for o in obs] == [Event.IDLE] * 3


def test_resolve_jammed_with_one_sender_is_busy():
    obs = resolve_round(TRIANGLE, [1], np.array([True, False, False]))
    assert obs[0].event == Event.BUSY
    assert obs[1].event == Event.TRANSMITTED
    assert obs[2].event == Event.RECEIVED and obs[2].sender == 1


def test_resolve_collision_and_single_sender():
    obs = resolve_round(TRIANGLE, [1, 2], np.zeros(3, bool))
    assert obs[0].event == Event.BUSY
    obs = resolve_round(TRIANGLE, [1], np.zeros(3, bool))
    assert obs[0].event == Event.RECEIVED and obs[0].sender == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 0.6), st.floats(0.0, 0.6))
def test_resolve_matches_brute_force(seed, p_tx, p_jam):
    rng = np.random.default_rng(seed)
    topo = build_udg(place_uniform(25, 2.0, seed=seed))
    tx = rng.random(25) < p_tx
    jam = rng.random(25) < p_jam
    events, peers = resolve_arrays(topo, tx, jam)
    assert [(Event(int(e)), int(p)) for e, p in zip(events, peers)] == brute_resolve(topo.adjacency, tx, jam)


# -- run -----------------------------------------------------------------------

def test_zero_rounds_rejected():
    with pytest.raises(ConfigError, match="rounds"):
        cfg([(0, 0)], rounds=0)


def test_isolated_node_stays_at_cap():
    tr = run(cfg([(0, 0)], rounds=1))
    assert tr.events[0, 0] == Event.IDLE
    assert tr.snap_k[-1, 0] == 0 and tr.snapshot_p(-1)[0] == 1 / 24


def test_run_is_deterministic():
    a, b = run(cfg(kind="bernoulli")), run(cfg(kind="bernoulli"))
    for name in ("tx", "jam", "events", "peers", "snap_k", "snap_T", "snap_c", "mean_p", "mean_T"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    c = run(cfg(kind="bernoulli", seed=3))
    assert not np.array_equal(a.tx, c.tx)


def test_full_and_metrics_detail_agree():
    a = run(cfg(kind="bernoulli", rounds=300, snapshot_stride=50))
    b = run(cfg(kind="bernoulli", rounds=300, snapshot_stride=50, detail="metrics"))
    for name in ("successes", "mean_p", "cum_f", "cum_s", "cum_o", "snap_k"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    assert b.tx is None


def test_transmissions_follow_coins():
    tr = run(cfg(kind="bernoulli", rounds=50))
    params = tr.config.protocol
    st_ = StateArrays(tr.n)
    for t in range(tr.rounds):
        p = p_from_exponent(st_.k, params)
        assert np.array_equal(tr.tx[t], transmit_coins(tr.config.seed, t, tr.n) < p)
        apply_observations(st_, tr.events[t], t, params)


def test_replay_reproduces_snapshots():
    # replaying the recorded events through the protocol reproduces the state
    tr = run(cfg(kind="bernoulli", rounds=120))
    st_ = StateArrays(tr.n)
    for t in range(tr.rounds):
        assert np.array_equal(st_.k, tr.snap_k[t])
        assert np.array_equal(st_.T, tr.snap_T[t])
        apply_observations(st_, tr.events[t], t, tr.config.protocol)
    assert np.array_equal(st_.k, tr.snap_k[-1])


def test_counter_conservation():
    tr = run(cfg(kind="bernoulli", rounds=400))
    R = tr.rounds
    assert (tr.cum_f[-1] + tr.cum_jam[-1] == R).all()
    assert (tr.cum_s[-1] <= tr.cum_f[-1]).all()
    assert (tr.cum_o[-1] <= tr.cum_f[-1]).all()
    recv = tr.events == Event.RECEIVED
    assert np.array_equal(tr.cum_s[-1], recv.sum(axis=0))
    assert np.array_equal(tr.successes, recv.sum(axis=1))
    # every receive is a successful transmission heard by exactly that node
    for t in range(R):
        senders = tr.peers[t][recv[t]]
        assert tr.tx[t][senders].all()
    assert np.array_equal(tr.transmissions, tr.tx.sum(axis=1))
    assert np.array_equal(tr.jammed, tr.jam.sum(axis=1))
    assert np.isclose(tr.mean_p[0], 1 / 24) and tr.mean_T[0] == 1


def test_receive_implies_nonjammed_and_adjacent():
    tr = run(cfg(kind="bernoulli", rounds=200))
    t_idx, v_idx = np.nonzero(tr.events == Event.RECEIVED)
    assert not tr.jam[t_idx, v_idx].any()
    for t, v in zip(t_idx[:500], v_idx[:500]):
        assert tr.topology.has_edge(v, tr.peers[t, v])


@pytest.mark.slow
def test_two_clique_receive_frequency():
    # with p frozen at p_hat each node receives with probability p(1 - p)
    tr = run(cfg([(0, 0), (0.5, 0)], rounds=200_000, detail="metrics", snapshot_stride=200_000),
             adapt=False)
    freq = tr.cum_s[-1] / tr.rounds
    expected = (1 / 24) * (23 / 24)
    assert expected == pytest.approx(0.0399305, abs=1e-6)
    assert np.all(np.abs(freq - expected) <= 0.002)


def test_initial_k_and_p_hat():
    params = ProtocolParams(p_hat=0.01)
    tr = run(cfg([(0, 0), (0.5, 0)], rounds=3, protocol=params), initial_k=np.array([2, 0]))
    assert tr.snap_k[0].tolist() == [2, 0]
    assert tr.mean_p[0] == pytest.approx((0.01 / 1.21 + 0.01) / 2)
