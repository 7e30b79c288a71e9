import numpy as np
import pytest

from jadelab.rng import Purpose, RoundStreams, derive_seed, derive_stream, transmit_coin, transmit_coins


def test_same_inputs_same_stream():
    a = derive_stream(3, Purpose.TRANSMIT, node=4, round=9).random(16)
    b = derive_stream(3, Purpose.TRANSMIT, node=4, round=9).random(16)
    assert np.array_equal(a, b)


@pytest.mark.parametrize(
    "other",
    [dict(node=5, round=9), dict(node=4, round=10), dict(node=None, round=9), dict(node=4, round=None)],
)
def test_different_cells_differ(other):
    a = derive_stream(3, Purpose.TRANSMIT, node=4, round=9).random(16)
    b = derive_stream(3, Purpose.TRANSMIT, **other).random(16)
    assert not np.array_equal(a, b)


def test_purposes_and_seeds_differ():
    a = derive_stream(3, Purpose.TRANSMIT, round=0).random(8)
    assert not np.array_equal(a, derive_stream(3, Purpose.ADVERSARY, round=0).random(8))
    assert not np.array_equal(a, derive_stream(4, Purpose.TRANSMIT, round=0).random(8))


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        derive_stream(-1, Purpose.TRANSMIT)


def test_uniformity_over_cells():
    draws = np.array([derive_stream(11, Purpose.TRANSMIT, node=v, round=r).random()
                      for v in range(100) for r in range(100)])
    assert abs(draws.mean() - 0.5) <= 0.02
    assert abs(draws.var() - 1 / 12) <= 0.01


def test_round_streams_equal_fresh_streams():
    rs = RoundStreams(5, Purpose.TRANSMIT)
    for r in [0, 1, 2, 1000, 7]:
        assert np.array_equal(rs.at(r).random(50), transmit_coins(5, r, 50))


def test_coin_independent_of_network_size():
    assert transmit_coin(5, 3, 12) == transmit_coins(5, 12, 4)[3] == transmit_coins(5, 12, 500)[3]


def test_derive_seed():
    assert derive_seed(1, 20) == derive_seed(1, 20)
    assert derive_seed(1, 20) != derive_seed(1, 40)
    assert 0 <= derive_seed(1, 20) < 2**63
