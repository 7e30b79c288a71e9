"""Counter-based random streams keyed by (master seed, purpose, node, round).

Every stream is a Philox generator whose key comes from the master seed and
purpose, and whose starting counter encodes ``(round, node)``. Streams never
overlap as long as fewer than 2**64 blocks are drawn from one of them.

The engine draws all transmit coins of round ``t`` from the node-less stream
``derive_stream(seed, TRANSMIT, round=t)``: node ``v``'s coin is draw number
``v``, so it depends only on ``(seed, v, t)`` and not on the network size or
the order in which nodes are processed.
"""
from __future__ import annotations

from enum import IntEnum
from functools import lru_cache
from typing import Optional

import numpy as np


class Purpose(IntEnum):
    TRANSMIT = 1
    PLACEMENT = 2
    ADVERSARY = 3
    EXPERIMENT = 4  # per-experiment seeds inside sweeps


@lru_cache(maxsize=256)
def _key(master_seed: int, purpose: int) -> tuple[int, int]:
    state = np.random.SeedSequence([int(master_seed), int(purpose)]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def _philox(master_seed: int, purpose: Purpose, node: Optional[int], round: Optional[int]):
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    key = np.array(_key(master_seed, int(purpose)), dtype=np.uint64)
    counter = np.array(
        [0, 0 if round is None else int(round) + 1, 0 if node is None else int(node) + 1, 0],
        dtype=np.uint64,
    )
    return np.random.Philox(key=key, counter=counter)


def derive_stream(
    master_seed: int,
    purpose: Purpose,
    node: Optional[int] = None,
    round: Optional[int] = None,
) -> np.random.Generator:
    """Independent, reproducible generator for one (purpose, node, round) cell."""
    return np.random.Generator(_philox(master_seed, Purpose(purpose), node, round))


def transmit_coins(master_seed: int, round: int, n: int) -> np.ndarray:
    """Uniform [0, 1) transmit coins for nodes ``0..n-1`` at ``round``."""
    return derive_stream(master_seed, Purpose.TRANSMIT, round=round).random(n)


class RoundStreams:
    """Fast equivalent of ``derive_stream(seed, purpose, round=t)`` for a loop.

    Re-seats one Philox generator at each round's counter instead of
    building a new generator, which halves the per-round cost.
    """

    def __init__(self, master_seed: int, purpose: Purpose):
        self._key = np.array(_key(master_seed, int(purpose)), dtype=np.uint64)
        self._bitgen = np.random.Philox(key=self._key)
        self._gen = np.random.Generator(self._bitgen)

    def at(self, round: int) -> np.random.Generator:
        self._bitgen.state = {
            "bit_generator": "Philox",
            "state": {"counter": np.array([0, round + 1, 0, 0], dtype=np.uint64), "key": self._key},
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen


def transmit_coin(master_seed: int, node: int, round: int) -> float:
    """Node ``node``'s coin at ``round``; equals ``transmit_coins(...)[node]``."""
    return float(transmit_coins(master_seed, round, node + 1)[node])


def derive_seed(master_seed: int, *labels: int) -> int:
    """A fresh 63-bit master seed for a sub-experiment."""
    ss = np.random.SeedSequence([int(master_seed), int(Purpose.EXPERIMENT), *map(int, labels)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))
