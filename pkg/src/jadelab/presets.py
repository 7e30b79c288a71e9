"""Named experiment presets for the simulated figures and the attack scenarios."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .adversary import AdversaryBudget
from .config import AdversarySpec, ExperimentConfig, TopologySpec
from .exceptions import ConfigError
from .protocol import ProtocolParams

# Desk-scale horizon; the full round-count formula gives ~7e6 rounds at n = 500.
DESK_ROUNDS = 200_000
ATTACK_GROUP = 24  # >= 1 / p_hat for the default p_hat


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    config: ExperimentConfig
    expected: dict = field(default_factory=dict)
    description: str = ""


def _throughput_regime(name: str, topology: TopologySpec, **kw) -> ExperimentConfig:
    base = dict(
        name=name,
        topology=topology,
        protocol=ProtocolParams(p_hat=1 / 24, gamma=0.1),
        adversary=AdversarySpec("bernoulli", {}, enforce=True),
        budget=AdversaryBudget(T=200, epsilon=0.3),
        rounds=DESK_ROUNDS,
        seed=1,
        snapshot_stride=100,
        detail="metrics",
    )
    base.update(kw)
    return ExperimentConfig(**base)


def clique_with_victim(size: int = ATTACK_GROUP, radius: float = 0.1, victim_at: float = 0.5):
    """``size`` nodes on a small circle around the origin plus one victim node.

    Every pair is within range, so U is a clique and the victim hears all of U.
    Node ids: U = 0..size-1, victim = size.
    """
    pts = [(radius * math.cos(2 * math.pi * i / size), radius * math.sin(2 * math.pi * i / size))
           for i in range(size)]
    pts.append((victim_at, 0.0))
    return pts


def _attack(name: str, kind: str, size: int, T: int, epsilon: float, rounds: int) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        topology=TopologySpec(kind="explicit", coords=clique_with_victim(size)),
        adversary=AdversarySpec(kind, {"U": list(range(size)), "v": size}, enforce=True),
        budget=AdversaryBudget(T=T, epsilon=epsilon),
        rounds=rounds,
        seed=1,
        snapshot_stride=T,
        detail="metrics",
    )


def _build() -> dict[str, ExperimentPreset]:
    uniform = TopologySpec(kind="uniform", n=500, side=4.0)
    gaussian = TopologySpec(kind="gaussian", n=500, side=4.0, sigma=1.0, center=(2.0, 2.0))
    presets = [
        ExperimentPreset(
            "fig-throughput-uniform",
            _throughput_regime("fig-throughput-uniform", uniform),
            {"competitiveness": [0.20, 0.35], "mean_T_last10pct": [2.0, 4.0]},
            "500 nodes uniform on a 4x4 plane under Bernoulli jamming (eps=0.3, T=200).",
        ),
        ExperimentPreset(
            "fig-throughput-gaussian",
            _throughput_regime("fig-throughput-gaussian", gaussian),
            {"competitiveness": [0.20, 0.35]},
            "500 nodes with N((2,2), 1) coordinates under Bernoulli jamming.",
        ),
        ExperimentPreset(
            "fig-convergence",
            _throughput_regime("fig-convergence", uniform, rounds=2000, snapshot_stride=1,
                          sector_centers=(0,)),
            {"startup_round_half_p_hat": [0, 50]},
            "Start-up phase of the uniform scenario, snapshots every round.",
        ),
        ExperimentPreset(
            "attack-split2u",
            _attack("attack-split2u", "split2u", ATTACK_GROUP, T=1000, epsilon=0.3, rounds=20_000),
            {"victim_ratio_below": 0.01, "group_ratio_above": 0.1},
            "2-uniform split attack: U clear at the start of each T-interval, victim at the end.",
        ),
        ExperimentPreset(
            "attack-lowdensity",
            _attack("attack-lowdensity", "lowdensity", 2, T=2000, epsilon=0.05, rounds=40_000),
            {"receives_per_interval_below_eps_T_times": 2.0},
            "Sparse neighborhood: victim never jammed, its two neighbors clear only briefly.",
        ),
    ]
    return {p.name: p for p in presets}


PRESETS = _build()


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"preset: unknown preset {name!r} (known: {sorted(PRESETS)})") from None
