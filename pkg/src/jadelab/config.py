"""Experiment configuration and its JSON form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional


from .adversary import STRATEGY_KINDS, AdversaryBudget, make_strategy
from .exceptions import ConfigError
from .protocol import ProtocolParams
from .rng import Purpose, derive_stream
from .topology import Positions, place_explicit, place_gaussian, place_uniform

DETAIL_LEVELS = ("full", "metrics")
TOPOLOGY_KINDS = ("uniform", "gaussian", "explicit")


@dataclass(frozen=True)
class TopologySpec:
    kind: str = "uniform"
    n: Optional[int] = None
    side: float = 4.0
    sigma: float = 1.0
    center: Optional[tuple[float, float]] = None  # gaussian; defaults to the plane midpoint
    coords: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.kind not in TOPOLOGY_KINDS:
            raise ConfigError(f"topology.kind: expected one of {TOPOLOGY_KINDS}, got {self.kind!r}")
        if self.kind == "explicit":
            if not self.coords:
                raise ConfigError("topology.coords: explicit placement needs a nonempty list")
            object.__setattr__(self, "coords", tuple(tuple(map(float, c)) for c in self.coords))
            object.__setattr__(self, "n", len(self.coords))
        else:
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise ConfigError(f"topology.n: must be an integer >= 1, got {self.n}")
            if not self.side > 0:
                raise ConfigError(f"topology.side: must be > 0, got {self.side}")
            if self.kind == "gaussian" and not self.sigma > 0:
                raise ConfigError(f"topology.sigma: must be > 0, got {self.sigma}")
        if self.center is not None:
            object.__setattr__(self, "center", tuple(map(float, self.center)))

    def place(self, seed: int) -> Positions:
        rng = derive_stream(seed, Purpose.PLACEMENT)
        if self.kind == "uniform":
            return place_uniform(self.n, self.side, rng)
        if self.kind == "gaussian":
            center = self.center or (self.side / 2.0, self.side / 2.0)
            return place_gaussian(self.n, self.sigma, center, rng)
        return place_explicit(self.coords)

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "coords": [list(c) for c in self.coords]}
        d = {"kind": self.kind, "n": self.n, "side": self.side}
        if self.kind == "gaussian":
            d["sigma"] = self.sigma
            if self.center is not None:
                d["center"] = list(self.center)
        return d


@dataclass(frozen=True)
class AdversarySpec:
    kind: str = "bernoulli"
    params: dict = field(default_factory=dict)
    enforce: bool = True

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"adversary.kind: expected one of {STRATEGY_KINDS}, got {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "enforce": self.enforce}


def reference_round_count(n: int, T: int, gamma: float, epsilon: float) -> int:
    """``(T + log^3 n / (gamma^2 eps)) * log n / eps`` with base-2 logs.

    Never less than ``T`` (the formula collapses to 0 for a single node).
    """
    lg = math.log2(n) if n > 1 else 0.0
    r = (T + lg**3 / (gamma**2 * epsilon)) * lg / epsilon
    return max(int(T), int(math.ceil(r)))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    topology: TopologySpec = field(default_factory=lambda: TopologySpec(n=60))
    protocol: ProtocolParams = field(default_factory=ProtocolParams)
    adversary: AdversarySpec = field(default_factory=AdversarySpec)
    budget: AdversaryBudget = field(default_factory=lambda: AdversaryBudget(200, 0.3))
    rounds: Optional[int] = None  # None: use reference_round_count
    seed: int = 0
    snapshot_stride: int = 1
    detail: str = "full"
    sector_centers: tuple[int, ...] = ()
    alpha: float = 1.0  # subframe scaling constant for diagnostics

    def __post_init__(self):
        if self.rounds is not None and (int(self.rounds) != self.rounds or self.rounds < 1):
            raise ConfigError(f"rounds: must be an integer >= 1, got {self.rounds}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed: must be a non-negative integer, got {self.seed}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ConfigError(f"snapshot_stride: must be an integer >= 1, got {self.snapshot_stride}")
        if self.detail not in DETAIL_LEVELS:
            raise ConfigError(f"detail: expected one of {DETAIL_LEVELS}, got {self.detail!r}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha: must be > 0, got {self.alpha}")
        object.__setattr__(self, "sector_centers", tuple(int(u) for u in self.sector_centers))
        n = self.n
        if any(not 0 <= u < n for u in self.sector_centers):
            raise ConfigError("sector_centers: node id out of range")
        # surface bad strategy params at load time
        make_strategy(self.adversary.kind, self.adversary.params, self.budget, n)

    @property
    def n(self) -> int:
        return int(self.topology.n)

    @property
    def total_rounds(self) -> int:
        if self.rounds is not None:
            return int(self.rounds)
        return reference_round_count(self.n, self.budget.T, self.protocol.gamma, self.budget.epsilon)

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return ExperimentConfig.from_dict(d)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "topology": self.topology.to_dict(),
            "protocol": {"p_hat": self.protocol.p_hat, "gamma": self.protocol.gamma},
            "adversary": self.adversary.to_dict(),
            "budget": {"T": self.budget.T, "epsilon": self.budget.epsilon},
            "rounds": self.rounds,
            "seed": self.seed,
            "snapshot_stride": self.snapshot_stride,
            "detail": self.detail,
            "sector_centers": list(self.sector_centers),
            "alpha": self.alpha,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: expected a JSON object")
        known = {"name", "topology", "protocol", "adversary", "budget", "rounds", "seed",
                 "snapshot_stride", "detail", "sector_centers", "alpha"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
        kw: dict[str, Any] = {k: d[k] for k in ("name", "rounds", "seed", "snapshot_stride",
                                                  "detail", "sector_centers", "alpha") if k in d}
        try:
            if "topology" in d:
                kw["topology"] = TopologySpec(**d["topology"])
            if "protocol" in d:
                kw["protocol"] = ProtocolParams(**d["protocol"])
            if "adversary" in d:
                kw["adversary"] = AdversarySpec(**d["adversary"])
            if "budget" in d:
                kw["budget"] = AdversaryBudget(**d["budget"])
        except TypeError as e:
            raise ConfigError(f"config: {e}") from None
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config: malformed JSON ({e})") from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())
