"""Multi-run experiments: network-size sweeps and attack demonstrations."""
from __future__ import annotations

import time
from dataclasses import replace
from typing import Iterable, Optional

from . import metrics
from .config import AdversarySpec, ExperimentConfig
from .engine import run
from .exceptions import ConfigError
from .presets import ExperimentPreset
from .rng import derive_seed


def timed_run(config: ExperimentConfig):
    t0 = time.perf_counter()
    trace = run(config)
    return trace, time.perf_counter() - t0


def sweep(config: ExperimentConfig, ns: Iterable[int]) -> list[dict]:
    """One run per network size; each size gets its own seed derived from the
    config's master seed, so rows do not depend on which sizes are swept."""
    ns = [int(n) for n in ns]
    if not ns:
        raise ConfigError("ns: at least one network size is required")
    if config.topology.kind == "explicit":
        raise ConfigError("topology.kind: sweeps need a random placement, not explicit coords")
    rows = []
    for n in ns:
        cfg = replace(
            config,
            name=f"{config.name}-n{n}",
            topology=replace(config.topology, n=n),
            seed=derive_seed(config.seed, n),
        )
        trace, elapsed = timed_run(cfg)
        c = metrics.competitiveness(metrics.interval_stats(trace))
        rows.append({
            "n": n,
            "competitiveness": 0.0 if c is None else c,
            "mean_T": metrics.tail_mean(trace.mean_T, 0.1),
            "runtime_ms": int(round(elapsed * 1000)),
        })
    return rows


def _groups(cfg: ExperimentConfig):
    params = cfg.adversary.params
    if "U" not in params or "v" not in params:
        raise ConfigError("adversary.params: attack presets need U and v")
    return [int(u) for u in params["U"]], int(params["v"])


def attack_report(trace, U: list[int], v: int) -> dict:
    stats = metrics.interval_stats(trace)
    T = trace.config.budget.T
    intervals = trace.rounds / T
    everyone = U + [v]
    return {
        "victim": v,
        "group_size": len(U),
        "victim_ratio": stats.ratio([v]),
        "group_ratio": stats.ratio(U),
        "network_ratio": stats.ratio(everyone),
        "victim_receives": int(stats.s[v]),
        "victim_nonjammed": int(stats.f[v]),
        "receives_per_interval": float(stats.s[everyone].sum() / intervals),
        "nonjammed_per_interval": float(stats.f[everyone].sum() / intervals),
        "eps_T": trace.config.budget.epsilon * T,
    }


def run_attack(preset: ExperimentPreset, seed: Optional[int] = None, control: bool = True) -> dict:
    """Run an attack preset and, optionally, the same scenario without jamming."""
    cfg = preset.config if seed is None else replace(preset.config, seed=seed)
    U, v = _groups(cfg)
    report = {"preset": preset.name, "seed": cfg.seed, "rounds": cfg.total_rounds,
              "T": cfg.budget.T, "epsilon": cfg.budget.epsilon,
              "attack": attack_report(run(cfg), U, v)}
    if control:
        ctl = replace(cfg, name=f"{cfg.name}-control",
                      adversary=AdversarySpec("nojam", {}, enforce=cfg.adversary.enforce))
        report["control"] = attack_report(run(ctl), U, v)
    return report
