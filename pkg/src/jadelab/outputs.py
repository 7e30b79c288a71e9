"""CSV/JSON emission and loading of run directories.

Layout of a run directory::

    config.json    the ExperimentConfig that produced the run
    summary.json   headline numbers (deterministic given the config)
    timing.json    wall-clock runtime (kept apart so summary.json is reproducible)
    stats.json     whole-run interval stats and competitiveness
    metrics.csv    round,mean_p,mean_T,successes   (one row per snapshot round)
    positions.csv  node_id,x,y
    sectors.csv    round,center_node,sector,p_S     (if sector_centers is set)
    outcomes.csv   round,node_id,event,peer         (detail = full)
    snapshots.csv  round,node_id,k,p_v,T_v,c_v      (detail = full)
    jam.csv        round,node_id,jammed             (detail = full)
"""
from __future__ import annotations

import csv
import json
import shutil
from pathlib import Path
from typing import Optional

import numpy as np

from . import metrics
from .adversary import audit
from .config import ExperimentConfig
from .exceptions import TraceError
from .protocol import Event, p_from_exponent
from .topology import NUM_SECTORS, Positions, build_udg, validate_regime
from .trace import Trace

_EVENT_LABELS = [Event(i).label for i in range(4)]


def _f(x) -> str:
    return repr(float(x))


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def summarize(trace: Trace) -> dict:
    """Headline numbers for ``summary.json``; a pure function of the trace."""
    cfg = trace.config
    stats = _whole_run_stats(trace)
    tail = max(1, int(round(trace.rounds * 0.1)))
    last_T = trace.mean_T[-tail:]
    regime = validate_regime(trace.topology, cfg.budget.epsilon)
    return {
        "name": cfg.name,
        "seed": cfg.seed,
        "n": trace.n,
        "rounds": trace.rounds,
        "adversary": cfg.adversary.kind,
        "enforced": cfg.adversary.enforce,
        "competitiveness": metrics.competitiveness(stats),
        "sum_s": int(stats.s.sum()),
        "sum_f": int(stats.f.sum()),
        "sum_o": int(stats.o.sum()),
        "mean_T_last10pct": float(last_T.mean()),
        "mean_T_band_last10pct": [float(last_T.min()), float(last_T.max())],
        "mean_p_last10pct": float(trace.mean_p[-tail:].mean()),
        "startup_round_half_p_hat": metrics.startup_rounds(trace, 0.5),
        "regime": regime.as_dict(),
        "audit": audit(trace).as_dict(),
    }


def _whole_run_stats(trace: Trace) -> metrics.IntervalStats:
    # use the recorded counters so full and metrics traces agree exactly
    return metrics.IntervalStats(
        0, trace.rounds, f=trace.cum_f[-1], s=trace.cum_s[-1],
        o=trace.cum_o[-1], jam=trace.cum_jam[-1],
    )


def write_metrics_csv(trace: Trace, path: Path) -> None:
    cols = metrics.convergence_summary(trace)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "mean_p", "mean_T", "successes"])
        for r, mp, mt, s in zip(cols["round"], cols["mean_p"], cols["mean_T"], cols["successes"]):
            w.writerow([int(r), _f(mp), _f(mt), int(s)])


def write_snapshots_csv(trace: Trace, path: Path) -> None:
    params = trace.config.protocol
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "node_id", "k", "p_v", "T_v", "c_v"])
        for i, r in enumerate(trace.snap_rounds):
            p = p_from_exponent(trace.snap_k[i], params)
            for v in range(trace.n):
                w.writerow([int(r), v, int(trace.snap_k[i, v]), _f(p[v]),
                            int(trace.snap_T[i, v]), int(trace.snap_c[i, v])])


def write_outcomes_csv(trace: Trace, path: Path) -> None:
    if not trace.is_full:
        raise TraceError("outcomes.csv needs a full-detail trace")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "node_id", "event", "peer"])
        for t in range(trace.rounds):
            ev, pe = trace.events[t], trace.peers[t]
            for v in range(trace.n):
                w.writerow([t, v, _EVENT_LABELS[ev[v]], int(pe[v]) if pe[v] >= 0 else ""])


def write_jam_csv(masks: np.ndarray, path: Path) -> None:
    masks = np.asarray(masks, dtype=bool)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "node_id", "jammed"])
        R, n = masks.shape
        for t in range(R):
            row = masks[t]
            for v in range(n):
                w.writerow([t, v, int(row[v])])


def read_jam_csv(path: Path, n: Optional[int] = None) -> np.ndarray:
    """Inverse of :func:`write_jam_csv`; returns a ``(rounds, n)`` bool array."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    except ValueError as e:
        raise TraceError(f"{path}: corrupt jam file ({e})") from None
    if data.size == 0:
        raise TraceError(f"{path}: no rows")
    if data.shape[1] != 3:
        raise TraceError(f"{path}: expected columns round,node_id,jammed")
    R = int(data[:, 0].max()) + 1
    n = int(data[:, 1].max()) + 1 if n is None else n
    if data[:, 0].min() < 0 or data[:, 1].min() < 0 or data[:, 1].max() >= n:
        raise TraceError(f"{path}: ids out of range")
    masks = np.zeros((R, n), dtype=bool)
    masks[data[:, 0], data[:, 1]] = data[:, 2] != 0
    return masks


def write_sectors_csv(trace: Trace, centers, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "center_node", "sector", "p_S"])
        series = {(u, s): metrics.sector_series(trace, u, s) for u in centers for s in range(NUM_SECTORS)}
        for i, r in enumerate(trace.snap_rounds):
            for u in centers:
                for s in range(NUM_SECTORS):
                    w.writerow([int(r), u, s, _f(series[(u, s)][1][i])])


def prepare_dir(out: Path, force: bool) -> Path:
    out = Path(out)
    if out.exists():
        if not force:
            raise FileExistsError(f"{out} exists (use --force to overwrite)")
        shutil.rmtree(out)
    out.mkdir(parents=True)
    return out


def write_run(trace: Trace, out: Path, runtime_s: Optional[float] = None) -> dict:
    """Write every output file for ``trace`` into the existing directory ``out``."""
    out = Path(out)
    cfg = trace.config
    (out / "config.json").write_text(cfg.to_json() + "\n")
    summary = summarize(trace)
    _dump(summary, out / "summary.json")
    stats = _whole_run_stats(trace)
    _dump({"whole_run": stats.as_dict(),
           "per_node": {"f": stats.f.tolist(), "s": stats.s.tolist(), "o": stats.o.tolist()}},
          out / "stats.json")
    write_metrics_csv(trace, out / "metrics.csv")
    trace.topology.positions.to_csv(out / "positions.csv")
    if cfg.sector_centers:
        write_sectors_csv(trace, cfg.sector_centers, out / "sectors.csv")
    if trace.is_full:
        write_outcomes_csv(trace, out / "outcomes.csv")
        write_snapshots_csv(trace, out / "snapshots.csv")
        write_jam_csv(trace.jam, out / "jam.csv")
    if runtime_s is not None:
        _dump({"runtime_s": runtime_s}, out / "timing.json")
    return summary


def load_run_dir(path: Path):
    """Config, topology, and jam masks of a run directory (for audits)."""
    path = Path(path)
    for name in ("config.json", "jam.csv"):
        if not (path / name).is_file():
            raise FileNotFoundError(f"{path / name} is missing")
    try:
        cfg = ExperimentConfig.load(path / "config.json")
    except json.JSONDecodeError as e:
        raise TraceError(f"corrupt config.json ({e})") from None
    topo = None
    if (path / "positions.csv").is_file():
        try:
            topo = build_udg(Positions.from_csv(path / "positions.csv"))
        except (ValueError, KeyError) as e:
            raise TraceError(f"corrupt positions.csv ({e})") from None
    n = topo.n if topo is not None else cfg.n
    return cfg, topo, read_jam_csv(path / "jam.csv", n)
