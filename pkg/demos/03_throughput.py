"""Throughput under random jamming, and how it depends on density.

500 nodes on a 4x4 plane, each jammed independently with probability 0.7 per
round, subject to a (T=200, 1-eps) budget. Competitiveness is the fraction
of non-jammed node-rounds in which the node received a message.

Pass a round count to run longer, e.g. ``python 03_throughput.py 200000``.
"""
import sys

from jadelab import metrics
from jadelab.adversary import audit
from jadelab.engine import run
from jadelab.experiments import sweep
from jadelab.presets import get_preset

rounds = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
cfg = get_preset("fig-throughput-uniform").config.replace(rounds=rounds)

tr = run(cfg)
stats = metrics.interval_stats(tr)
print(f"uniform, n=500, {rounds} rounds")
print(f"  competitiveness          {metrics.competitiveness(stats):.3f}")
print(f"  mean T over last 10%     {metrics.tail_mean(tr.mean_T, 0.1):.2f}")
print(f"  open / non-jammed rounds {stats.o.sum() / stats.f.sum():.3f}")
rep = audit(tr)
print(f"  worst jammed window      {int(rep.worst_window.max())} of {rep.T} (allowed {rep.allowed})")

gauss = get_preset("fig-throughput-gaussian").config.replace(rounds=rounds)
print(f"gaussian, n=500: competitiveness {metrics.competitiveness(metrics.interval_stats(run(gauss))):.3f}")

# Sparse networks waste most non-jammed rounds because nobody nearby sends.
print("\n   n  competitiveness  mean T")
for row in sweep(cfg.replace(rounds=min(rounds, 10_000)), [20, 60, 100, 200]):
    print(f"{row['n']:4d}  {row['competitiveness']:15.3f}  {row['mean_T']:6.2f}")
