"""Start-up phase on a dense network.

Every node starts at the maximum send probability, so at first the channel
is crowded. Busy rounds push the probabilities down and the timeout counters
up until idle and received rounds become common again.
"""
import numpy as np

from jadelab import metrics
from jadelab.engine import run
from jadelab.presets import get_preset

cfg = get_preset("fig-convergence").config.replace(rounds=400)
tr = run(cfg)
p_hat = cfg.protocol.p_hat

print("round  mean p / p_hat  mean T  receptions")
for r in (0, 5, 10, 20, 30, 50, 100, 200, 399):
    print(f"{r:5d}  {tr.mean_p[r] / p_hat:14.3f}  {tr.mean_T[r]:6.2f}  {tr.successes[r]:10d}")

print(f"\nmean p first below half of p_hat at round {metrics.startup_rounds(tr, 0.5)}")

# Contention seen by a single node, split into its six 60-degree sectors.
u = cfg.sector_centers[0]
for s in range(6):
    rounds, p_s = metrics.sector_series(tr, u, s)
    print(f"sector {s}: {len(tr.topology.sector_members(u, s)):3d} nodes, "
          f"p_S {p_s[0]:.3f} at round 0, {np.mean(p_s[-50:]):.3f} over the last 50 rounds")
