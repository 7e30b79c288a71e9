"""Idle and single-sender probabilities around one listener.

A listener surrounded by senders hears silence with probability q0 and a
clean message with probability q1. While every send probability stays at or
below p_hat, q1 sits between q0 * p and q0 * p / (1 - p_hat), where p is the
sum of the send probabilities. This script checks that sandwich on a few
neighborhoods and then compares the closed forms with simulated rounds.
"""
import numpy as np

from jadelab.oracle import check_lemma1, empirical_vs_exact, exact_q0_q1

P_HAT = 1 / 24
rng = np.random.default_rng(0)

print("m   sum p     q0        q0*p      q1        q0*p/(1-p_hat)")
for m in (1, 2, 5, 12, 20):
    pv = rng.uniform(0.2 * P_HAT, P_HAT, m)
    q0, q1 = exact_q0_q1(pv)
    p = pv.sum()
    assert check_lemma1(pv, P_HAT)
    print(f"{m:<3d} {p:.5f}  {q0:.6f}  {q0 * p:.6f}  {q1:.6f}  {q0 * p / (1 - P_HAT):.6f}")

# The same numbers from the simulator: many disjoint stars per round, each
# resolved by the engine's own coin streams and channel rules.
rep = empirical_vs_exact([P_HAT, P_HAT], trials=200_000, seed=1)
print()
for key in ("q0", "q1"):
    dev = abs(rep[f"{key}_sim"] - rep[f"{key}_exact"]) / rep[f"{key}_se"]
    print(f"{key}: exact {rep[f'{key}_exact']:.6f}  simulated {rep[f'{key}_sim']:.6f}  ({dev:.2f} standard errors)")
