"""Two budget-respecting jamming patterns that starve chosen nodes.

Split attack: a clique U of 24 nodes plus a victim v that hears all of U.
Each T-interval, U is clear only at its start and v only at its end. U's
senders go quiet during their long jammed stretch, so when v is finally
clear nobody is talking to it. U as a group still communicates.

Low-density attack: v is never jammed but has only two neighbors, which
are clear for a short stretch per interval. v receives only a handful of
messages per interval although it is clear all the time.
"""
from jadelab.experiments import run_attack
from jadelab.presets import get_preset

for name in ("attack-split2u", "attack-lowdensity"):
    rep = run_attack(get_preset(name))
    a, c = rep["attack"], rep["control"]
    print(f"{name}  (T={rep['T']}, eps={rep['epsilon']}, {rep['rounds']} rounds)")
    print("                     attack   no jamming")
    print(f"  victim s/f         {a['victim_ratio']:.4f}   {c['victim_ratio']:.4f}")
    print(f"  group s/f          {a['group_ratio']:.4f}   {c['group_ratio']:.4f}")
    print(f"  receives/interval  {a['receives_per_interval']:.1f}     {c['receives_per_interval']:.1f}"
          f"   (eps*T = {a['eps_T']:.0f})")
    print()
