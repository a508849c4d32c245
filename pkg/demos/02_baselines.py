"""Compare GLAD-S with the exact optimum on tiny instances, then with random/greedy on larger ones.

Run:  python demos/02_baselines.py
"""

import numpy as np

from glad import (GladConfig, SynthesisConfig, brute_force_optimal, glad_s, greedy_layout, random_layout,
                  synthesize_instance, total_cost)

# Tiny instances: 8 vertices on 3 servers is 6561 layouts, cheap to enumerate.
print("tiny instances, GLAD-S (exhaustive R) vs brute force")
gaps = []
for seed in range(10):
    inst = synthesize_instance(SynthesisConfig(n_vertices=8, n_servers=3, seed=seed))
    lay, _ = glad_s(inst, GladConfig(r_max="exhaustive", seed=seed))
    got, best = total_cost(lay, inst).total, brute_force_optimal(inst).optimal_cost.total
    gaps.append(got / best - 1)
    print(f"  seed {seed}: glad {got:9.3f}  optimum {best:9.3f}")
print(f"mean gap {100 * np.mean(gaps):.2f}%, worst {100 * np.max(gaps):.2f}%")

print("\n500 vertices, 10 servers")
print(f"{'seed':>4} {'random':>10} {'greedy':>10} {'glad-s':>10}")
for seed in range(5):
    inst = synthesize_instance(SynthesisConfig(n_vertices=500, n_servers=10, seed=100 + seed))
    r = total_cost(random_layout(inst, seed), inst).total
    g = total_cost(greedy_layout(inst), inst).total
    s = total_cost(glad_s(inst, GladConfig(seed=seed))[0], inst).total
    print(f"{seed:>4} {r:10.1f} {g:10.1f} {s:10.1f}")
