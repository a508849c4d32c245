"""Let a 1000-vertex graph churn for 60 slots and compare the re-optimisation policies.

Run:  python demos/03_dynamic_timeline.py
"""

import numpy as np

from glad import ChurnConfig, GladConfig, SynthesisConfig, generate_trace, glad_s, synthesize_instance, total_cost
from glad.dynamic import run_timeline

inst = synthesize_instance(SynthesisConfig(n_vertices=1000, n_servers=8, seed=21))
# 1% of links and 0.5% of vertices change per slot on average
trace = generate_trace(inst.graph, ChurnConfig(0.01, 0.005, 60, seed=21), inst.network.coords)
print(f"{len(trace)} slots, {sum(len(s.events) for s in trace)} events")

config = GladConfig(seed=21, r_max=10)
start, _ = glad_s(inst, config)
c0 = total_cost(start, inst).total
theta = 0.01 * c0

print(f"\n{'policy':>14} {'mean cost':>10} {'final':>10} {'ms/slot':>8} {'full runs':>9}")
for policy in ("no_adjustment", "greedy", "glad_e", "adaptive", "glad_s"):
    rep = run_timeline(inst, trace, policy, config, theta=theta, initial_layout=start)
    ms = np.mean([r.wall_ms for r in rep.records[1:]])
    print(f"{policy:>14} {rep.mean_cost():10.1f} {rep.totals()[-1]:10.1f} {ms:8.1f} {rep.glad_s_invocations:9d}")

# The adaptive policy adds up per-slot drift estimates and runs a full pass once they pass theta.
rep = run_timeline(inst, trace, "adaptive", config, theta=theta, initial_layout=start)
full = [r.slot for r in rep.records if r.decision == "glad_s"]
print(f"\nadaptive ran the full pass at slots {full}")
