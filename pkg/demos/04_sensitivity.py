"""How the stopping rule R and the adaptive threshold theta trade cost for work.

Run:  python demos/04_sensitivity.py
"""

import math
import time

from glad import ChurnConfig, GladConfig, SynthesisConfig, generate_trace, glad_s, synthesize_instance, total_cost
from glad.dynamic import run_timeline

inst = synthesize_instance(SynthesisConfig(n_vertices=800, n_servers=12, seed=8))

print("R sweep (12 servers, 66 pairs)")
for r in (1, 3, 10, 30, "exhaustive"):
    t0 = time.perf_counter()
    lay, log = glad_s(inst, GladConfig(r_max=r, seed=8))
    dt = time.perf_counter() - t0
    print(f"  R={r!s:>10}: cost {total_cost(lay, inst).total:10.1f}, {log.n_iterations:4d} cuts, {dt:.2f}s")

trace = generate_trace(inst.graph, ChurnConfig(0.02, 0.0, 40, seed=8), inst.network.coords)
config = GladConfig(seed=8)
start, _ = glad_s(inst, config)
c0 = total_cost(start, inst).total

print("\ntheta sweep (adaptive policy, 40 slots)")
for frac in (0.0, 1e-4, 1e-3, 1e-2, math.inf):
    rep = run_timeline(inst, trace, "adaptive", config, theta=frac * c0, initial_layout=start)
    print(f"  theta={frac:>6} x C0: {rep.glad_s_invocations:3d} full passes, mean cost {rep.mean_cost():.1f}")
