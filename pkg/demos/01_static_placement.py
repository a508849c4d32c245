"""Place a synthetic 300-vertex graph onto 6 edge servers and look at where the cost goes.

Run:  python demos/01_static_placement.py
"""

import numpy as np

from glad import GladConfig, SynthesisConfig, glad_s, greedy_layout, synthesize_instance, total_cost

inst = synthesize_instance(SynthesisConfig(n_vertices=300, n_servers=6, seed=4))
print(f"{inst.name}: {inst.n_vertices} vertices, {inst.graph.n_links} links, {inst.n_servers} servers")

# Upload-first start: every vertex on the server that is cheapest to reach.
# Traffic is ignored here, so neighbours get scattered.
start = greedy_layout(inst)
print("\nupload-first start")
print(total_cost(start, inst))

# Two-server cuts until three pairs in a row fail to improve.
layout, log = glad_s(inst, GladConfig(r_max=3, seed=4, init="upload_first"))
print(f"\nafter {log.n_iterations} cuts ({sum(r.accepted for r in log.records)} accepted)")
print(total_cost(layout, inst))

# How many vertices ended up on each server, and how many links still cross servers.
counts = np.bincount(layout.assignment, minlength=inst.n_servers)
links = inst.graph.links
crossing = int(np.sum(layout.assignment[links[:, 0]] != layout.assignment[links[:, 1]]))
print("\nvertices per server:", counts.tolist())
print(f"cross-server links: {crossing} of {len(links)}")

# With the default distance factors traffic dominates and the graph piles onto
# one or two servers.  Cheaper backhaul lets upload cost spread it out again.
light = synthesize_instance(SynthesisConfig(n_vertices=300, n_servers=6, seed=4, distance_factor_traffic=0.5))
layout, _ = glad_s(light, GladConfig(r_max=3, seed=4, init="upload_first"))
print("\ncheap backhaul, vertices per server:", np.bincount(layout.assignment, minlength=6).tolist())
