"""
A single cascade
================

Three nodes, one seed failure, and the round-by-round bookkeeping; then
the same rules on a 5000-node ER graph at two tolerances.
"""

import numpy as np

from overload_cascade import (
    CascadeConfig, LoadProfile, Network, assign_loads, gen_er, run_cascade,
)

# triangle: node 1 is nearly empty, so its capacity is tiny
tri = Network.from_edges(3, [(0, 1), (1, 2), (0, 2)])
loads = LoadProfile(np.array([0.9, 0.005, 0.5]), alpha=0.05)
out = run_cascade(tri, loads, CascadeConfig(delta=0.01, seed_nodes=[0]))
print("failure round per node:", out.failure_round)      # [0 1 -1]
print("rounds:", out.rounds, " G:", out.giant_fraction)   # 2, 1/3
print("load on node 2 after the cascade:", out.final_load[2], "capacity", loads.capacity[2])

# %%
# Paper-scale ER graph: below the threshold almost nothing survives,
# well above it the seeds barely dent the network.
net = gen_er(5000, 10, rng_seed=1)
L = assign_loads(net.node_count, 0.0, 1.0, rng_seed=2)
for alpha in (0.05, 0.15):
    res = run_cascade(net, LoadProfile(L, alpha), CascadeConfig(0.01, seed_count=10, rng_seed=3))
    print(f"alpha={alpha}: failed {res.failed_fraction:.3f}, G {res.giant_fraction:.3f}, {res.rounds} rounds")
