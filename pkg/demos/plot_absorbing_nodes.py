"""
Absorbing nodes
===============

Per-degree fraction of nodes that cannot pass a failure on, measured on
simulated cascades, next to the self-consistent analytic ``a_k``. The
empirical rule is a loose proxy, so only the trend with degree is
expected to match.
"""

import numpy as np

from overload_cascade import degree_stats, empirical_absorbing_fraction, gen_er, solve_sigma

net = gen_er(3000, 8, rng_seed=4)
stats = degree_stats(net)
alpha, delta = 0.06, 0.01

emp = empirical_absorbing_fraction(net, alpha, delta, trials=5, rng_seed=5, seed_count=10)
sol = solve_sigma(stats, alpha, delta)
print(f"sigma_a = {sol.sigma_a:.4f}")
print(" k   empirical  analytic")
for k in np.flatnonzero(stats.p_k * net.node_count >= 20):
    print(f"{k:2d}   {emp[k]:9.3f}  {sol.a_k[k]:8.3f}")
