"""
Analytic threshold
==================

The scan starts at the condition-I bound ``(<k> - 1) delta`` and steps
down until the branching factor of the absorbing nodes drops below one.
"""

import numpy as np

from overload_cascade import (
    absorbing_probabilities, degree_stats, find_alpha_c, gen_ba, poisson_degree_stats, solve_sigma,
)

delta = 0.01
for k in (8, 10, 12):
    er = find_alpha_c(poisson_degree_stats(k), delta)
    ba = find_alpha_c(degree_stats(gen_ba(5000, k // 2, rng_seed=k)), delta)
    print(f"<k>={k:2d}  bound={er.cond1_bound:.3f}  alpha_c ER={er.alpha_c:.4f}  BA={ba.alpha_c:.4f}")

# %%
# Branching factor along the scan for ER <k> = 10
rep = find_alpha_c(poisson_degree_stats(10), delta)
for alpha, bf in rep.branching_trace:
    print(f"  alpha={alpha:.4f}  branching={bf:.3f}")

# %%
# sigma = 1 makes every node absorbing and always solves the
# self-consistency equation; iterating up from 0 finds the relevant root.
stats = poisson_degree_stats(10)
print("a_k at sigma=1:", np.unique(np.round(absorbing_probabilities(stats.k_max, 1.0, 0.08, delta), 12)))
sol = solve_sigma(stats, 0.08, delta)
print(f"least root sigma_a={sol.sigma_a:.6f} after {sol.iterations} iterations, residual {sol.residual:.1e}")
