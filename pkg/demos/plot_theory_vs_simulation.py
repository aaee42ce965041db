"""
Theory against simulation
=========================

A reduced version of the ER validation panel: 1000 nodes, 10
realizations per tolerance, scatter written to ``er10.svg``.
"""

from overload_cascade import SweepConfig, emit_svg_plot, estimate_transition, run_sweep, threshold_command

cfg = SweepConfig(net="er", n=1000, k_avg=10, delta=0.01, alpha_start=0.04, alpha_stop=0.14,
                  alpha_step=0.004, realizations=10, seed_count=5, rng_seed=1)

res = threshold_command(cfg)
records = run_sweep(cfg)
est = estimate_transition(records, g_star=0.1, quantile=0.5)
print(f"analytic alpha_c  = {res.report.alpha_c:.4f}")
print(f"simulated onset   = {est.alpha_sim}")

for a, g in zip(est.alphas, est.g_quantile):
    print(f"  alpha={a:.3f}  median G={g:.3f}")

emit_svg_plot(records, "er10.svg", alpha_c=res.report.alpha_c, title="ER <k>=10, N=1000")
