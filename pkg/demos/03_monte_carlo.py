"""
Checking against simulated paths
================================

Simulate ``A_t`` on exact Brownian paths and compare the empirical law with
the analytic CDF.  The settings here are small enough to run in seconds; the
acceptance suite uses 10^5 paths and 4096 steps.
"""

from asiadens.density import ModelParams
from asiadens.mc import MCConfig, cdf_for, ks_compare, richardson_bias_check, simulate

cfg = MCConfig(paths=20_000, steps=512, nu=1.0, t=0.25, seed=7)
a = simulate(cfg)

# %%
# One CDF per exponent; the same samples serve both.
for eps in (1.0, -1.0):
    p = ModelParams(cfg.nu, eps, cfg.t)
    rep = ks_compare(a, p, cdf_for(p, a))
    print(f"eps={eps:+.0f}  KS {rep.ks_stat:.4f}  (sampling scale {1 / cfg.paths ** 0.5:.4f})")

print(f"sample mean {rep.mean:.5f} +- {rep.mean_ci_halfwidth:.5f}, exact {rep.mean_exact:.5f}")

# %%
# With very few steps the discretisation bias is visible and shrinks as the
# step count doubles.
r = richardson_bias_check(MCConfig(paths=20_000, steps=8, nu=1.0, t=0.25, seed=7))
for lv in r["levels"]:
    print(f"steps {lv['steps']:3d}  KS {lv['ks_stat']:.4f}  mean error {lv['mean_error']:+.5f}")
