"""
Density of the integrated exponential
=====================================

Evaluate the law of ``A_t = int_0^t exp(2(nu s + B_s)) ds`` with both
integral representations and check that they describe the same function.
"""

import numpy as np

from asiadens import ModelParams, density_hermite, density_yor
from asiadens.density import bulk_grid, moment

# %%
# Eight ``w`` values spread over the bulk of the law at ``nu = 0, t = 1``.
w = bulk_grid(0.0, 1.0, 1.0, n=8)
p = ModelParams(nu=0.0, eps=1.0, t=1.0, w=w)

# %%
# The Hermite route is a single real integral per point; the Yor route is a
# double integral (outer ``x``, inner Hankel contour).
h = density_hermite(p)
y = density_yor(p, "general")
print(f"{'w':>10} {'hermite':>14} {'yor':>14} {'rel diff':>10}")
for wi, a, b in zip(w, h.value, y.value):
    print(f"{wi:10.4f} {a:14.8e} {b:14.8e} {abs(a / b - 1):10.1e}")

# %%
# Total mass and first moment against ``E[A_t] = (e^{2t} - 1)/2``.
m0, _ = moment(0.0, 1.0, 1.0, 0.0)
m1, _ = moment(0.0, 1.0, 1.0, 1.0)
print(f"mass {m0:.12f}   mean {m1:.10f}   exact mean {np.expm1(2.0) / 2:.10f}")
