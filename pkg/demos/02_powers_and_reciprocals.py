"""
Powers of the functional
========================

The density of ``A_t^eps`` for ``eps = -1`` is the reciprocal law.  Any
power is a change of variables of the ``eps = 1`` density; the package
computes each one directly, so the identity is a check on the prefactor.
"""

import numpy as np

from asiadens import ModelParams, density

nu, t = -0.5, 1.0
w = np.array([0.25, 0.5, 1.0, 2.0, 4.0])

# %%
# alpha_eps(w) = |eps|^-1 w^(1/eps - 1) alpha_1(w^(1/eps))
for eps in (-1.0, 2.0, -0.5):
    direct = density(ModelParams(nu, eps, t, w)).value
    W = w ** (1 / eps)
    via_one = abs(1 / eps) * w ** (1 / eps - 1) * density(ModelParams(nu, 1.0, t, W)).value
    print(f"eps={eps:5.1f}  max rel diff {np.max(np.abs(direct / via_one - 1)):.1e}")

# %%
# The reciprocal density as a small table, ready for plotting elsewhere.
wr = np.geomspace(0.05, 20, 9)
for wi, v in zip(wr, density(ModelParams(nu, -1.0, t, wr)).value):
    print(f"{wi:8.3f}  {v:.6e}")
