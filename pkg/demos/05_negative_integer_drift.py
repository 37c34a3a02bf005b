"""
Negative integer drift
======================

At ``nu = -1, -2, ...`` the Hermite route has a removable singularity
(``Gamma(nu + 1)`` has a pole, the Hermite integral a zero) and is not
evaluated; ``density`` switches to the Yor route there.
"""

import numpy as np

from asiadens import ModelParams, density
from asiadens.density import NEG_INT_GUARD, density_hermite, density_yor

w = np.array([0.05, 0.2, 1.0])

for nu in (-2.0, -2.0 + 1e-7, -2.0 + 1e-3):
    r = density(ModelParams(nu, 1.0, 1.0, w))
    print(f"nu={nu:+.7f}  route {r.route:18s}  values {np.array2string(r.value, precision=8)}")

# %%
# Just outside the guard band both routes are available and agree.
for d in (1e-3, 1e-4, 10 * NEG_INT_GUARD):
    p = ModelParams(-2.0 + d, 1.0, 1.0, w)
    h = density_hermite(p).value
    y = density_yor(p, "general", tabulate=True).value
    print(f"nu=-2+{d:.0e}  max rel diff {np.max(np.abs(h / y - 1)):.1e}")
