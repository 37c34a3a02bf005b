"""
Laplace transforms in time
==========================

For ``nu >= 0`` the Laplace transform in ``t`` of the density has a closed
form as a Bessel-function integral.  Here it is compared with a direct
numerical transform of density values, and the Hankel form of ``I_rho``
is checked through its own inverse transform.
"""

from asiadens.laplace import laplace_numeric, laplace_rhs, verify_bessel_ilt

nu, eps, w = 0.5, 1.0, 1.0
zs = [3.0, 5.0, 8.0]

# %%
# One pass over the time grid serves all three ``z``.
lhs = laplace_numeric(zs, nu, eps, w)
for z, left in zip(zs, lhs):
    right = laplace_rhs(z, nu, eps, w).real
    print(f"z={z:3.0f}  numeric {left.real:.10f}  closed form {right:.10f}  rel {abs(left.real / right - 1):.1e}")

# %%
rep = verify_bessel_ilt(2.0, 0.0, 1.0)
print(f"Bessel inverse transform: rel deviation {rep['rel_dev']:.1e}")
