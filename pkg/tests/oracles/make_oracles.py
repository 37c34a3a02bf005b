"""Regenerate ``values.json`` with mpmath at 40 digits.

Every value here is computed independently of the package: densities from
the real ``theta = pi`` Hermite integral using ``mpmath.hermite``, the
Laplace closed form by direct quadrature of its Bessel integral, special
functions from mpmath's own implementations or defining integrals.

    python tests/oracles/make_oracles.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

DENSITY_POINTS = [
    # (nu, eps, t, w)
    (0.5, 1, 0.25, 0.1), (0.5, 1, 0.25, 0.3), (0.5, 1, 0.25, 1), (0.5, 1, 0.25, 3),
    (0.5, 1, 1, 0.1), (0.5, 1, 1, 0.3), (0.5, 1, 1, 1), (0.5, 1, 1, 3),
    (0.5, 1, 2, 0.1), (0.5, 1, 2, 0.3), (0.5, 1, 2, 1), (0.5, 1, 2, 3),
    (0, 1, 1, 1), (-0.5, -1, 1, 2), (2.5, 1, 0.25, 0.5), (-1.5, 2, 1, 0.7),
    (1, -0.5, 2, 0.4),
]


def prefactor(nu, eps, t, w):
    nu, eps, t, w = map(mp.mpf, (nu, eps, t, w))
    W = w ** (1 / eps)
    return (2 ** (nu / 2) / abs(eps) / mp.sqrt(mp.pi * t) * mp.exp(-(nu ** 2 * t + 1 / W) / 2)
            * w ** ((nu - 1) / (2 * eps) - 1))


def density(nu, eps, t, w):
    W = mp.mpf(w) ** (1 / mp.mpf(eps))
    a = 1 / mp.sqrt(2 * W)
    t = mp.mpf(t)

    def f(y):
        return mp.exp(-y ** 2 / (2 * t)) * mp.sinh(y) * mp.sin(mp.pi * y / t) * mp.hermite(-(nu + 1), a * mp.cosh(y))

    integral = mp.quad(f, mp.linspace(0, 14 * mp.sqrt(t) + 2, 60))
    return mp.gamma(nu + 1) * prefactor(nu, eps, t, w) / mp.pi * mp.exp(mp.pi ** 2 / (2 * t)) * integral


def laplace_rhs(z, nu, eps, w):
    W = mp.mpf(w) ** (1 / mp.mpf(eps))
    a = 1 / mp.sqrt(2 * W)
    rho = mp.sqrt(2 * mp.mpf(z) + mp.mpf(nu) ** 2)
    integral = mp.quad(lambda x: mp.besseli(rho, 2 * a * x) * x ** (nu - 1) * mp.exp(-x * x), [0, 1, 3, 8, mp.inf])
    return (2 * W) ** (mp.mpf(nu) / 2) / (abs(eps) * w) * mp.exp(-1 / (2 * W)) * integral


def c2(z):
    return [float(mp.re(z)), float(mp.im(z))]


def main():
    out = {"density": [], "laplace_rhs": [], "hermite": [], "kummer": [], "gamma": [], "besseli": []}
    for nu, eps, t, w in DENSITY_POINTS:
        out["density"].append({"nu": nu, "eps": eps, "t": t, "w": w, "value": float(density(nu, eps, t, w))})
    for z, nu, eps, w in [(5, 0.5, 1, 1), (3, 0, 1, 0.5), (8, 2, -1, 2)]:
        out["laplace_rhs"].append({"z": z, "nu": nu, "eps": eps, "w": w, "value": float(laplace_rhs(z, nu, eps, w))})
    for mu, z in [(-1, 1), (-2, 0), (-0.5, 3), (-1, 8), (-1.5, 20 * mp.expjpi(0.25)), (0.7, 2.5),
                  (2.3 + 1j, -1.2 + 0.4j), (-3.2, -4), (1.5, 30), (-0.5 + 2j, 5j)]:
        out["hermite"].append({"mu": c2(mp.mpc(mu)), "z": c2(mp.mpc(z)), "value": c2(mp.hermite(mu, z))})
    # defining integrals, independent of mpmath's Hermite code
    out["erfc1_quad"] = float(2 / mp.sqrt(mp.pi) * mp.quad(lambda u: mp.exp(-u * u), [1, mp.inf]))
    out["hermite_negdeg_quad"] = [
        {"mu": -2, "z": 0, "value": float(mp.quad(lambda u: mp.exp(-u * u) * u, [0, mp.inf]) / mp.gamma(2))},
    ]
    for a, b, z in [(-1, 0.5, 4), (0.3, 1.7, -12.5), (1.2 + 0.5j, 0.5, 6 + 2j), (-2.5, 1.5, 30)]:
        out["kummer"].append({"a": c2(mp.mpc(a)), "b": c2(mp.mpc(b)), "z": c2(mp.mpc(z)),
                              "value": c2(mp.hyp1f1(a, b, z))})
    for z in [0.5, 1e-3 + 0j, -2.5, 3 + 4j, -4.5 + 0.5j, 20.2]:
        out["gamma"].append({"z": c2(mp.mpc(z)), "value": c2(mp.gamma(z))})
    for rho, eta in [(3, 1), (0.5, 2), (1, 3), (mp.sqrt(2) * 1j, 2), (2.3 + 1j, 5), (5, 0.1), (0, 20)]:
        out["besseli"].append({"rho": c2(mp.mpc(rho)), "eta": c2(mp.mpc(eta)), "value": c2(mp.besseli(rho, eta))})
    path = Path(__file__).with_name("values.json")
    path.write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
