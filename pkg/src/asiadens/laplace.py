"""Laplace-transform identities behind the densities.

``laplace_rhs`` is the closed form of ``int_0^inf e^{-zt} alpha_t(w) dt``
(``nu >= 0``) as a Bessel-function integral, and ``laplace_numeric`` the
same transform computed from the density module.  ``verify_bessel_ilt``
checks that the Laplace transform of

    t -> eta e^{-mu^2 t/2} (2 pi t)^{-1/2} K_t(eta)

is ``I_{sqrt(2z + mu^2)}(eta)``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import contour as ct
from .density import ModelParams, _kernel_scaled, density_hermite, density_yor
from .errors import DomainError, TailNotNegligible
from .quadrature import KRONROD_WEIGHTS, GAUSS_WEIGHTS, NODES, QuadratureConfig, adaptive_gk
from .specialfn import bessel_i_series


def _bessel_order(z, mu) -> complex:
    rho = cmath.sqrt(2 * complex(z) + mu * mu)
    if rho.real <= 0:
        raise DomainError(f"Re sqrt(2z + mu^2) must be positive (z={z})")
    return rho


def laplace_rhs(z, nu: float, eps: float, w: float, q: QuadratureConfig | None = None) -> complex:
    """Closed form of the Laplace transform in ``t`` of the density at ``w``.

    ``((2W)^{nu/2} / (|eps| w)) e^{-1/(2W)} int_0^inf I_rho(2x/sqrt(2W)) x^{nu-1} e^{-x^2} dx``
    with ``W = w^{1/eps}`` and ``rho = sqrt(2z + nu^2)``; the ``x``-integral
    is taken over ``x = s^2``.
    """
    if nu < 0:
        raise DomainError("the Bessel form of the transform needs nu >= 0")
    q = q or QuadratureConfig(rtol=1e-12)
    rho = _bessel_order(z, nu)
    W = w ** (1.0 / eps)
    a = 1.0 / math.sqrt(2 * W)
    x_max = a + math.sqrt(a * a + 80.0) + 2.0

    def f(s):
        x = s * s
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 2 * s ** (2 * nu - 1) * np.exp(-x * x) * bessel_i_series(rho, 2 * a * x)
        return np.where(s > 0, v, 0.0)

    r = adaptive_gk(f, 0.0, math.sqrt(x_max), rtol=q.rtol, initial_panels=16,
                    max_panels=q.max_panels, strict=q.strict)
    pref = (2 * W) ** (nu / 2) / (abs(eps) * w) * math.exp(-1 / (2 * W))
    val = complex(pref * r.value)
    return val


def _gk_fixed(edges):
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return mid[:, None] + half[:, None] * NODES, half


def laplace_numeric(z, nu: float, eps: float, w: float, t_grid=None, q: QuadratureConfig | None = None,
                    *, panels: int = 24, density_fn=None, return_error: bool = False):
    """``int_0^inf e^{-zt} alpha_t(w) dt`` from density values.

    The integral runs over ``tau = log t`` on ``t in [1e-3, 20/Re z]`` (or
    the edges in ``t_grid``) with one 15-point Kronrod panel per grid cell;
    the embedded 7-point rule supplies the error estimate.  Several ``z``
    may be passed at once; the density is evaluated once per node.  The
    small-``t`` end is checked for negligibility from the two smallest
    nodes.
    """
    zs = np.atleast_1d(np.asarray(z, complex))
    if np.any(zs.real <= 0):
        raise DomainError("Re z must be positive")
    if t_grid is None:
        t_max = 20.0 / float(zs.real.min())
        edges = np.linspace(math.log(1e-3), math.log(t_max), panels + 1)
    else:
        edges = np.log(np.asarray(t_grid, float))
    tau, half = _gk_fixed(edges)
    ts = np.exp(tau)
    dens = density_fn or _laplace_density
    vals = np.array([dens(ModelParams(nu, eps, float(t), w)) for t in ts.ravel()]).reshape(ts.shape)
    g = np.exp(-zs[:, None, None] * ts[None]) * (vals * ts)[None]
    kron = (g * KRONROD_WEIGHTS).sum(-1) * half
    gauss = (g * GAUSS_WEIGHTS).sum(-1) * half
    val = kron.sum(-1)
    err = np.abs(kron - gauss).sum(-1)
    # small-t tail: alpha vanishes like exp(-k/t); extrapolate from the first nodes
    t0, t1 = ts.ravel()[:2]
    v0, v1 = vals.ravel()[:2]
    head = abs(v0) * t0
    if v0 > 0 and v1 > v0:
        k = math.log(v1 / v0) / (1 / t0 - 1 / t1)
        # int_0^t0 v0 exp(-k(1/t - 1/t0)) dt <= v0 t0^2 / k
        head = v0 * t0 * min(1.0, t0 / k)
    if head > 1e-3 * max(abs(val).max(), 1e-300):
        raise TailNotNegligible(f"density not negligible at t={t0:.3g}")
    # large-t tail: the integrand's last node bounds the remainder
    tail = np.abs(g[..., -1, -1]) * ts.ravel()[-1]
    err = err + head + tail
    out = val if np.ndim(z) else val[0]
    e = err if np.ndim(z) else float(err[0])
    return (out, e) if return_error else out


def _laplace_density(p: ModelParams) -> float:
    # saddle contours keep the small-t values accurate
    if p.t < 0.2:
        return float(density_yor(p, "general", q=QuadratureConfig(rtol=1e-8)).value)
    return float(density_hermite(p, "theta-half", q=QuadratureConfig(rtol=1e-9)).value)


def ilt_rhs(t, mu: float, eta: float, c: ct.ContourSpec | None = None, q: QuadratureConfig | None = None):
    """``eta e^{-mu^2 t/2} (2 pi t)^{-1/2} K_t(eta)`` for an array of ``t``."""
    q = q or QuadratureConfig(rtol=1e-11)
    t = np.atleast_1d(np.asarray(t, float))
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        if c is None:
            m, ls, _ = _kernel_scaled(np.array([eta]), float(ti), q)
        else:
            m, ls, _ = _kernel_scaled(np.array([eta]), float(ti), q, c.theta, c.log_radius, c.truncation)
        out[i] = eta * math.exp(-mu * mu * ti / 2) / math.sqrt(2 * math.pi * ti) * m[0] * math.exp(ls[0])
    return out


def verify_bessel_ilt(z: float, mu: float, eta: float, c: ct.ContourSpec | None = None,
                      q: QuadratureConfig | None = None, *, panels: int = 40) -> dict:
    """Laplace-transform the contour-integral side and compare with ``I_rho(eta)``.

    Returns a JSON-serialisable report with the numerical transform, the
    series value of ``I_{sqrt(2z+mu^2)}(eta)`` and the relative deviation.
    """
    if eta <= 0:
        raise DomainError("eta must be positive")
    rho = _bessel_order(z, mu)
    t_max = 40.0 / z
    edges = np.linspace(math.log(1e-4), math.log(t_max), panels + 1)
    tau, half = _gk_fixed(edges)
    ts = np.exp(tau)
    vals = ilt_rhs(ts.ravel(), mu, eta, c, q).reshape(ts.shape)
    g = np.exp(-z * ts) * vals * ts
    lhs = float(((g * KRONROD_WEIGHTS).sum(-1) * half).sum())
    err = float((np.abs(((g * KRONROD_WEIGHTS) - (g * GAUSS_WEIGHTS)).sum(-1)) * half).sum())
    rhs = complex(bessel_i_series(rho, eta))
    dev = abs(lhs - rhs) / abs(rhs)
    return {
        "params": {"z": z, "mu": mu, "eta": eta, "order": [rho.real, rho.imag]},
        "lhs": lhs,
        "lhs_error": err,
        "rhs": rhs.real,
        "rel_dev": dev,
        "pass": bool(dev <= 1e-3),
    }
