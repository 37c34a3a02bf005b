"""Complex special-function kernel.

Gamma, Kummer's confluent hypergeometric function, Hermite functions of
arbitrary complex degree and the modified Bessel function of the first kind.
Everything is vectorised over the argument; degrees and parameters are
scalars.

Hermite functions are evaluated in one of several regimes:

``series``
    the two-Kummer combination, used while its cancellation stays small;
``asymptotic``
    the large-argument expansion, inside ``|arg z| <= asym_sector``;
``negative-degree-integral``
    the Laplace-type integral, valid for ``Re(mu) < 0``, combined with
    upward recurrence in the degree when ``Re(mu) >= 0``;
``reflection``
    the connection formula mapping the left half plane to the right one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sps

from .errors import BadParameter, DomainError, NoConvergence, PoleError

EPS = np.finfo(float).eps
POLE_TOL = 1e-12
SQRT_PI = math.sqrt(math.pi)

@dataclass(frozen=True)
class HermiteConfig:
    """Regime thresholds for :func:`hermite_h` (all overridable)."""

    series_max_abs: float = 12.0
    asym_min_abs: float = 6.0
    asym_sector: float = 5 * math.pi / 8
    asym_max_terms: int = 200
    rtol: float = 1e-13


DEFAULT_HERMITE = HermiteConfig()


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _pole_distance(z: np.ndarray) -> np.ndarray:
    """Distance from z to the nearest non-positive integer."""
    n = np.minimum(np.round(z.real), 0.0)
    return np.abs(z - n)


def gamma_complex(z):
    """Gamma function for complex arguments.

    Raises :class:`PoleError` within ``1e-12`` of a non-positive integer.

    >>> complex(gamma_complex(5))
    (24+0j)
    """
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any((z.real < 0.5) & (_pole_distance(z) < POLE_TOL)):
        raise PoleError(f"gamma pole at {z[_pole_distance(z) < POLE_TOL][0]}")
    out = sps.gamma(z)
    real = z.imag == 0
    out[real] = sps.gamma(z.real[real])
    return out[0] if scalar else out


def rgamma(z):
    """Reciprocal gamma function (entire; exactly zero at the poles)."""
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = sps.rgamma(z)
    real = z.imag == 0
    out[real] = sps.rgamma(z.real[real])
    out[(z.real < 0.5) & (_pole_distance(z) < POLE_TOL)] = 0.0
    return out[0] if scalar else out


def loggamma(z):
    """Principal branch of log Gamma."""
    return sps.loggamma(_as_complex(z))


def _is_nonpos_int(a: complex) -> bool:
    return abs(a.imag) < POLE_TOL and a.real <= POLE_TOL and abs(a.real - round(a.real)) < POLE_TOL


class _Neumaier:
    """Compensated (TwoSum) accumulator over complex arrays.

    Complex addition is componentwise, so Knuth's branch-free TwoSum applies
    to real and imaginary parts at once.
    """

    def __init__(self, shape):
        self.s = np.zeros(shape, dtype=complex)
        self.c = np.zeros(shape, dtype=complex)

    def add(self, x):
        t = self.s + x
        bp = t - self.s
        self.c += (self.s - (t - bp)) + (x - bp)
        self.s = t

    @property
    def total(self):
        return self.s + self.c


def _kummer_series(a: complex, b: complex, z: np.ndarray, max_terms: int):
    """Plain power series; returns (sum, sum of |terms|).

    Elements leave the working set once their terms have dropped below
    roundoff past the peak of the term sequence.
    """
    z = np.asarray(z, dtype=complex)
    total = np.empty(z.shape, dtype=complex)
    abs_total = np.empty(z.shape)
    flat_z = z.ravel()
    idx = np.arange(flat_z.size)
    zz = flat_z.copy()
    acc = _Neumaier(zz.shape)
    term = np.ones(zz.shape, dtype=complex)
    absum = np.ones(zz.shape)
    acc.add(term)
    terminating = _is_nonpos_int(a)
    kmin = np.abs(zz) + abs(a) + 2
    out_s = total.ravel()
    out_a = abs_total.ravel()
    for k in range(max_terms):
        term = term * ((a + k) / ((b + k) * (k + 1))) * zz
        acc.add(term)
        at = np.abs(term)
        absum = absum + at
        if terminating and k + 1 > -a.real + 0.5:
            done = np.ones(zz.shape, bool)
        else:
            done = (k > kmin) & (at <= EPS * 0.25 * np.abs(acc.s))
        if np.any(done):
            out_s[idx[done]] = acc.total[done]
            out_a[idx[done]] = absum[done]
            keep = ~done
            idx, zz, term, absum, kmin = idx[keep], zz[keep], term[keep], absum[keep], kmin[keep]
            acc.s, acc.c = acc.s[keep], acc.c[keep]
            if idx.size == 0:
                break
    else:
        raise NoConvergence(f"Kummer series did not converge in {max_terms} terms")
    return total, abs_total


def _kummer_asymptotic(a: complex, b: complex, z: np.ndarray, max_terms: int = 200):
    """Large-|z| expansion of the (unregularised) Kummer function."""
    logz = np.log(z)
    s1 = np.ones(z.shape, dtype=complex)
    s2 = np.ones(z.shape, dtype=complex)
    t1 = np.ones(z.shape, dtype=complex)
    t2 = np.ones(z.shape, dtype=complex)
    prev1 = np.full(z.shape, np.inf)
    prev2 = np.full(z.shape, np.inf)
    live1 = np.ones(z.shape, bool)
    live2 = np.ones(z.shape, bool)
    for k in range(max_terms):
        t1n = t1 * ((b - a + k) * (1 - a + k) / (k + 1)) / z
        t2n = t2 * ((a + k) * (a - b + 1 + k) / (k + 1)) / (-z)
        a1, a2 = np.abs(t1n), np.abs(t2n)
        live1 &= a1 < prev1
        live2 &= a2 < prev2
        s1 = np.where(live1, s1 + t1n, s1)
        s2 = np.where(live2, s2 + t2n, s2)
        prev1 = np.where(live1, a1, prev1)
        prev2 = np.where(live2, a2, prev2)
        t1, t2 = t1n, t2n
        if not (np.any(live1 & (a1 > EPS * np.abs(s1))) or np.any(live2 & (a2 > EPS * np.abs(s2)))):
            break
    sign = np.where(z.imag >= 0, 1.0, -1.0)
    term_exp = rgamma(a) * np.exp(z + (a - b) * logz) * s1
    term_alg = rgamma(b - a) * np.exp(sign * 1j * np.pi * a - a * logz) * s2
    gb = gamma_complex(b)
    err = np.abs(gb) * (np.abs(rgamma(a) * np.exp(z + (a - b) * logz)) * prev1
                        + np.abs(rgamma(b - a) * np.exp(-a * logz)) * prev2)
    return gb * (term_exp + term_alg), err


def kummer_phi(a, b, z, *, max_terms: int = 10_000, asym_min_abs: float = 10.0, return_cond: bool = False):
    """Kummer's confluent hypergeometric function Phi(a, b, z) = 1F1(a; b; z).

    Power series with Neumaier-compensated summation.  For ``Re(z) < 0`` the
    Kummer transformation ``Phi(a,b,z) = e^z Phi(b-a,b,-z)`` is applied
    first (unless ``a`` is a non-positive integer, when the series is a
    polynomial).  Large arguments whose series would lose more than a few
    digits to cancellation switch to the asymptotic expansion when its
    error estimate is smaller.  ``return_cond=True`` also returns the
    relative error bound in units of machine epsilon.

    >>> complex(kummer_phi(1, 1, 0.5)) == complex(np.exp(0.5))
    True
    """
    a = complex(a)
    b = complex(b)
    if _is_nonpos_int(b):
        raise BadParameter(f"Kummer Phi undefined for b = {b}")
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    if abs(a - b) < 1e-300:
        out = np.exp(z)
        cond = np.ones(z.shape)
        if return_cond:
            return (out[0], cond[0]) if scalar else (out, cond)
        return out[0] if scalar else out
    poly = _is_nonpos_int(a)
    flip = (z.real < 0) & (not poly)
    zz = np.where(flip, -z, z)
    aa_flip = b - a
    # series on both groups
    res = np.empty_like(z)
    cond = np.empty(z.shape)
    for mask, aa in ((flip, aa_flip), (~flip, a)):
        if np.any(mask):
            s, absum = _kummer_series(aa, b, zz[mask], max_terms)
            res[mask] = s
            cond[mask] = absum / np.maximum(np.abs(s), 1e-300)
    res = np.where(flip, np.exp(z) * res, res)
    bad = (cond * EPS > 1e-14) & (np.abs(z) >= asym_min_abs) & (not poly)
    if np.any(bad):
        val, err = _kummer_asymptotic(a, b, z[bad])
        acond = err / np.maximum(np.abs(val), 1e-300) / EPS + 1
        better = acond < cond[bad]
        idx = np.flatnonzero(bad)[better]
        res[idx] = val[better]
        cond[idx] = acond[better]
    if return_cond:
        return (res[0], cond[0]) if scalar else (res, cond)
    return res[0] if scalar else res


# ----------------------------------------------------------------- Hermite


def hermite_series(mu, z):
    """Two-Kummer representation of H_mu(z); returns (value, cancellation factor)."""
    mu = complex(mu)
    z = np.atleast_1d(_as_complex(z))
    z2 = z * z
    two_mu = np.exp(mu * math.log(2.0))
    ca = two_mu * SQRT_PI * rgamma((1 - mu) / 2)
    cb = -2 * SQRT_PI * two_mu * rgamma(-mu / 2)
    zero = (np.zeros_like(z), np.ones(z.shape))
    p1, c1 = kummer_phi(-mu / 2, 0.5, z2, return_cond=True) if ca != 0 else zero
    p2, c2 = kummer_phi((1 - mu) / 2, 1.5, z2, return_cond=True) if cb != 0 else zero
    t1 = ca * p1
    t2 = z * cb * p2
    h = t1 + t2
    with np.errstate(over="ignore", invalid="ignore"):
        cond = (np.abs(t1) * c1 + np.abs(t2) * c2) / np.maximum(np.abs(h), 1e-300)
    cond = np.where(np.isfinite(cond), cond, np.inf)
    return h, cond


def hermite_asymptotic(mu, z, n: int | None = None, *, return_error: bool = False):
    """Large-argument expansion of H_mu(z), principal branch of (2z)^mu.

    With ``n`` given, exactly ``n`` terms are summed.  With ``n=None`` the
    series is truncated optimally (before the smallest term, capped at 200
    terms).  The error estimate is the modulus of the first omitted term.
    """
    mu = complex(mu)
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(np.abs(np.angle(z)) >= 0.75 * np.pi) or np.any(z == 0):
        raise DomainError("asymptotic expansion requires |arg z| < 3*pi/4 and z != 0")
    inv = -1.0 / (4 * z * z)
    nmax = n if n is not None else DEFAULT_HERMITE.asym_max_terms
    s_out = np.ones(z.shape, dtype=complex)
    omitted = np.zeros(z.shape)
    idx = np.arange(z.size)
    inv_a = inv.ravel()
    s = np.ones(z.size, dtype=complex)
    term = np.ones(z.size, dtype=complex)
    prev = np.full(z.size, np.inf)
    so, om = s_out.ravel(), omitted.ravel()
    for k in range(nmax):
        # ratio of successive terms: (-mu+2k)(-mu+2k+1)/(k+1) * (-1) / (2z)^2
        nxt = term * ((-mu + 2 * k) * (-mu + 2 * k + 1) / (k + 1)) * inv_a
        an = np.abs(nxt)
        if k + 1 >= nmax:
            so[idx], om[idx] = s, an
            idx = idx[:0]
            break
        if n is None:
            grow = an >= prev
            small = ~grow & (an <= 0.1 * EPS * np.abs(s + nxt))
            s = np.where(grow, s, s + nxt)
            done = grow | small
            if np.any(done):
                so[idx[done]] = s[done]
                om[idx[done]] = an[done]
                keep = ~done
                idx, s, nxt, an, inv_a = idx[keep], s[keep], nxt[keep], an[keep], inv_a[keep]
                if idx.size == 0:
                    break
        else:
            s = s + nxt
        prev = an
        term = nxt
    if idx.size:
        so[idx] = s
    s = s_out
    lead = np.exp(mu * np.log(2 * z))
    val = lead * s
    err = np.abs(lead) * omitted
    if scalar:
        val, err = val[0], err[0]
    return (val, err) if return_error else val


_DE_H = 1.0 / 16


def _negdeg_nodes(mre: float, zmax_neg: float, h: float):
    # u = exp(v - exp(-v)); left end chosen so that u^{-Re mu} ~ exp(-Re(-mu) e^{-v}) < 1e-20
    vmin = -math.log(46.0 / mre)
    vmax = math.log(max(zmax_neg, 0.0) + 7.5) + 0.3
    v = np.arange(vmin, vmax + h, h)
    ev = np.exp(-v)
    u = np.exp(v - ev)
    return u, u * (1 + ev)


def hermite_h_negdeg(mu, z, *, return_error: bool = False):
    """H_mu(z) from its integral representation for Re(mu) < 0.

    H_mu(z) = Gamma(-mu)^{-1} int_0^inf exp(-u^2 - 2 z u) u^{-(mu+1)} du,
    computed with a double-exponential trapezoidal rule; the step is halved
    until successive estimates agree to roundoff.
    """
    mu = complex(mu)
    if mu.real >= 0:
        raise DomainError("integral representation needs Re(mu) < 0")
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    err = np.empty(z.shape)
    s = -mu - 1
    zneg = float(np.max(-z.real, initial=0.0))
    # chunk to bound memory
    step = max(1, 400_000 // 2000)
    flat_z = z.ravel()
    o = out.ravel()
    e = err.ravel()
    for i0 in range(0, flat_z.size, step):
        zc = flat_z[i0:i0 + step, None]
        prev = None
        h = 1.0 / 8
        while True:
            u, du = _negdeg_nodes(-mu.real, zneg, h)
            logu = np.log(u)
            f = np.exp(-u * u - 2 * zc * u + s * logu) * du
            val = f.sum(axis=-1) * h
            mag = np.abs(f).sum(axis=-1) * h
            if prev is not None:
                diff = np.abs(val - prev)
                if np.all(diff <= 1e-14 * np.abs(val) + 64 * EPS * mag) or h < 1.0 / 256:
                    break
            prev = val
            h /= 2
        o[i0:i0 + step] = val
        e[i0:i0 + step] = diff + 64 * EPS * mag
    rg = rgamma(-mu)
    out = out * rg
    err = err * abs(rg)
    if scalar:
        out, err = out[0], err[0]
    return (out, err) if return_error else out


def _hermite_right(mu: complex, z: np.ndarray, cfg: HermiteConfig):
    """Negative-degree integral plus upward recurrence (Re z >= 0 preferred)."""
    if mu.real < -0.2:
        return hermite_h_negdeg(mu, z)
    m = int(math.floor(mu.real)) + 1
    if mu.real - m > -0.2:
        m += 1
    lo = mu - m
    h_prev = hermite_h_negdeg(lo - 1, z)
    h_cur = hermite_h_negdeg(lo, z)
    deg = lo
    for _ in range(m):
        h_prev, h_cur = h_cur, 2 * z * h_cur - 2 * deg * h_prev
        deg += 1
    return h_cur


def hermite_regime(mu, z, cfg: HermiteConfig = DEFAULT_HERMITE) -> np.ndarray:
    """Regime tag each element of ``z`` would be evaluated in."""
    _, tags = _hermite_dispatch(complex(mu), np.atleast_1d(_as_complex(z)), cfg)
    return tags


def hermite_h(mu, z, cfg: HermiteConfig = DEFAULT_HERMITE):
    """Hermite function H_mu(z) for complex degree and argument.

    Reduces to the physicists' Hermite polynomials for non-negative integer
    ``mu`` and satisfies ``(2/sqrt(pi)) H_{-1}(z) = exp(z^2) erfc(z)``.

    >>> round(float(hermite_h(1, 1.5).real), 12)
    3.0
    """
    z = _as_complex(z)
    scalar = z.ndim == 0
    val, _ = _hermite_dispatch(complex(mu), np.atleast_1d(z), cfg)
    val = val.reshape(z.shape) if not scalar else val[0]
    return val


def _hermite_dispatch(mu: complex, z: np.ndarray, cfg: HermiteConfig):
    shape = z.shape
    z = z.ravel()
    out = np.full(z.shape, np.nan + 0j)
    tags = np.empty(z.shape, dtype=object)
    todo = np.ones(z.shape, bool)
    absz = np.abs(z)

    cand = todo & (absz >= cfg.asym_min_abs) & (np.abs(np.angle(z)) <= cfg.asym_sector)
    if np.any(cand):
        v, e = hermite_asymptotic(mu, z[cand], None, return_error=True)
        ok = e <= cfg.rtol * np.abs(v)
        idx = np.flatnonzero(cand)[ok]
        out[idx] = v[ok]
        tags[idx] = "asymptotic"
        todo[idx] = False

    cand = todo & (absz <= cfg.series_max_abs)
    if np.any(cand):
        v, cond = hermite_series(mu, z[cand])
        # polynomial degrees terminate the series exactly
        ok = (cond * EPS * 8 <= cfg.rtol) | _is_nonpos_int(-mu)
        ok &= np.isfinite(v)
        idx = np.flatnonzero(cand)[ok]
        out[idx] = v[ok]
        tags[idx] = "series"
        todo[idx] = False

    cand = todo & (z.real >= 0)
    if np.any(cand):
        idx = np.flatnonzero(cand)
        out[idx] = _hermite_right(mu, z[cand], cfg)
        tags[idx] = "negative-degree-integral"
        todo[idx] = False

    if np.any(todo):
        idx = np.flatnonzero(todo)
        out[idx] = _hermite_reflect(mu, z[todo], cfg)
        tags[idx] = "reflection"
    return out.reshape(shape), tags.reshape(shape)


def _hermite_reflect(mu: complex, z: np.ndarray, cfg: HermiteConfig):
    """Connection formula for Re z < 0.

    H_mu(z) = e^{-+i pi mu} H_mu(-z)
              + 2^{mu+1} sqrt(pi)/Gamma(-mu) e^{-+i pi (mu+1)/2} e^{z^2} H_{-mu-1}(+-i z)
    with the sign picked so that +-iz has non-negative real part.
    """
    sgn = np.where(z.imag >= 0, -1.0, 1.0)  # argument is sgn*1j*z
    first = np.exp(-sgn * 1j * np.pi * mu) * _hermite_dispatch(mu, -z, cfg)[0]
    coef = np.exp((mu + 1) * math.log(2.0)) * SQRT_PI * rgamma(-mu)
    if coef == 0:
        return first
    arg = sgn * 1j * z
    second = coef * np.exp(-sgn * 1j * np.pi * (mu + 1) / 2 + z * z) * _hermite_dispatch(-mu - 1, arg, cfg)[0]
    return first + second


# ------------------------------------------------------------------ Bessel


def bessel_i_series(rho, eta, *, max_terms: int = 2000):
    """Modified Bessel function I_rho(eta) from its ascending series.

    Negative integer orders are mapped to the equal positive-order function.
    """
    rho = complex(rho)
    if _is_nonpos_int(rho) and rho.real < 0:
        rho = -rho
    eta = _as_complex(eta)
    scalar = eta.ndim == 0
    eta = np.atleast_1d(eta)
    half = eta / 2
    q = half * half
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.where(eta == 0, 1.0 if rho == 0 else 0.0, np.exp(rho * np.log(half)))
    term = np.ones(eta.shape, dtype=complex) * rgamma(rho + 1)
    acc = _Neumaier(eta.shape)
    acc.add(term)
    qmax = float(np.max(np.abs(q), initial=0.0)) + abs(rho)
    for k in range(max_terms):
        term = term * q / ((k + 1) * (k + 1 + rho))
        acc.add(term)
        if (k + 1) ** 2 > qmax and np.all(np.abs(term) <= 0.25 * EPS * np.abs(acc.s)):
            break
    else:
        raise NoConvergence("Bessel series did not converge")
    out = lead * acc.total
    return out[0] if scalar else out


def bessel_i_contour(rho, eta, contour=None, quad=None):
    """I_rho(eta) as (2 pi i)^{-1} times the integral of exp(-rho xi + eta cosh xi)
    over a logarithmic Hankel contour (Re eta > 0).

    Without an explicit contour the vertical segment passes through the real
    saddle ``xi = asinh(Re rho / Re eta)`` of the integrand, which avoids
    cancellation when ``I_rho(eta)`` is small.
    """
    from .contour import ContourSpec, integrate, auto_truncation
    from .quadrature import QuadratureConfig

    rho = complex(rho)
    eta = complex(eta)
    if eta.real <= 0:
        raise DomainError("Hankel representation needs Re(eta) > 0")
    quad = quad or QuadratureConfig(rtol=1e-12)
    if contour is None:
        contour = ContourSpec(radius=math.exp(math.asinh(max(rho.real, 0.0) / eta.real)))
    if contour.truncation is None:
        # ray modulus: exp(-Re(rho) u + |Im rho| theta + Re(eta cosh(u + i theta)))
        th = contour.theta

        L = contour.log_radius
        # relative to the integrand on the real axis at the vertical segment
        log_scale = -rho.real * L + eta.real * math.cosh(L)

        def log_env(u):
            c = np.cosh(u) * math.cos(th) * eta.real + abs(eta.imag) * np.sinh(u) * math.sin(th)
            return -rho.real * u + abs(rho.imag) * th + c - log_scale

        # margin: the integral is smaller than the peak when the saddle is narrow
        contour = contour.with_truncation(_solve_decay(log_env, contour, 1e-3 * quad.tail_tol))

    def f(xi):
        return np.exp(-rho * xi + eta * np.cosh(xi))

    return integrate(f, contour, quad).value


def _solve_decay(log_env, contour, tol):
    from .contour import truncation_from_envelope

    return truncation_from_envelope(log_env, contour, tol)
