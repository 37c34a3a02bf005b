"""Densities of powers of the integrated exponential of Brownian motion.

For ``A_t = int_0^t exp(2(nu s + B_s)) ds`` and ``eps != 0`` this module
evaluates the density ``alpha(w)`` of ``A_t**eps`` in two independent ways:

* the *Yor route*: ``alpha = c * P(nu)`` with
  ``P(mu) = int_0^inf x^mu exp(-x^2) psi(x) dx`` and ``psi`` a contour
  integral of ``exp(-xi^2/2t) sinh(xi) exp(eta cosh xi)``;
* the *Hermite route*: ``alpha = Gamma(nu+1) * c * F(nu)`` where ``F`` is a
  single contour integral against a Hermite function of degree ``-(nu+1)``.

Throughout, ``W = w**(1/eps)`` and ``a = 1/sqrt(2W)``.  All public
functions accept an array of ``w`` values and vectorise over it.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import contour as ct
from .errors import InvalidParams, NegativeIntegerDegree, Overflow
from .quadrature import EPS, QuadratureConfig, adaptive_gk
from .specialfn import gamma_complex, hermite_h

NEG_INT_GUARD = 1e-6
_LOG_TAIL = math.log(1e-18)  # cut integrands this far below their peak
_LOG_MAX = 700.0
_H_NOISE = 64 * EPS  # relative accuracy of hermite_h values
_CHUNK_ELEMENTS = 2000  # outer nodes per inner batched integral
_INNER_PANELS = 400  # per inner contour; beyond this the result is cancellation-limited

YOR_VARIANTS = ("general", "theta-half", "theta-pi")
HERMITE_VARIANTS = ("general", "theta-half", "theta-pi")


@dataclass(frozen=True)
class ModelParams:
    """``(nu, eps, t, w)``; ``w`` may be a scalar or an array."""

    nu: float
    eps: float
    t: float
    w: float | np.ndarray = 1.0

    def __post_init__(self):
        if not np.isfinite(self.nu):
            raise InvalidParams("nu must be finite")
        if self.eps == 0 or not np.isfinite(self.eps):
            raise InvalidParams("eps must be a nonzero finite number")
        if not self.t > 0:
            raise InvalidParams("t must be positive")
        w = np.asarray(self.w, float)
        if not np.all(w > 0):
            raise InvalidParams("w must be positive")

    def with_w(self, w) -> "ModelParams":
        return replace(self, w=w)

    @property
    def w_array(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.w, float))

    @property
    def log_big_w(self) -> np.ndarray:
        """``log W = log(w) / eps``."""
        return np.log(self.w_array) / self.eps

    @property
    def a(self) -> np.ndarray:
        return np.exp(-0.5 * (math.log(2.0) + self.log_big_w))


@dataclass
class EvalResult:
    value: float | np.ndarray
    abs_error: float | np.ndarray
    route: str
    flags: tuple = ()

    def _scalarize(self, scalar: bool) -> "EvalResult":
        if scalar:
            self.value = float(np.asarray(self.value).ravel()[0])
            self.abs_error = float(np.asarray(self.abs_error).ravel()[0])
        return self


@dataclass(frozen=True)
class Prefactor:
    c: float | np.ndarray
    log_c: float | np.ndarray


def _log_prefactor(p: ModelParams) -> np.ndarray:
    nu, eps, t = p.nu, p.eps, p.t
    logW = p.log_big_w
    if np.any(-logW > _LOG_MAX):
        raise Overflow("w**(-1/eps) exceeds the floating-point exponent range")
    inv_w = np.exp(-logW)
    logw = np.log(p.w_array)
    return (-math.log(abs(eps)) + 0.5 * nu * math.log(2.0) - 0.5 * math.log(math.pi * t)
            - 0.5 * (nu * nu * t + inv_w) + ((nu - 1) / (2 * eps) - 1) * logw)


def prefactor(p: ModelParams) -> Prefactor:
    """The factor ``c`` common to both representations.

    ``c = |eps|^-1 2^(nu/2) (pi t)^-1/2 exp(-(nu^2 t + w^(-1/eps))/2)
    w^((nu-1)/(2 eps) - 1)``, computed in log form.
    """
    lc = _log_prefactor(p)
    scalar = np.ndim(p.w) == 0
    c = np.exp(lc)
    if scalar:
        return Prefactor(float(c[0]), float(lc[0]))
    return Prefactor(c, lc)


def is_negative_integer(nu: float, tol: float = NEG_INT_GUARD) -> bool:
    n = round(nu)
    return n <= -1 and abs(nu - n) < tol


# ------------------------------------------------------------------- kernel


def _vertical_log_max(eta, t, theta, L):
    """Largest Re(-xi^2/2t + eta cosh xi) on the vertical segment (upper half)."""
    phi = np.linspace(0.0, 1.0, 17) * np.asarray(theta)[..., None]
    L_ = np.asarray(L)[..., None]
    e = -(L_ * L_ - phi * phi) / (2 * t) + np.asarray(eta)[..., None] * np.cosh(L_) * np.cos(phi)
    return e.max(axis=-1)


def _ray_end(log_scale, t, theta, L, log_tol=_LOG_TAIL):
    """Ray cut-off from ``-(u^2 - theta^2)/2t + u - log_scale <= log_tol``.

    Uses ``|sinh| <= e^u`` and drops the (non-positive) ``eta cosh(u) cos(theta)``
    term, so the cut-off is conservative for every ``eta >= 0``.
    """
    disc = t * t + theta * theta - 2 * t * (log_scale + log_tol)
    T = t + np.sqrt(np.maximum(disc, 0.0))
    return np.maximum(T, L + 0.5)


def _kernel_scaled(eta, t: float, q: QuadratureConfig, theta=None, L=None, truncation=None):
    """``K_t(eta) = (2 pi i)^-1 int exp(-xi^2/2t) sinh(xi) exp(eta cosh xi) dxi``.

    Returns ``(mantissa, log_scale, error)`` with ``K = mantissa * exp(log_scale)``.
    Without explicit contour parameters a saddle-adapted contour is used for
    every element.
    """
    eta = np.asarray(eta, float)
    if theta is None:
        theta, L = ct.saddle_contour(eta, t)
    theta = np.broadcast_to(np.asarray(theta, float), eta.shape)
    L = np.broadcast_to(np.asarray(L, float), eta.shape)
    log_scale = _vertical_log_max(eta, t, theta, L)
    T = _ray_end(log_scale, t, theta, L) if truncation is None else np.broadcast_to(truncation, eta.shape)
    eta_b = eta[..., None, None]
    ls_b = log_scale[..., None, None]

    def f(xi):
        return np.exp(-xi * xi / (2 * t) + eta_b * np.cosh(xi) - ls_b) * np.sinh(xi)

    width = 1.0 / np.sqrt(1.0 / t + eta * np.cosh(L) * np.abs(np.cos(theta)))
    val, err, _ = ct.integrate_family(f, theta, L, T, q, ray_scale=width)
    return val, log_scale, err


class KernelTable:
    """Piecewise Chebyshev interpolant of ``log K_t(eta) - eta`` in ``log eta``.

    ``K_t`` does not depend on ``w`` or ``nu``, so sweeps over many ``w``
    (moments, CDFs) can share one table per ``t``.  Panels of width
    ``width`` in ``u = log eta`` are fitted lazily from saddle-contour values
    and halved until the trailing Chebyshev coefficients fall below the
    tolerance.  Values are positive for ``eta > 0``, so the logarithm is
    safe; a panel whose samples are not all positive is evaluated directly.
    """

    def __init__(self, t: float, q: QuadratureConfig, width: float = 2.0, deg: int = 24,
                 max_depth: int = 6):
        self.t = t
        self.q = q.with_(strict=False)
        self.width = width
        self.deg = deg
        self.max_depth = max_depth
        self.tol = max(0.1 * q.rtol, 1e-13)
        self._panels: dict[int, list] = {}

    def _direct(self, eta):
        return _kernel_scaled(eta, self.t, self.q)

    def _fit(self, lo: float, hi: float, depth: int) -> list:
        x = np.polynomial.chebyshev.chebpts2(self.deg + 1)
        u = lo + (hi - lo) * (x + 1) / 2
        eta = np.exp(u)
        m, ls, _ = self._direct(eta)
        if np.any(m <= 0):
            return [(lo, hi, None, 0.0)]
        g = ls + np.log(m) - eta
        cheb = np.polynomial.Chebyshev.fit(u, g, self.deg, domain=[lo, hi])
        tail = float(np.abs(cheb.coef[-3:]).max())
        floor = 64 * EPS * float(np.abs(g).max() + 1.0)
        if tail <= max(self.tol, floor) or depth >= self.max_depth:
            return [(lo, hi, cheb, max(tail, floor))]
        mid = 0.5 * (lo + hi)
        return self._fit(lo, mid, depth + 1) + self._fit(mid, hi, depth + 1)

    def __call__(self, eta):
        """``(mantissa, log_scale, error)`` in the layout of the direct kernel."""
        eta = np.asarray(eta, float)
        u = np.log(eta)
        mant = np.ones_like(eta)
        ls = np.empty_like(eta)
        err = np.empty_like(eta)
        keys = np.floor(u / self.width).astype(np.int64)
        for k in np.unique(keys):
            k = int(k)
            if k not in self._panels:
                self._panels[k] = self._fit(k * self.width, (k + 1) * self.width, 0)
            sel_k = keys == k
            for lo, hi, cheb, e in self._panels[k]:
                sel = sel_k & (u >= lo) & (u <= hi)
                if not sel.any():
                    continue
                if cheb is None:
                    m, l, er = self._direct(eta[sel])
                    mant[sel], ls[sel], err[sel] = m, l, er
                else:
                    ls[sel] = cheb(u[sel]) + eta[sel]
                    err[sel] = e
        return mant, ls, err


_TABLES: dict = {}


def kernel_table(t: float, q: QuadratureConfig | None = None) -> KernelTable:
    """Shared :class:`KernelTable` for ``t`` at the tolerance of ``q``."""
    q = q or QuadratureConfig(rtol=1e-11)
    key = (float(t), float(q.rtol))
    if key not in _TABLES:
        if len(_TABLES) > 64:
            _TABLES.clear()
        _TABLES[key] = KernelTable(float(t), q)
    return _TABLES[key]


def hankel_kernel(eta, t: float, contour: ct.ContourSpec | None = None, q: QuadratureConfig | None = None):
    """``K_t(eta)`` and its error estimate (unscaled)."""
    q = q or QuadratureConfig(rtol=1e-12)
    eta = np.asarray(eta, float)
    if contour is None:
        m, ls, e = _kernel_scaled(eta, t, q)
    else:
        m, ls, e = _kernel_scaled(eta, t, q, contour.theta, contour.log_radius, contour.truncation)
    s = np.exp(ls)
    return m * s, e * s


def psi(x, p: ModelParams, c: ct.ContourSpec | None = None, q: QuadratureConfig | None = None):
    """``psi(x) = K_t(2 a x)`` for scalar ``w`` (``nu`` is irrelevant).

    ``c=None`` selects saddle-adapted contours; otherwise the given contour is
    used for every ``x``.
    """
    a = float(p.a[0])
    return hankel_kernel(2 * a * np.asarray(x, float), p.t, c, q)[0]


def psi_theta_pi(x, p: ModelParams, q: QuadratureConfig | None = None):
    """``psi`` from its real form on the ``theta = pi, R = 1`` contour.

    ``(e^{pi^2/2t}/pi) int_0^inf e^{-y^2/2t} sinh(y) sin(pi y/t) e^{-eta cosh y} dy``
    with ``eta = 2 a x``.
    """
    q = q or QuadratureConfig(rtol=1e-12)
    t = p.t
    eta = 2 * float(p.a[0]) * np.atleast_1d(np.asarray(x, float))
    T = float(np.max(_ray_end(np.zeros(1), t, np.array([math.pi]), np.zeros(1), math.log(1e-20))))
    e = eta[:, None, None]

    def f(y):
        return np.exp(-y * y / (2 * t) - e * np.cosh(y) + np.log(np.sinh(np.maximum(y, 1e-300)))) * np.sin(math.pi * y / t)

    r = adaptive_gk(f, 0.0, T, rtol=q.rtol, initial_panels=16, max_panels=q.max_panels, strict=False)
    out = math.exp(math.pi ** 2 / (2 * t)) / math.pi * r.value
    return out if np.ndim(x) else float(out[0])


# ----------------------------------------------------- outer (Yor) integral


def _log_kernel_estimate(eta, t):
    """Cheap estimate of log|K_t(eta)| used only to bound integration ranges."""
    theta, L = ct.saddle_contour(eta, t, iters=25)
    ls = _vertical_log_max(eta, t, theta, L)
    return ls + np.log(np.maximum(np.sinh(np.maximum(L, 0.5)), 1.0))


def _s_range(log_weight, a, t):
    """Range of ``s = -log x`` that carries the outer integrand.

    ``log_weight(s)`` is the log of everything except the kernel.
    """
    s_lo = -np.log(2 * a + 12.0) - 1.0
    grid = s_lo[:, None] + np.arange(0, 160.0, 0.05)[None, :]
    eta = 2 * a[:, None] * np.exp(-grid)
    lg = log_weight(grid) + _log_kernel_estimate(eta, t)
    peak = lg.max(axis=1, keepdims=True)
    keep = lg >= peak + _LOG_TAIL - 5
    first = np.argmax(keep, axis=1)
    last = keep.shape[1] - 1 - np.argmax(keep[:, ::-1], axis=1)
    if np.any(last >= keep.shape[1] - 2):
        # envelope still significant at the far end; widen the window
        raise InvalidParams("outer integrand does not decay within the search window (nu too negative?)")
    lo = grid[np.arange(len(a)), np.maximum(first - 1, 0)]
    hi = grid[np.arange(len(a)), np.minimum(last + 1, keep.shape[1] - 1)]
    return float(lo.min()), float(hi.max()), peak[:, 0]


def _yor_outer(mu, p: ModelParams, q: QuadratureConfig, kernel, log_c=None):
    """``log_c``-weighted ``int_0^inf x^mu e^{-x^2} psi(x) dx`` for every ``w``.

    ``kernel(eta)`` returns ``(mantissa, log_scale, err)``.  ``mu`` may be
    complex.  Returns ``(value, abs_error)``.
    """
    a = p.a
    t = p.t
    lc = np.zeros_like(a) if log_c is None else log_c
    mu = complex(mu)

    def log_weight(s):
        return lc[:, None] - (mu.real + 1) * s - np.exp(-2 * s)

    s_lo, s_hi, _ = _s_range(log_weight, a, t)
    lc_b = lc[:, None, None]
    a_b = a[:, None, None]
    chunk = max(1, _CHUNK_ELEMENTS // (15 * len(a)))

    def g(s):
        vals, noises = [], []
        for i in range(0, s.shape[0], chunk):
            si = s[i:i + chunk]
            x = np.exp(-si)
            m, ls, err = kernel(2 * a_b * x)
            logw = lc_b - (mu + 1) * si - x * x + ls
            w = np.exp(np.minimum(logw.real, _LOG_MAX)) * np.exp(1j * logw.imag)
            if mu.imag == 0:
                w = w.real
            vals.append(w * m)
            noises.append(np.abs(w) * err)
        return np.concatenate(vals, axis=-2), np.concatenate(noises, axis=-2)

    r = adaptive_gk(g, s_lo, s_hi, rtol=q.rtol, atol=q.atol, initial_panels=24,
                    max_panels=min(q.max_panels, 4000), strict=q.strict)
    val = r.value
    err = r.error
    return val, err


def p_function(mu, p: ModelParams, c: ct.ContourSpec | None = None, q: QuadratureConfig | None = None):
    """``P(mu) = int_0^inf x^mu e^{-x^2} psi(x) dx`` (``p.nu`` is ignored).

    Entire in ``mu``; for ``Re(mu) <= -1`` convergence at zero comes only from
    the vanishing of ``psi``.
    """
    q = q or QuadratureConfig()
    kern = _kernel_fn(p.t, q, c)
    val, _ = _yor_outer(mu, p, q, kern)
    return val if np.ndim(p.w) else val[0]


def _kernel_fn(t, q, c: ct.ContourSpec | None):
    inner_q = q.with_(rtol=min(0.1 * q.rtol, 1e-11), strict=False, max_panels=_INNER_PANELS)
    if c is None:
        return lambda eta: _kernel_scaled(eta, t, inner_q)
    return lambda eta: _kernel_scaled(eta, t, inner_q, c.theta, c.log_radius, c.truncation)


def _theta_half_inner(eta, t: float, q: QuadratureConfig, rotation: float):
    """``J(eta) = int_0^inf e^{-y^2/2t} cosh(y) cos(eta sinh y - pi y/2t) dy``.

    With ``s = sinh y`` this is ``Re int_0^inf exp(-(y^2 + i pi y)/2t + i eta s) ds``;
    the ``s`` path is turned by ``rotation`` into the upper half plane where
    ``exp(i eta s)`` decays (``rotation = 0`` integrates the oscillatory form
    directly).  Integration runs over ``v = log|s|``.  Returns
    ``(mantissa, log_scale, err)``.
    """
    eta = np.asarray(eta, float)
    rot = np.exp(1j * rotation)
    # the log-Gaussian factor alone fixes the outer end of the v-range
    log_tol = _LOG_TAIL
    bump = (rotation ** 2 + math.pi * rotation) / (2 * t)
    v_hi = math.sqrt(2 * t * (-log_tol + bump + 2)) + 2.0
    if rotation > 0:
        # exp(-eta sin(rot) e^v) also cuts the range
        with np.errstate(divide="ignore"):
            v_eta = np.log((-log_tol + bump + 40) / np.maximum(eta * math.sin(rotation), 1e-300))
        v_hi = np.minimum(v_hi, np.maximum(v_eta, 0.0) + 1.0)
    else:
        v_hi = np.full(eta.shape, v_hi)
    v_lo = log_tol
    scale = bump
    eta_b = eta[..., None, None]
    vh = np.broadcast_to(v_hi, eta.shape)[..., None, None]

    def f(r):
        # r in [0, 1] maps onto [v_lo, v_hi] per element
        v = v_lo + (vh - v_lo) * r
        s = np.exp(v) * rot
        y = np.arcsinh(s)
        val = np.exp(-(y * y + 1j * math.pi * y) / (2 * t) + 1j * eta_b * s - scale) * s * (vh - v_lo)
        return val

    res = adaptive_gk(f, 0.0, 1.0, rtol=q.rtol, atol=q.atol, initial_panels=32,
                      max_panels=q.max_panels, strict=q.strict)
    return res.value.real, np.full(eta.shape, scale), res.error


_GROUP_LOG_W = 4.0  # widest log W span integrated on one shared grid


def _grouped(fn):
    """Split wide ``w`` arrays into narrow ``log W`` windows.

    Elements share quadrature panels, so mixing very different ``W`` makes
    the negligible ones chase roundoff.
    """
    @functools.wraps(fn)
    def wrapper(p: ModelParams, *args, **kw):
        if np.ndim(p.w) == 0:
            return fn(p, *args, **kw)
        w = np.asarray(p.w, float)
        lw = np.log(w.ravel()) / p.eps
        if lw.size == 0 or np.ptp(lw) <= _GROUP_LOG_W:
            return fn(p, *args, **kw)
        order = np.argsort(lw)
        bins = np.floor((lw[order] - lw[order[0]]) / _GROUP_LOG_W).astype(int)
        val = np.empty(lw.size)
        err = np.empty(lw.size)
        res = None
        flags: tuple = ()
        for b in np.unique(bins):
            idx = order[bins == b]
            res = fn(p.with_w(w.ravel()[idx]), *args, **kw)
            val[idx] = res.value
            err[idx] = res.abs_error
            flags += tuple(f for f in res.flags if f not in flags)
        return EvalResult(val.reshape(w.shape), err.reshape(w.shape), res.route, flags)
    return wrapper


@_grouped
def density_yor(p: ModelParams, variant: str = "theta-pi", c: ct.ContourSpec | None = None,
                q: QuadratureConfig | None = None, *, rotation: float = math.pi / 4,
                tabulate: bool = False) -> EvalResult:
    """Density via ``alpha = c * int_0^inf x^nu e^{-x^2} psi(x) dx``.

    ``variant``:

    ``"general"``
        ``psi`` on the contour ``c`` (saddle-adapted per ``x`` when ``c`` is
        None);
    ``"theta-pi"``
        ``psi`` from the real ``theta = pi, R = 1`` integral
        ``(e^{pi^2/2t}/pi) int e^{-y^2/2t} sinh y sin(pi y/t) e^{-eta cosh y} dy``;
    ``"theta-half"``
        ``psi`` from the ``theta = pi/2`` integral
        ``(e^{pi^2/8t}/pi) int e^{-y^2/2t} cosh y cos(eta sinh y - pi y/2t) dy``,
        evaluated along a rotated path (``rotation=0`` for the literal form).

    ``tabulate=True`` (``"general"`` with ``c=None`` only) reads ``psi`` from
    the shared :func:`kernel_table` of ``t``; worthwhile when sweeping many
    ``w`` at one ``t``.
    """
    if variant not in YOR_VARIANTS:
        raise ValueError(f"unknown Yor variant {variant!r}")
    q = q or QuadratureConfig()
    t = p.t
    lc = _log_prefactor(p)
    inner_q = q.with_(rtol=min(0.1 * q.rtol, 1e-11), strict=False, max_panels=_INNER_PANELS)
    if tabulate and (variant != "general" or c is not None):
        raise ValueError("tabulate applies to the saddle-contour general variant only")
    if tabulate:
        kern = kernel_table(t, inner_q)
    elif variant == "general":
        kern = _kernel_fn(t, q, c)
    elif variant == "theta-pi":
        def kern(eta):
            return _kernel_scaled(eta, t, inner_q, math.pi, 0.0)
    else:
        def kern(eta):
            m, ls, e = _theta_half_inner(eta, t, inner_q, rotation)
            k = math.pi ** 2 / (8 * t) - math.log(math.pi)
            return m, ls + k, e
    val, err = _yor_outer(p.nu, p, q, kern, lc)
    flags = ("slow-convergence",) if p.nu <= -1 else ()
    return EvalResult(val, err, f"yor-{variant}", flags)._scalarize(np.ndim(p.w) == 0)


# --------------------------------------------------------- Hermite route


def _hermite_log_env(y, a, nu, kind):
    """Crude log-majorant of the Hermite-route integrand (ranges only)."""
    if kind == "pi":
        z = a * np.cosh(y)
    else:
        z = a * np.sinh(y)
    d = abs(nu + 1)
    return -y * y / 2 + y + d * np.log(2 * z + 2)


def _hermite_real_integral(p: ModelParams, q: QuadratureConfig, kind: str):
    t, nu = p.t, p.nu
    a = p.a
    mu = -(nu + 1)
    y_grid = np.arange(0, 80.0, 0.02)
    env = -y_grid[None, :] ** 2 / (2 * t) + y_grid[None, :] + abs(nu + 1) * np.log(
        2 * a[:, None] * np.cosh(y_grid[None, :]) + 2)
    peak = env.max(axis=1, keepdims=True)
    significant = env >= peak + _LOG_TAIL - 10
    last = significant.shape[1] - 1 - np.argmax(significant[:, ::-1], axis=1)
    T = float(y_grid[min(last.max() + 1, len(y_grid) - 1)])
    a_b = a[:, None, None]

    if kind == "pi":
        def f(y):
            h = hermite_h(mu, a_b * np.cosh(y)).real
            g = np.exp(-y * y / (2 * t)) * np.sinh(y)
            return g * np.sin(math.pi * y / t) * h, _H_NOISE * np.abs(g * h)
        log_k = math.pi ** 2 / (2 * t)
    else:
        def f(y):
            h = hermite_h(mu, -1j * a_b * np.sinh(y))
            g = np.exp(-y * y / (2 * t)) * np.cosh(y)
            return g * (np.exp(-1j * math.pi * y / (2 * t)) * h).real, _H_NOISE * np.abs(g * h)
        log_k = math.pi ** 2 / (8 * t)

    r = adaptive_gk(f, 0.0, T, rtol=q.rtol, atol=q.atol, initial_panels=16,
                    max_panels=q.max_panels, strict=q.strict)
    return r.value, r.error, log_k - math.log(math.pi)


def _hermite_integrand(mu: complex, a_b, t: float):
    def f(xi):
        return np.exp(-xi * xi / (2 * t)) * np.sinh(xi) * hermite_h(mu, -a_b * np.cosh(xi))
    return f


def f_function(mu, p: ModelParams, c: ct.ContourSpec | None = None, q: QuadratureConfig | None = None):
    """``F(mu) = (2 pi i)^-1 int exp(-xi^2/2t) sinh(xi) H_{-(mu+1)}(-a cosh xi) dxi``.

    Entire in ``mu``; ``p.nu`` is ignored.  Returns ``(value, abs_error)``.
    """
    q = q or QuadratureConfig()
    c = c or ct.ContourSpec()
    mu = complex(mu)
    a_b = p.a[:, None, None]
    f = _hermite_integrand(-(mu + 1), a_b, p.t)
    if c.truncation is None:
        c = c.with_truncation(_hermite_contour_truncation(mu, p, c))
    res = ct.integrate(f, c, q, symmetric=mu.imag == 0, check_tail=False)
    val = res.value
    scalar = np.ndim(p.w) == 0
    if scalar:
        return complex(np.ravel(val)[0]), float(np.ravel(res.abs_error_estimate)[0])
    return val, res.abs_error_estimate


def _hermite_contour_truncation(mu, p: ModelParams, c: ct.ContourSpec) -> float:
    """Ray cut-off below roundoff of the largest ray value (all ``w``)."""
    t, th = p.t, c.theta
    a = p.a
    deg = abs(mu + 1)
    L = c.log_radius

    def log_env(u):
        u = np.asarray(u)[None, :]
        g = -(u * u - th * th) / (2 * t) + u + deg * np.log(2 * a[:, None] * np.cosh(u) + 2)
        return (g - g.max(axis=1, keepdims=True)).max(axis=0)

    return max(ct.truncation_from_envelope(log_env, c, math.exp(_LOG_TAIL)), L + 0.5)


@_grouped
def density_hermite(p: ModelParams, variant: str = "theta-half", c: ct.ContourSpec | None = None,
                    q: QuadratureConfig | None = None) -> EvalResult:
    """Density via ``alpha = Gamma(nu+1) * c * F(nu)``.

    ``"theta-pi"`` integrates
    ``(Gamma c/pi) e^{pi^2/2t} int e^{-y^2/2t} sinh y sin(pi y/t) H_{-(nu+1)}(a cosh y) dy``;
    ``"theta-half"`` integrates
    ``(Gamma c/pi) e^{pi^2/8t} int e^{-y^2/2t} cosh y Re(e^{-i pi y/2t} H_{-(nu+1)}(-i a sinh y)) dy``;
    ``"general"`` evaluates ``F`` on the contour ``c``.
    """
    if variant not in HERMITE_VARIANTS:
        raise ValueError(f"unknown Hermite variant {variant!r}")
    if is_negative_integer(p.nu):
        raise NegativeIntegerDegree(f"nu={p.nu} is within {NEG_INT_GUARD} of a negative integer")
    q = q or QuadratureConfig()
    lc = _log_prefactor(p)
    g = float(gamma_complex(p.nu + 1).real)
    if variant == "general":
        val, err = f_function(p.nu, p.with_w(p.w_array), c, q)
        scale = g * np.exp(lc)
        val = np.real(val) * scale
        err = err * abs(scale)
    else:
        integral, ierr, log_k = _hermite_real_integral(p, q, "pi" if variant == "theta-pi" else "half")
        scale = g * np.exp(lc + log_k)
        val = integral * scale
        err = ierr * np.abs(scale)
    return EvalResult(val, err, f"hermite-{variant}")._scalarize(np.ndim(p.w) == 0)


# -------------------------------------------------------------- dispatch


DEFAULT_HERMITE_VARIANT = "theta-half"
FALLBACK_YOR_VARIANT = "general"


def density(p: ModelParams, q: QuadratureConfig | None = None, *,
            hermite_variant: str = DEFAULT_HERMITE_VARIANT) -> EvalResult:
    """Default evaluation: Hermite route, tabulated saddle Yor route near negative integers.

    The ``theta = pi/2`` Hermite form is the default because the ``theta = pi``
    form loses about ``exp(pi^2/2t)`` to cancellation (2e-6 relative at
    ``t = 0.25`` against 1e-12 for ``theta = pi/2``).
    """
    if is_negative_integer(p.nu):
        return density_yor(p, FALLBACK_YOR_VARIANT, q=q, tabulate=True)
    return density_hermite(p, hermite_variant, q=q)


def density_saddle(p: ModelParams, q: QuadratureConfig | None = None) -> EvalResult:
    """Yor route with saddle-adapted inner contours.

    Unlike the fixed ``theta = pi`` forms it keeps full accuracy for small
    ``t`` (``t << 0.1``) where those forms cancel catastrophically.
    """
    return density_yor(p, "general", None, q)


# ---------------------------------------------------- conditional density


def conditional_density(x, p: ModelParams, c: ct.ContourSpec | None = None,
                        q: QuadratureConfig | None = None):
    """Density ``a(x, w)`` of ``(A_t^{(0)})^eps`` at ``w`` given ``B_t = x``.

    ``a = |eps|^-1 e^{x^2/2t} e^x w^{-1-1/eps} exp(-(1 + e^{2x})/(2W)) K_t(e^x/W)``.
    Broadcasts over ``x`` and ``w``; ``p.nu`` is ignored.
    """
    q = q or QuadratureConfig(rtol=1e-11)
    t, eps = p.t, p.eps
    x = np.asarray(x, float)
    w = np.asarray(p.w, float)
    x, w = np.broadcast_arrays(x, w)
    logW = np.log(w) / eps
    eta = np.exp(x - logW)
    if c is None:
        m, ls, _ = _kernel_scaled(eta, t, q)
    else:
        m, ls, _ = _kernel_scaled(eta, t, q, c.theta, c.log_radius, c.truncation)
    log_pref = (-math.log(abs(eps)) + x * x / (2 * t) + x - (1 + 1 / eps) * np.log(w)
                - 0.5 * (1 + np.exp(2 * x)) * np.exp(-logW))
    out = m * np.exp(log_pref + ls)
    return out if out.ndim else float(out)


def mixing_density(p: ModelParams, q: QuadratureConfig | None = None):
    """Unconditional density from the Gaussian mixture of ``conditional_density``.

    ``alpha = e^{-nu^2 t/2} int e^{nu x} (2 pi t)^{-1/2} e^{-x^2/2t} a(x, w) dx``.
    """
    q = q or QuadratureConfig(rtol=1e-9)
    t, nu = p.t, p.nu
    w = p.w_array
    half = 12 * math.sqrt(t) + abs(nu) * t

    def f(x):
        xx = x[None, :, :]
        ww = w[:, None, None]
        cd = conditional_density(xx, p.with_w(ww), q=q.with_(rtol=1e-11, strict=False))
        return np.exp(nu * xx - nu * nu * t / 2 - xx * xx / (2 * t)) / math.sqrt(2 * math.pi * t) * cd

    r = adaptive_gk(f, nu * t - half, nu * t + half, rtol=q.rtol, initial_panels=16,
                    max_panels=q.max_panels, strict=False)
    val = r.value
    return float(val[0]) if np.ndim(p.w) == 0 else val


# ------------------------------------------------------------------ grids


def bulk_grid(nu: float, eps: float, t: float, n: int = 12, rel_floor: float = 1e-3,
              q: QuadratureConfig | None = None) -> np.ndarray:
    """``n`` log-spaced ``w`` values covering the bulk of the law of ``A_t^eps``.

    The bulk is where the density of ``log A_t`` exceeds ``rel_floor`` times
    its maximum; it is located on a coarse scan and mapped to ``w = W^eps``
    (ascending order).
    """
    q = q or QuadratureConfig(rtol=1e-8)

    def scan(pp):
        if is_negative_integer(nu):
            return density_yor(pp, "general", q=q, tabulate=True).value
        return density_hermite(pp, "theta-half", q=q).value

    mean_log = math.log(_mean_a(nu, t))
    lo, hi = mean_log - 20.0, mean_log + 12.0
    logW = np.linspace(lo, hi, 97)
    p = ModelParams(nu, 1.0, t, np.exp(logW))
    dens = np.asarray(scan(p)) * np.exp(logW)
    keep = np.flatnonzero(dens >= rel_floor * dens.max())
    a, b = logW[max(keep[0] - 1, 0)], logW[min(keep[-1] + 1, len(logW) - 1)]
    # refine the edges on a finer scan
    fine = np.linspace(a, b, 65)
    d2 = np.asarray(scan(p.with_w(np.exp(fine)))) * np.exp(fine)
    keep = np.flatnonzero(d2 >= rel_floor * dens.max())
    W = np.exp(np.linspace(fine[keep[0]], fine[keep[-1]], n))
    return np.sort(W ** eps)


def _mean_a(nu: float, t: float) -> float:
    k = 2 * nu + 2
    return t if abs(k) < 1e-12 else math.expm1(k * t) / k


def mean_a(nu: float, t: float) -> float:
    """``E[A_t] = (e^{(2nu+2)t} - 1)/(2nu+2)``, or ``t`` at ``nu = -1``."""
    return _mean_a(nu, t)


def log_moment_window(nu: float, eps: float, t: float, width: float = 1.0):
    """A ``log w`` interval outside which the law of ``A_t^eps`` has negligible mass."""
    m = math.log(_mean_a(nu, t))
    sd = 2 * math.sqrt(t) + 1.0
    lo, hi = m - 14 * sd - 8, m + 8 * sd + 4
    ends = (eps * lo * width, eps * hi * width)
    return min(ends), max(ends)


def moment(nu: float, eps: float, t: float, power: float = 0.0, route: str = "yor",
           q: QuadratureConfig | None = None):
    """``int_0^inf w^power alpha(w) dw`` by adaptive quadrature in ``log w``.

    ``route`` is ``"yor"`` (tabulated saddle contours), ``"hermite"`` or
    ``"default"`` (see :func:`density`).  The Yor route is the default here
    because it keeps relative accuracy deep into the tails; the Hermite
    values bottom out near ``1e-13`` of the peak, which a ``w^power`` weight
    can promote to a visible error (1e-3 in the mean at ``nu = 2.5, t = 2``).
    Returns ``(value, error)``.
    """
    q = q or QuadratureConfig(rtol=1e-9)
    inner = q.with_(rtol=0.1 * q.rtol)
    fn = {
        "default": lambda pp: density(pp, inner),
        "yor": lambda pp: density_yor(pp, "general", q=inner, tabulate=True),
        "hermite": lambda pp: density_hermite(pp, "theta-half", q=inner),
    }[route]
    lo, hi = log_moment_window(nu, eps, t)

    def f(u):
        w = np.exp(u.ravel())
        r = fn(ModelParams(nu, eps, t, w))
        jac = w ** (power + 1)
        # density error bars feed the noise channel, so refinement stops at them
        return (np.asarray(r.value) * jac).reshape(u.shape), (np.asarray(r.abs_error) * jac).reshape(u.shape)

    lo, hi = _signal_window(f, lo, hi)
    r = adaptive_gk(f, lo, hi, rtol=q.rtol, initial_panels=8, max_panels=2000, strict=False)
    return float(r.value), float(r.error)


def _signal_window(f, lo: float, hi: float, n: int = 161, rel: float = 1e-17):
    """Shrink ``[lo, hi]`` to where ``f`` is above ``rel`` of its peak and above its error bar.

    Far in the tails the weighted density is pure quadrature noise; a
    polynomial weight can lift that noise above the true integrand.
    """
    u = np.linspace(lo, hi, n)
    v, e = f(u[:, None])
    mag, e = np.abs(v[:, 0]), e[:, 0]
    resolved = mag > 10 * e
    if not np.any(resolved):
        return lo, hi
    k = int(np.argmax(np.where(resolved, mag, 0.0)))
    ok = resolved & (mag > rel * mag[k])
    i = k
    while i > 0 and ok[i - 1]:
        i -= 1
    j = k
    while j < n - 1 and ok[j + 1]:
        j += 1
    return u[max(i - 1, 0)], u[min(j + 1, n - 1)]
