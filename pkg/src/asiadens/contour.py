"""Logarithmic Hankel contours and quadrature along them.

A contour ``log C(theta, R)`` consists of three oriented pieces:

* the lower ray ``u - i theta`` for ``u`` running from the truncation point
  down to ``ln R``,
* the vertical segment ``ln R + i phi`` for ``phi`` from ``-theta`` to
  ``theta``,
* the upper ray ``u + i theta`` for ``u`` from ``ln R`` out to the
  truncation point.

Integrals are returned already divided by ``2 pi i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import InvalidContour, TailNotNegligible
from .quadrature import QuadratureConfig, adaptive_gk

HALF_PI = 0.5 * math.pi
_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class ContourSpec:
    """Parameters of ``log C(theta, R)``.

    ``truncation`` is the cut-off of the ray parameter ``u``; ``None`` means
    the caller (or :func:`auto_truncation`) will choose it.  ``nodes`` is the
    initial number of quadrature panels per segment.
    """

    theta: float = math.pi
    radius: float = 1.0
    truncation: float | None = None
    nodes: int = 8

    def __post_init__(self):
        validate(self)

    @property
    def log_radius(self) -> float:
        return math.log(self.radius)

    @property
    def oscillatory(self) -> bool:
        return abs(self.theta - HALF_PI) < 1e-9

    def with_truncation(self, truncation: float) -> "ContourSpec":
        return replace(self, truncation=float(truncation))


def validate(c: ContourSpec) -> None:
    if not (HALF_PI - _ANGLE_SLACK <= c.theta <= math.pi + _ANGLE_SLACK):
        raise InvalidContour(f"theta={c.theta} outside [pi/2, pi]")
    if not c.radius >= 1.0:
        raise InvalidContour(f"radius={c.radius} must be >= 1")
    if c.truncation is not None and not c.truncation > math.log(c.radius):
        raise InvalidContour(f"truncation={c.truncation} must exceed ln(radius)={math.log(c.radius)}")
    if c.nodes < 1:
        raise InvalidContour("nodes must be positive")


@dataclass(frozen=True)
class Segment:
    name: str
    kind: str  # "ray" or "vertical"
    start: complex
    end: complex
    param_start: float
    param_end: float
    offset: complex  # ray: imaginary offset; vertical: real part

    def point(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "ray":
            return s + self.offset
        return self.offset + 1j * s

    def derivative(self, s):
        return np.ones_like(np.asarray(s, float), dtype=complex) * (1.0 if self.kind == "ray" else 1j)


def parameterize(c: ContourSpec) -> list[Segment]:
    """The three oriented segments of the contour, in traversal order."""
    validate(c)
    if c.truncation is None:
        raise InvalidContour("parameterize needs an explicit truncation")
    L, th, T = c.log_radius, c.theta, c.truncation
    return [
        Segment("lower_ray", "ray", complex(T, -th), complex(L, -th), T, L, complex(0, -th)),
        Segment("vertical", "vertical", complex(L, -th), complex(L, th), -th, th, complex(L, 0)),
        Segment("upper_ray", "ray", complex(L, th), complex(T, th), L, T, complex(0, th)),
    ]


@dataclass
class ContourIntegral:
    value: complex | np.ndarray
    abs_error_estimate: float | np.ndarray
    segments: dict = field(default_factory=dict)
    abs_integral: float | np.ndarray = 0.0
    oscillatory: bool = False


_TWO_PI_I = 2j * math.pi


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    c: ContourSpec,
    q: QuadratureConfig | None = None,
    *,
    symmetric: bool = False,
    reverse: bool = False,
    check_tail: bool = True,
) -> ContourIntegral:
    """``(2 pi i)^{-1}`` times the integral of ``f`` along ``c``.

    ``f`` maps an array of contour points to values and may prepend batch
    dimensions.  With ``symmetric=True`` the integrand is assumed to satisfy
    ``f(conj xi) = conj f(xi)``; only the upper half is integrated and the
    (real) result is ``Im(upper half integral) / pi``.
    """
    q = q or QuadratureConfig()
    if c.truncation is None:
        raise InvalidContour("contour truncation must be set before integration")
    segs = parameterize(c)
    opts = dict(rtol=q.rtol, atol=q.atol * 2 * math.pi, initial_panels=c.nodes,
                max_panels=q.max_panels, strict=q.strict)
    sign = -1.0 if reverse else 1.0
    parts = {}
    errs = {}
    absint = 0.0
    if symmetric:
        vert, ray = segs[1], segs[2]
        rv = adaptive_gk(lambda s: f(vert.point(s)) * 1j, 0.0, vert.param_end, **opts)
        rr = adaptive_gk(lambda s: f(ray.point(s)), ray.param_start, ray.param_end, **opts)
        v_up, r_up = rv.value, rr.value
        parts["vertical"] = sign * (v_up - np.conj(v_up)) / _TWO_PI_I
        parts["upper_ray"] = sign * r_up / _TWO_PI_I
        parts["lower_ray"] = sign * -np.conj(r_up) / _TWO_PI_I
        errs = {"vertical": rv.error / math.pi, "upper_ray": rr.error / (2 * math.pi),
                "lower_ray": rr.error / (2 * math.pi)}
        absint = (rv.resabs + rr.resabs) / math.pi
        value = (parts["vertical"] + parts["upper_ray"] + parts["lower_ray"]).real
    else:
        for seg in segs:
            d = 1j if seg.kind == "vertical" else 1.0
            r = adaptive_gk(lambda s, seg=seg, d=d: f(seg.point(s)) * d, seg.param_start, seg.param_end, **opts)
            parts[seg.name] = sign * r.value / _TWO_PI_I
            errs[seg.name] = r.error / (2 * math.pi)
            absint = absint + r.resabs / (2 * math.pi)
        value = parts["lower_ray"] + parts["vertical"] + parts["upper_ray"]
    error = sum(errs.values())
    if check_tail:
        ends = np.array([[segs[0].start, segs[2].end]])
        tail = np.max(np.abs(np.asarray(f(ends))), axis=-1).reshape(np.shape(absint))
        limit = q.tail_tol * np.maximum(absint * 2 * math.pi, 1e-300)
        if np.any(tail > limit):
            raise TailNotNegligible(
                f"|f| at truncation {c.truncation:.4g} is {np.max(tail):.3g}, "
                f"above tail tolerance {np.min(limit):.3g}"
            )
    return ContourIntegral(value, error, parts, absint, c.oscillatory)


# ---------------------------------------------------------------- truncation


def truncation_from_envelope(log_env: Callable[[np.ndarray], np.ndarray], c: ContourSpec, tol: float,
                             step: float = 0.02) -> float:
    """Smallest grid point ``T > ln R`` beyond which ``log_env(u) <= ln(tol)``.

    ``log_env`` must eventually decrease; it is scanned on a grid that is
    extended until its last point satisfies the bound.
    """
    L = c.log_radius
    target = math.log(tol)
    span = 8.0
    while True:
        u = L + np.arange(step, span + step, step)
        env = np.asarray(log_env(u), float)
        if env[-1] <= target and env[-1] <= env[-2]:
            break
        span *= 2
        if span > 4096:
            raise TailNotNegligible("integrand envelope does not decay")
    above = np.flatnonzero(env > target)
    if above.size == 0:
        return float(u[0])
    return float(u[min(above[-1] + 1, len(u) - 1)])


def ray_growth_bound(coupling: float, u, theta: float):
    """log of a majorant of ``|exp(coupling cosh(u + i theta))|`` (>= 0)."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.maximum(0.0, coupling * np.cosh(u) * math.cos(theta))


def auto_truncation(t: float, coupling: float, c: ContourSpec, tol: float, log_growth=None) -> float:
    """Ray cut-off ``T`` with Gaussian factor times growth bound below ``tol``.

    Solves ``exp(-(T^2 - theta^2)/(2t)) * G(T) <= tol`` where ``log G`` is
    ``log_growth(u)`` when given, else :func:`ray_growth_bound`.
    """
    if t <= 0 or tol <= 0:
        raise ValueError("t and tol must be positive")
    th = c.theta
    growth = log_growth or (lambda u: ray_growth_bound(coupling, u, th))

    def log_env(u):
        return -(u * u - th * th) / (2 * t) + growth(u)

    # refine to a fine grid for a sharp answer
    return truncation_from_envelope(log_env, c, tol, step=0.001)


# ------------------------------------------------------ per-element families


def saddle_contour(eta, t: float, min_theta: float = HALF_PI + 0.1, iters: int = 40):
    """Contour parameters adapted to ``exp(-xi^2/(2t) + eta cosh xi)``.

    For ``eta t < 1`` the vertical segment is moved to the real saddle
    ``L/t = eta sinh L``; otherwise ``L = 0``.  The ray angle is the minimiser
    over ``[min_theta, pi]`` of the modulus along the vertical segment, so the
    rays start where the integrand is smallest.  Returns ``(theta, L)``.
    Any output is a valid contour; ``iters`` only controls how close to the
    optimum it lies.
    """
    eta = np.asarray(eta, float)
    L = np.zeros_like(eta)
    small = eta * t < 1
    if np.any(small):
        et = eta[small] * t
        lo = np.full(et.shape, 1e-12)
        hi = np.maximum(2.0, 2 * np.log(2.0 / np.maximum(et, 1e-300)) + 2)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            g = mid - et * np.sinh(mid)
            lo = np.where(g > 0, mid, lo)
            hi = np.where(g > 0, hi, mid)
        L[small] = 0.5 * (lo + hi)
    k = eta * np.cosh(L)
    # d/dphi [phi^2/(2t) + k cos phi] = phi/t - k sin phi
    a = np.full(eta.shape, min_theta)
    b = np.full(eta.shape, math.pi)
    left_positive = a / t - k * np.sin(a) >= 0
    for _ in range(iters):
        mid = 0.5 * (a + b)
        d = mid / t - k * np.sin(mid)
        a = np.where(d < 0, mid, a)
        b = np.where(d < 0, b, mid)
    theta = np.where(left_positive, min_theta, 0.5 * (a + b))
    return theta, L


def _stretch_rate(span, scale):
    """``lam`` with ``span * lam / (e^lam - 1) = scale`` (0 when no stretch is needed)."""
    target = np.minimum(scale / span, 1.0)
    lo = np.zeros_like(target)
    hi = np.full_like(target, 60.0)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        g = mid / np.expm1(np.maximum(mid, 1e-300))
        lo = np.where(g > target, mid, lo)
        hi = np.where(g > target, hi, mid)
    return np.where(target >= 1.0, 0.0, 0.5 * (lo + hi))


def integrate_family(
    f: Callable[[np.ndarray], np.ndarray],
    theta,
    log_radius,
    truncation,
    q: QuadratureConfig,
    initial_panels: int = 8,
    ray_scale=None,
):
    """Batched symmetric contour integral with per-element contours.

    ``theta``, ``log_radius`` and ``truncation`` share one batch shape ``B``;
    ``f(xi)`` receives ``xi`` of shape ``B + (panels, 15)`` and must return
    the same shape.  Each piece is mapped onto ``[0, 1]`` so all elements
    share one adaptive partition; ``ray_scale`` (the width of the integrand
    near the start of the ray) switches the ray to an exponentially graded
    map.  The integrand must satisfy Schwarz reflection; only imaginary parts
    are integrated and the returned value is real.
    """
    th = np.asarray(theta, float)[..., None, None]
    L = np.asarray(log_radius, float)[..., None, None]
    T = np.asarray(truncation, float)[..., None, None]
    opts = dict(rtol=q.rtol, atol=q.atol * math.pi, initial_panels=initial_panels,
                max_panels=q.max_panels, strict=q.strict)
    span = T - L
    if ray_scale is None:
        lam = np.zeros_like(span)
    else:
        lam = _stretch_rate(span, np.asarray(ray_scale, float)[..., None, None])
    linear = lam < 1e-8
    denom = np.where(linear, 1.0, np.expm1(np.where(linear, 1.0, lam)))

    def fv(s):
        xi = L + 1j * th * s
        return (f(xi) * (1j * th)).imag

    def fr(s):
        e = np.exp(lam * s)
        u = np.where(linear, L + span * s, L + span * (e - 1) / denom)
        du = np.where(linear, span, span * lam * e / denom)
        return (f(u + 1j * th) * du).imag

    rv = adaptive_gk(fv, 0.0, 1.0, **opts)
    rr = adaptive_gk(fr, 0.0, 1.0, **opts)
    value = (rv.value + rr.value) / math.pi
    error = (rv.error + rr.error) / math.pi
    absint = (rv.resabs + rr.resabs) / math.pi
    return value, error, absint
