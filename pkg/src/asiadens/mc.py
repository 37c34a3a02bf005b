"""Monte Carlo oracle for the law of ``A_t = int_0^t exp(2(nu s + B_s)) ds``.

Each path draws its Brownian increments from its own Philox stream keyed by
``(seed, path index)``, so a sample set depends only on ``(seed, paths,
steps)`` and never on chunking or the number of worker threads.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .density import ModelParams, density, mean_a
from .errors import CdfNotNormalized, InvalidParams
from .quadrature import gauss_legendre

SEED_ENV = "ASIA_SEED"
_CHUNK = 512


@dataclass(frozen=True)
class MCConfig:
    paths: int = 100_000
    steps: int = 4096
    seed: int = 20240607
    t: float = 1.0
    nu: float = 0.0
    eps: float = 1.0

    def __post_init__(self):
        if self.paths < 1:
            raise InvalidParams("paths must be >= 1")
        if self.steps < 2:
            raise InvalidParams("steps must be >= 2")
        if not self.t > 0:
            raise InvalidParams("t must be positive")
        if self.eps == 0:
            raise InvalidParams("eps must be nonzero")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParams("seed must fit in 64 bits")

    @classmethod
    def from_env(cls, **kw) -> "MCConfig":
        """Config whose seed is overridden by ``$ASIA_SEED`` when set."""
        if os.environ.get(SEED_ENV):
            kw["seed"] = int(os.environ[SEED_ENV])
        return cls(**kw)


@dataclass
class MCReport:
    ks_stat: float
    mean: float
    mean_ci_halfwidth: float
    n_effective: int
    elapsed: float
    paths: int = 0
    steps: int = 0
    seed: int = 0
    nu: float = 0.0
    eps: float = 1.0
    t: float = 1.0
    mean_exact: float = float("nan")
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _path_stream(seed: int, path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(path << 64) | seed))


def _chunk_samples(cfg: MCConfig, start: int, stop: int, strides) -> np.ndarray:
    n = cfg.steps
    dt = cfg.t / n
    z = np.empty((stop - start, n))
    for i, path in enumerate(range(start, stop)):
        z[i] = _path_stream(cfg.seed, path).standard_normal(n)
    b = np.zeros((stop - start, n + 1))
    np.cumsum(z * math.sqrt(dt), axis=1, out=b[:, 1:])
    s = np.arange(n + 1) * dt
    e = np.exp(2 * (cfg.nu * s + b))
    out = np.empty((len(strides), stop - start))
    for j, k in enumerate(strides):
        ek = e[:, ::k]
        out[j] = (cfg.t / (n // k)) * (ek.sum(axis=1) - 0.5 * (ek[:, 0] + ek[:, -1]))
    return out


def simulate(cfg: MCConfig, *, coarsen=(1,), workers: int = 1) -> np.ndarray:
    """Samples of ``A_t`` by the trapezoidal rule on exact Brownian paths.

    ``coarsen`` lists step strides; stride ``k`` integrates the same paths on
    every ``k``-th grid point (``steps/k`` steps).  Returns an array of shape
    ``(len(coarsen), paths)``, or ``(paths,)`` for the default single stride.
    """
    for k in coarsen:
        if cfg.steps % k or cfg.steps // k < 1:
            raise InvalidParams(f"stride {k} does not divide steps={cfg.steps}")
    bounds = [(i, min(i + _CHUNK, cfg.paths)) for i in range(0, cfg.paths, _CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda b: _chunk_samples(cfg, b[0], b[1], coarsen), bounds))
    else:
        parts = [_chunk_samples(cfg, a, b, coarsen) for a, b in bounds]
    out = np.concatenate(parts, axis=1)
    return out[0] if tuple(coarsen) == (1,) else out


# ------------------------------------------------------------------- CDF


def _batched(fn, size: int = 256):
    def run(p: ModelParams, w: np.ndarray) -> np.ndarray:
        return np.concatenate([np.atleast_1d(np.asarray(fn(p.with_w(w[i:i + size])), float))
                               for i in range(0, len(w), size)])
    return run


def _monotone_slopes(y, m, h):
    """Fritsch-Carlson limiter: shrink ``m`` so the cubic Hermite interpolant is monotone."""
    m = m.copy()
    d = np.diff(y) / h
    flat = d <= 0
    m[:-1][flat] = 0.0
    m[1:][flat] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.hypot(m[:-1], m[1:]) / d
        tau = np.where(~flat & (r > 3), 3 / r, 1.0)
    m[:-1] *= tau
    m[1:] *= tau
    return m


class DensityCDF:
    """CDF of ``A_t^eps`` from cumulative quadrature of the density.

    The density is integrated in ``log w`` on ``panels`` Gauss-Legendre
    panels; between panel edges the CDF is a cubic Hermite spline whose
    slopes are the density itself.  ``total`` is the integral over the whole
    range (should be 1).
    """

    def __init__(self, p: ModelParams, log_w_range: tuple[float, float], panels: int = 300,
                 nodes: int = 10, density_fn=None):
        dens = _batched(density_fn or (lambda pp: density(pp).value))
        lo, hi = log_w_range
        edges = np.linspace(lo, hi, panels + 1)
        x, wts = gauss_legendre(nodes, 0.0, 1.0)
        h = edges[1] - edges[0]
        pts = edges[:-1, None] + h * x[None, :]
        vals = dens(p, np.exp(pts.ravel())).reshape(pts.shape) * np.exp(pts)
        cell = (vals * wts[None, :]).sum(axis=1) * h
        cum = np.concatenate([[0.0], np.cumsum(cell)])
        slope = _monotone_slopes(cum, np.maximum(dens(p, np.exp(edges)) * np.exp(edges), 0.0), h)
        self.log_edges = edges
        self.total = float(cum[-1])
        self._spline = CubicHermiteSpline(edges, cum, slope)

    def __call__(self, w):
        lw = np.log(np.asarray(w, float))
        v = self._spline(np.clip(lw, self.log_edges[0], self.log_edges[-1]))
        return np.clip(v, 0.0, None)


def cdf_for(p: ModelParams, samples_hint=None, panels: int = 300) -> DensityCDF:
    """``DensityCDF`` on a range wide enough for the law of ``A_t^eps``."""
    m = math.log(mean_a(p.nu, p.t))
    sd = 2 * math.sqrt(p.t) + 1.0
    lo_W, hi_W = m - 12 * sd - 6, m + 6 * sd
    if samples_hint is not None:
        ls = np.log(np.asarray(samples_hint))
        lo_W, hi_W = min(lo_W, ls.min() - 1), max(hi_W, ls.max() + 1)
    rng = (p.eps * lo_W, p.eps * hi_W)
    return DensityCDF(p, (min(rng), max(rng)), panels)


def ks_statistic(x: np.ndarray, cdf) -> float:
    x = np.sort(np.asarray(x, float))
    n = len(x)
    F = np.asarray(cdf(x), float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_compare(samples, p: ModelParams, density_cdf, *, elapsed: float = 0.0,
               norm_tol: float = 1e-3) -> MCReport:
    """KS distance between ``samples**eps`` and ``density_cdf``.

    ``samples`` are draws of ``A_t``.  Raises :class:`CdfNotNormalized` when
    the CDF's total mass is not within ``norm_tol`` of one.
    """
    samples = np.asarray(samples, float)
    y = samples ** p.eps
    total = getattr(density_cdf, "total", None)
    if total is None:
        total = float(density_cdf(np.max(y) * 1e6))
    if not abs(total - 1) <= norm_tol:
        raise CdfNotNormalized(f"density CDF total mass {total:.6g}")
    ks = ks_statistic(y, density_cdf)
    n = len(samples)
    return MCReport(
        ks_stat=ks,
        mean=float(samples.mean()),
        mean_ci_halfwidth=float(3 * samples.std(ddof=1) / math.sqrt(n)) if n > 1 else float("inf"),
        n_effective=n,
        elapsed=elapsed,
        nu=p.nu,
        eps=p.eps,
        t=p.t,
        mean_exact=mean_a(p.nu, p.t),
    )


def mc_validate(cfg: MCConfig, *, workers: int = 1, cdf=None) -> MCReport:
    """Simulate, build the analytic CDF and compare."""
    t0 = time.perf_counter()
    a = simulate(cfg, workers=workers)
    p = ModelParams(cfg.nu, cfg.eps, cfg.t, 1.0)
    cdf = cdf or cdf_for(p, a)
    rep = ks_compare(a, p, cdf, elapsed=time.perf_counter() - t0)
    rep.paths, rep.steps, rep.seed = cfg.paths, cfg.steps, cfg.seed
    return rep


def richardson_bias_check(cfg: MCConfig, cdf=None, strides=(4, 2, 1), workers: int = 1) -> dict:
    """KS statistic and mean error at successively finer step counts.

    The coarser levels reuse the finest Brownian paths, so differences
    between levels are due to discretisation alone.  ``passed`` is true when
    the KS statistic never rises by more than the sampling noise
    ``1/sqrt(paths)`` from one level to the next.
    """
    samples = simulate(cfg, coarsen=strides, workers=workers)
    p = ModelParams(cfg.nu, cfg.eps, cfg.t, 1.0)
    cdf = cdf or cdf_for(p, samples[-1])
    exact = mean_a(cfg.nu, cfg.t)
    levels = []
    for k, a in zip(strides, samples):
        y = a ** cfg.eps
        levels.append({
            "steps": cfg.steps // k,
            "ks_stat": ks_statistic(y, cdf),
            "mean_error": float(a.mean() - exact),
        })
    noise = 1.0 / math.sqrt(cfg.paths)
    ks = [lv["ks_stat"] for lv in levels]
    ok = all(b <= a + noise for a, b in zip(ks, ks[1:]))
    return {"levels": levels, "noise": noise, "passed": bool(ok)}
