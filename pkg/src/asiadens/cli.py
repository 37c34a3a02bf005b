"""``asiadens`` command line.

Subcommands: ``density`` (CSV curve), ``compare`` (route agreement report),
``mc-validate`` (Monte Carlo KS report), ``laplace-check`` and ``special``.
Exit codes: 0 pass, 1 validation failure, 2 usage error, 3 under-powered run.

A JSON file given with ``--config`` supplies defaults for the chosen
subcommand; explicit flags override it.  ``--dump-config`` prints the
effective configuration instead of running.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import contour as ct
from . import laplace as lp
from . import mc
from . import specialfn as sf
from .density import (
    DEFAULT_HERMITE_VARIANT,
    ModelParams,
    bulk_grid,
    density,
    density_hermite,
    density_yor,
    is_negative_integer,
)
from .errors import AsiaDensError
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDERPOWERED = 0, 1, 2, 3
KS_THRESHOLD = 0.01
# below this many paths the 95% KS sampling band (1.36/sqrt(n)) exceeds the threshold
MIN_KS_PATHS = math.ceil((1.36 / KS_THRESHOLD) ** 2)


class UsageError(Exception):
    pass


def parse_grid(spec: str, log: bool = False) -> np.ndarray:
    """``start:stop:count`` (inclusive ends), log-spaced with ``log=True``."""
    try:
        start, stop, count = spec.split(":")
        start, stop, n = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"grid {spec!r} is not start:stop:count") from None
    if n < 0:
        raise UsageError("grid count must be >= 0")
    if log:
        if start <= 0 or stop <= 0:
            raise UsageError("log grid needs positive ends")
        return np.geomspace(start, stop, n)
    return np.linspace(start, stop, n)


def parse_complex(text: str) -> complex:
    """``"re"`` or ``"re,im"``."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse complex number {text!r}")


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _quad(args, rtol: float) -> QuadratureConfig:
    return QuadratureConfig(rtol=rtol, tail_tolerance=args.tail_tol)


def _contour(args):
    if args.theta is None and args.radius is None:
        return None
    return ct.ContourSpec(theta=args.theta if args.theta is not None else math.pi,
                          radius=args.radius if args.radius is not None else 1.0)


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


# ------------------------------------------------------------- commands


def _eval_route(p, route, c, q):
    if route == "yor":
        if c is not None:
            return density_yor(p, "general", c, q)
        return density_yor(p, "general", q=q, tabulate=True)
    if route == "hermite":
        if c is not None:
            return density_hermite(p, "general", c, q)
        return density_hermite(p, DEFAULT_HERMITE_VARIANT, q=q)
    return density(p, q)


def cmd_density(args) -> int:
    w = parse_grid(args.w_grid, args.log)
    if len(w) == 0:
        raise UsageError("empty w grid")
    p = ModelParams(args.nu, args.eps, args.t, w)
    q = _quad(args, args.rtol)
    c = _contour(args)
    out = csv.writer(sys.stdout, lineterminator="\n")
    if args.route == "both":
        if is_negative_integer(args.nu):
            raise UsageError("route 'both' needs a Hermite-capable nu (not a negative integer)")
        y = _eval_route(p, "yor", c, q)
        h = _eval_route(p, "hermite", c, q)
        out.writerow(["nu", "eps", "t", "w", "value", "abs_error", "route",
                      "value_hermite", "abs_error_hermite", "abs_diff", "agree"])
        ok = True
        for i, wi in enumerate(w):
            diff = abs(y.value[i] - h.value[i])
            tol = args.agree_tol * max(abs(y.value[i]), 1e-12) + y.abs_error[i] + h.abs_error[i]
            ok &= diff <= tol
            out.writerow([_fmt(args.nu), _fmt(args.eps), _fmt(args.t), _fmt(wi), _fmt(y.value[i]),
                          _fmt(y.abs_error[i]), y.route, _fmt(h.value[i]), _fmt(h.abs_error[i]),
                          _fmt(diff), int(diff <= tol)])
        return EXIT_OK if ok else EXIT_FAIL
    r = _eval_route(p, args.route, c, q)
    out.writerow(["nu", "eps", "t", "w", "value", "abs_error", "route"])
    for i, wi in enumerate(w):
        out.writerow([_fmt(args.nu), _fmt(args.eps), _fmt(args.t), _fmt(wi), _fmt(r.value[i]),
                      _fmt(r.abs_error[i]), r.route])
    return EXIT_OK


def compare_grid(nus, epss, ts, n_w: int = 12, threshold: float = 1e-6,
                 q: QuadratureConfig | None = None) -> dict:
    """Yor against Hermite over the grid; negative-integer ``nu`` is Yor-only."""
    q = q or QuadratureConfig(rtol=1e-10)
    worst = 0.0
    ok = True
    cells, yor_only = [], []
    for nu in nus:
        for eps in epss:
            for t in ts:
                if is_negative_integer(nu):
                    yor_only.append({"nu": nu, "eps": eps, "t": t})
                    continue
                w = bulk_grid(nu, eps, t, n_w)
                p = ModelParams(nu, eps, t, w)
                y = density_yor(p, "general", q=q)
                h = density_hermite(p, "theta-half", q=q)
                diff = np.abs(y.value - h.value)
                scale = np.maximum(np.abs(y.value), 1e-12)
                rel = float(np.max(diff / scale))
                cell_ok = bool(np.all(diff <= threshold * scale + y.abs_error + h.abs_error))
                ok &= cell_ok
                worst = max(worst, rel)
                cells.append({"nu": nu, "eps": eps, "t": t, "max_rel_dev": rel, "pass": cell_ok})
    return {"threshold": threshold, "max_rel_dev": worst, "pass": bool(ok), "cells": cells,
            "yor_only": yor_only}


def cmd_compare(args) -> int:
    nus, epss, ts = _floats(args.nu), _floats(args.eps), _floats(args.t)
    if not (nus and epss and ts) or args.w_count < 1:
        raise UsageError("empty comparison grid")
    rep = compare_grid(nus, epss, ts, args.w_count, args.threshold, _quad(args, args.rtol))
    _emit_json(rep)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def _resolve_seed(args) -> int:
    if args.seed_flag is not None:
        return args.seed_flag
    if os.environ.get(mc.SEED_ENV):
        return int(os.environ[mc.SEED_ENV])
    return args.seed


def cmd_mc_validate(args) -> int:
    cfg = mc.MCConfig(paths=args.paths, steps=args.steps, seed=_resolve_seed(args),
                      t=args.t, nu=args.nu, eps=args.eps)
    rep = mc.mc_validate(cfg, workers=args.workers)
    d = rep.to_dict()
    d.pop("elapsed")  # reports are compared byte for byte
    flags = []
    if cfg.paths < MIN_KS_PATHS:
        flags.append("insufficient for KS threshold")
    d["flags"] = flags
    d["ks_threshold"] = KS_THRESHOLD
    d["pass"] = bool(rep.ks_stat <= KS_THRESHOLD) and not flags
    _emit_json(d)
    if flags:
        return EXIT_UNDERPOWERED
    return EXIT_OK if d["pass"] else EXIT_FAIL


def cmd_laplace_check(args) -> int:
    if args.eta is not None:
        rep = lp.verify_bessel_ilt(args.z, args.mu, args.eta)
        _emit_json(rep)
        return EXIT_OK if rep["pass"] else EXIT_FAIL
    lhs, err = lp.laplace_numeric(args.z, args.nu, args.eps, args.w, return_error=True)
    rhs = lp.laplace_rhs(args.z, args.nu, args.eps, args.w)
    dev = abs(lhs - rhs) / abs(rhs)
    rep = {
        "params": {"nu": args.nu, "eps": args.eps, "w": args.w, "z": args.z},
        "lhs": complex(lhs).real,
        "lhs_error": float(err),
        "rhs": complex(rhs).real,
        "rel_dev": float(dev),
        "pass": bool(dev <= args.threshold),
    }
    _emit_json(rep)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_special(args) -> int:
    need = {"gamma": ("z",), "hermite": ("mu", "z"), "kummer": ("a", "b", "z"),
            "besseli": ("rho", "eta")}[args.function]
    vals = {}
    for name in need:
        text = getattr(args, name)
        if text is None:
            raise UsageError(f"special {args.function} needs --{name}")
        vals[name] = parse_complex(text)
    if args.function == "gamma":
        v = sf.gamma_complex(vals["z"])
    elif args.function == "hermite":
        v = sf.hermite_h(vals["mu"], vals["z"])
    elif args.function == "kummer":
        v = sf.kummer_phi(vals["a"], vals["b"], vals["z"])
    else:
        v = sf.bessel_i_series(vals["rho"], vals["eta"])
    v = complex(np.asarray(v).ravel()[0])
    print(_fmt(v.real) if v.imag == 0 else f"{_fmt(v.real)},{_fmt(v.imag)}")
    return EXIT_OK


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asiadens", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with defaults for this command")
        sp.add_argument("--dump-config", action="store_true", help="print effective config and exit")
        return sp

    d = common(sub.add_parser("density", help="density curve as CSV"))
    d.add_argument("--nu", type=float, default=0.0)
    d.add_argument("--eps", type=float, default=1.0)
    d.add_argument("--t", type=float, default=1.0)
    d.add_argument("--w-grid", default="0.1:5:50")
    d.add_argument("--log", action="store_true", help="log-spaced w grid")
    d.add_argument("--route", choices=("default", "yor", "hermite", "both"), default="default")
    d.add_argument("--theta", type=float, help="contour angle (general contour routes)")
    d.add_argument("--radius", type=float, help="contour radius (general contour routes)")
    d.add_argument("--tail-tol", type=float)
    d.add_argument("--rtol", type=float, default=1e-10)
    d.add_argument("--agree-tol", type=float, default=1e-6)
    d.set_defaults(func=cmd_density)

    c = common(sub.add_parser("compare", help="Yor vs Hermite agreement report"))
    c.add_argument("--nu", default="-1.5,-0.5,0,0.3,1,2.5")
    c.add_argument("--eps", default="1,-1,2,-0.5")
    c.add_argument("--t", default="0.25,1,2")
    c.add_argument("--w-count", type=int, default=12)
    c.add_argument("--threshold", type=float, default=1e-6)
    c.add_argument("--tail-tol", type=float)
    c.add_argument("--rtol", type=float, default=1e-10)
    c.set_defaults(func=cmd_compare)

    m = common(sub.add_parser("mc-validate", help="Monte Carlo KS report"))
    m.add_argument("--nu", type=float, default=0.0)
    m.add_argument("--eps", type=float, default=1.0)
    m.add_argument("--t", type=float, default=1.0)
    m.add_argument("--paths", type=int, default=100_000)
    m.add_argument("--steps", type=int, default=4096)
    m.add_argument("--seed", dest="seed_flag", type=int, default=None,
                   help=f"overrides ${mc.SEED_ENV} and the config seed")
    m.add_argument("--workers", type=int, default=1)
    m.set_defaults(func=cmd_mc_validate, seed=mc.MCConfig.seed)

    lc = common(sub.add_parser("laplace-check", help="Laplace identity report"))
    lc.add_argument("--nu", type=float, default=0.5)
    lc.add_argument("--eps", type=float, default=1.0)
    lc.add_argument("--w", type=float, default=1.0)
    lc.add_argument("--z", type=float, default=5.0)
    lc.add_argument("--mu", type=float, default=0.0, help="Bessel check: drift index")
    lc.add_argument("--eta", type=float, help="run the Bessel inverse-transform check at this eta")
    lc.add_argument("--threshold", type=float, default=1e-3)
    lc.set_defaults(func=cmd_laplace_check)

    s = common(sub.add_parser("special", help="evaluate one special function"))
    s.add_argument("function", choices=("gamma", "hermite", "kummer", "besseli"))
    for name in ("z", "mu", "a", "b", "rho", "eta"):
        s.add_argument(f"--{name}", help='real "x" or complex "re,im"')
    s.set_defaults(func=cmd_special)
    return ap


def _effective(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = ap.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sub = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known - {"seed"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**cfg)
        args = ap.parse_args(argv)
    return args


def config_of(args: argparse.Namespace) -> dict:
    """The serialisable part of a parsed namespace."""
    skip = {"func", "config", "dump_config", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _effective(ap, argv)
        if args.dump_config:
            _emit_json(config_of(args))
            return EXIT_OK
        return args.func(args)
    except SystemExit as e:  # argparse
        return int(e.code or 0)
    except (UsageError, ValueError) as e:
        print(f"asiadens: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AsiaDensError as e:  # numerical failure
        print(f"asiadens: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
