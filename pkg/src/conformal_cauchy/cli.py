"""Command-line front end.

Subcommands: sample, fit, transform, density-grid, lambert-grid, verify.
Data go to stdout (CSV with 17 significant digits, or JSON); the resolved
configuration and diagnostics go to stderr.

Exit codes: 0 success, 2 flag errors, 3 domain errors, 4 verification failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import densities as D
from . import estimation as E
from . import moments as M
from . import sampling as S
from .acceptance import CRITERIA, run_suite
from .errors import DomainError
from .geometry import INFINITY, ExtendedComplexParam
from .moebius import (
    MoebiusChain,
    MoebiusMap,
    SphereMoebius,
    inv_stereographic_array,
    inv_stereographic_ext,
    map_from_dict,
    moebius_apply_param,
    sphere_moebius_apply,
    sphere_moebius_apply_array,
    stereographic,
    stereographic_array,
)

SEED_ENV = "CONFORMAL_CAUCHY_SEED"
EXIT_FLAGS, EXIT_DOMAIN, EXIT_VERIFY = 2, 3, 4


class FlagError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise FlagError(SEED_ENV, f"environment seed must be an integer, got {raw!r}")


def _json_flag(flag: str, text: str):
    if text is None:
        raise FlagError(flag, "is required")
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise FlagError(flag, f"cannot read {text[1:]!r}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FlagError(flag, f"invalid JSON ({exc.msg})")


def _require(flag: str, params: dict, *keys):
    if not isinstance(params, dict):
        raise FlagError(flag, "must be a JSON object")
    missing = [k for k in keys if k not in params]
    if missing:
        raise FlagError(flag, f"missing key(s) {', '.join(missing)}")
    return [params[k] for k in keys]


def _read_csv(flag: str, path: str) -> np.ndarray:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise FlagError(flag, f"cannot read {path!r}: {exc.strerror}")
    try:
        X = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FlagError(flag, f"not a numeric CSV ({exc})")
    if X.size == 0:
        raise FlagError(flag, "no data rows")
    return X


def _write_csv(rows: np.ndarray, header: str | None = None) -> None:
    rows = np.atleast_2d(rows)
    buf = io.StringIO()
    np.savetxt(buf, rows, delimiter=",", fmt="%.17g", header=header or "", comments="")
    text = buf.getvalue()
    if not header:
        text = text.lstrip("\n")
    sys.stdout.write(text)


def _echo(config: dict) -> None:
    print(json.dumps({"config": config}, default=_jsonable), file=sys.stderr)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if o is INFINITY:
        return "infinity"
    raise TypeError(type(o).__name__)


def _theta_json(theta):
    if theta is INFINITY:
        return "infinity"
    return {"mu": theta.mu.tolist(), "sigma": theta.sigma}


def _parse_theta(flag: str, params: dict) -> ExtendedComplexParam:
    mu, sigma = _require(flag, params, "mu", "sigma")
    return ExtendedComplexParam(np.atleast_1d(np.asarray(mu, dtype=float)), float(sigma))


# --------------------------------------------------------------------------
# subcommands


FAMILIES = ("euclid-cauchy", "sphere-cauchy", "kent", "marginal", "uniform-sphere")


def cmd_sample(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    if args.n < 0:
        raise FlagError("--n", "must be >= 0")
    params = _json_flag("--params", args.params)
    rng = S.RngStream(seed, args.stream)
    _echo({"command": "sample", "family": args.family, "params": params, "n": args.n, "seed": seed, "stream": args.stream})
    if args.family == "euclid-cauchy":
        theta = _parse_theta("--params", params)
        out = S.sample_euclid_cauchy(theta, theta.dim, args.n, rng)
    elif args.family == "sphere-cauchy":
        (phi,) = _require("--params", params, "phi")
        phi = np.asarray(phi, dtype=float)
        out = S.sample_sphere_cauchy(phi, phi.size - 1, args.n, rng)
    elif args.family == "kent":
        mu, L = _require("--params", params, "mu", "L")
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        out = S.sample_kent(mu, L, mu.size, args.n, rng)
    elif args.family == "marginal":
        varphi, nu = _require("--params", params, "varphi", "nu")
        out = S.sample_marginal(float(varphi), nu, args.n, rng)[:, None]
    else:
        (d,) = _require("--params", params, "d")
        out = S.sample_uniform_sphere(int(d), args.n, rng)
    if args.n:
        _write_csv(out)
    return 0


def _result_json(res, X=None) -> dict:
    if isinstance(res, E.Estimate):
        d = res.diagnostics
        return {
            "variant": "estimate",
            "estimate": _theta_json(res.theta),
            "loglik": res.loglik,
            "diagnostics": {
                "grad_mu_residual": d.grad_mu_residual,
                "grad_sigma_residual": d.grad_sigma_residual,
                "hessian_max_eigenvalue": d.hessian_max_eigenvalue,
                "coincidence_flag": d.coincidence_flag,
                "converged": res.converged,
            },
        }
    if isinstance(res, E.SphereEstimate):
        inner = _result_json(res.euclid)
        return {"variant": "estimate", "estimate": {"phi": res.phi.tolist()}, "loglik": res.loglik,
                "diagnostics": inner["diagnostics"]}
    if isinstance(res, E.PointMass):
        return {"variant": "point_mass", "estimate": {"location": res.location.tolist()}, "loglik": None,
                "diagnostics": None}
    if isinstance(res, E.ContourCircle):
        return {"variant": "contour_circle",
                "estimate": {"center": res.center.tolist(), "radius": res.radius,
                             "plane": [p.tolist() for p in res.plane]},
                "loglik": None, "diagnostics": None}
    if isinstance(res, E.ContourLine):
        return {"variant": "contour_line", "estimate": {"point": res.point.tolist(), "direction": res.direction.tolist()},
                "loglik": None, "diagnostics": None}
    raise TypeError(type(res).__name__)  # pragma: no cover


def cmd_fit(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    if args.tol <= 0:
        raise FlagError("--tol", "must be positive")
    if args.max_evals < 1:
        raise FlagError("--max-evals", "must be >= 1")
    X = _read_csv("--input", args.input)
    cfg = E.MleConfig(tol=args.tol, max_evals=args.max_evals, seed=seed)
    _echo({"command": "fit", "family": args.family, "method": args.method, "n": len(X), "dim": X.shape[1],
           "tol": args.tol, "max_evals": args.max_evals, "seed": seed})
    if args.method == "mom":
        if args.family != "sphere":
            raise FlagError("--method", "mom is only available with --family sphere")
        res = M.mom_estimate(X)
        loglik = E.loglik_sphere(res.phi, X) if abs(np.linalg.norm(res.phi) - 1) > 1e-12 else None
        out = {"variant": "estimate", "estimate": {"phi": res.phi.tolist()}, "loglik": loglik,
               "diagnostics": {"mean_resultant": res.mean_resultant, "clamped": res.clamped}}
    elif args.family == "euclid":
        out = _result_json(E.mle_numeric(X, X.shape[1], cfg))
    else:
        out = _result_json(E.mle_sphere(X, X.shape[1] - 1, cfg))
    print(json.dumps(out, default=_jsonable))
    return 0


def cmd_transform(args) -> int:
    if (args.map is None) == (args.stereographic is None):
        raise FlagError("--map", "give exactly one of --map or --stereographic")
    if (args.points is None) == (args.param is None):
        raise FlagError("--points", "give exactly one of --points or --param")
    _echo({"command": "transform", "map": args.map, "stereographic": args.stereographic, "points": args.points,
           "param": args.param})
    if args.stereographic is not None:
        if args.points is not None:
            X = _read_csv("--points", args.points)
            _write_csv(inv_stereographic_array(X) if args.stereographic == "inverse" else stereographic_array(X))
            return 0
        p = _json_flag("--param", args.param)
        if args.stereographic == "inverse":
            phi = inv_stereographic_ext(_parse_theta("--param", p))
            print(json.dumps({"phi": phi}, default=_jsonable))
        else:
            (phi,) = _require("--param", p, "phi")
            print(json.dumps({"theta": _theta_json(stereographic(np.asarray(phi, dtype=float)))}, default=_jsonable))
        return 0

    try:
        m = map_from_dict(_json_flag("--map", args.map))
    except (KeyError, TypeError) as exc:
        raise FlagError("--map", f"not a map description ({exc})")
    if args.points is not None:
        X = _read_csv("--points", args.points)
        if isinstance(m, SphereMoebius):
            _write_csv(sphere_moebius_apply_array(m, X))
        else:
            chain = m if isinstance(m, MoebiusChain) else MoebiusChain((m,))
            _write_csv(chain.apply_array(X))
        return 0
    p = _json_flag("--param", args.param)
    if isinstance(m, SphereMoebius):
        (phi,) = _require("--param", p, "phi")
        out = sphere_moebius_apply(m, np.asarray(phi, dtype=float))
        print(json.dumps({"phi": out}, default=_jsonable))
    else:
        theta = _parse_theta("--param", p)
        out = moebius_apply_param(m, theta) if isinstance(m, MoebiusMap) else m.apply_param(theta)
        print(json.dumps({"theta": _theta_json(out)}, default=_jsonable))
    return 0


def _lambert_grid(num: int):
    v = np.linspace(-2.0, 2.0, num)
    V1, V2 = np.meshgrid(v, v, indexing="ij")
    return V1.ravel(), V2.ravel()


def cmd_density_grid(args) -> int:
    params = _json_flag("--params", args.params)
    if args.num < 2:
        raise FlagError("--num", "must be >= 2")
    _echo({"command": "density-grid", "family": args.family, "params": params, "num": args.num,
           "lo": args.lo, "hi": args.hi})
    num = args.num
    if args.family == "euclid-cauchy":
        theta = _parse_theta("--params", params)
        dist = D.EuclideanCauchy(theta)
        g = np.linspace(args.lo, args.hi, num)
        if theta.dim == 1:
            P = g[:, None]
        elif theta.dim == 2:
            G1, G2 = np.meshgrid(g, g, indexing="ij")
            P = np.column_stack([G1.ravel(), G2.ravel()])
        else:
            raise FlagError("--params", "density grids support d = 1 or 2")
        f = D.pdf_euclid(dist, P)
        _write_csv(np.column_stack([P, f]), ",".join([f"x{i + 1}" for i in range(P.shape[1])] + ["pdf"]))
        return 0
    if args.family == "marginal":
        varphi, nu = _require("--params", params, "varphi", "nu")
        y = np.linspace(-1.0, 1.0, num + 2)[1:-1]
        f = D.pdf_marginal(D.MarginalCauchyBeta(float(varphi), float(nu)), y)
        _write_csv(np.column_stack([y, f]), "y1,pdf")
        return 0
    if args.family == "sphere-cauchy":
        (phi,) = _require("--params", params, "phi")
        phi = np.asarray(phi, dtype=float)
        dist = D.SphericalCauchy(phi)
        if phi.size == 2:
            t = np.linspace(-np.pi, np.pi, num, endpoint=False)
            f = D.pdf_sphere(dist, np.column_stack([np.cos(t), np.sin(t)]))
            _write_csv(np.column_stack([t, f]), "angle,pdf")
            return 0
        if phi.size != 3:
            raise FlagError("--params", "sphere grids support d = 1 or 2")
        density = lambda Y: D.pdf_sphere(dist, Y)
    elif args.family == "kent":
        mu, L = _require("--params", params, "mu", "L")
        k = D.KentTypeCauchy(mu, L)
        if k.dim != 2:
            raise FlagError("--params", "Kent grids support d = 2")
        density = lambda Y: D.pdf_kent(k, Y)
    else:
        raise FlagError("--family", f"no density grid for {args.family}")
    # d = 2 sphere families on the Lambert disk (equal-area, so densities carry over)
    v1, v2 = _lambert_grid(num)
    f = np.full(v1.size, np.nan)
    inside = v1 * v1 + v2 * v2 < 4.0
    f[inside] = density(D.lambert_to_sphere(v1[inside], v2[inside]))
    _write_csv(np.column_stack([v1, v2, f]), "v1,v2,pdf")
    return 0


def cmd_lambert_grid(args) -> int:
    if args.num < 2:
        raise FlagError("--num", "must be >= 2")
    _echo({"command": "lambert-grid", "a11": args.a11, "a12": args.a12, "a22": args.a22, "num": args.num})
    if args.a11 * args.a22 - args.a12**2 <= 0:
        raise FlagError("--a11", "(a11, a12, a22) must form a positive definite matrix")
    v1, v2 = _lambert_grid(args.num)
    f = np.full(v1.size, np.nan)
    inside = v1 * v1 + v2 * v2 <= 4.0
    f[inside] = D.kent_d2_density_lambert(args.a11, args.a12, args.a22, v1[inside], v2[inside])
    _write_csv(np.column_stack([v1, v2, f]), "v1,v2,pdf")
    return 0


def _parse_suite(text: str):
    if text == "all":
        return sorted(CRITERIA)
    try:
        keys = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise FlagError("--suite", f"expected 'all' or a comma list of criterion numbers, got {text!r}")
    bad = [k for k in keys if k not in CRITERIA]
    if bad or not keys:
        raise FlagError("--suite", f"unknown criteria {bad}; valid: 1..{max(CRITERIA)}")
    return keys


def cmd_verify(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    keys = _parse_suite(args.suite)
    _echo({"command": "verify", "suite": keys, "seed": seed})
    report = run_suite(keys, seed)
    flat = []
    for crit in report:
        for c in crit["checks"]:
            flat.append({"check": f"{crit['criterion']:02d}.{crit['name']}.{c['check']}", "value": c["value"],
                         "tolerance": c["tolerance"], "pass": c["pass"]})
        if crit["error"]:
            flat.append({"check": f"{crit['criterion']:02d}.{crit['name']}", "value": None, "tolerance": None,
                         "pass": False, "error": crit["error"]})
        print(f"[{'PASS' if crit['pass'] else 'FAIL'}] criterion {crit['criterion']:2d} {crit['name']}", file=sys.stderr)
    ok = all(c["pass"] for c in report)
    print(json.dumps({"seed": seed, "pass": ok, "checks": flat}, indent=1, default=_jsonable))
    return 0 if ok else EXIT_VERIFY


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conformal-cauchy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw variates (CSV, one per row)")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--params", required=True, help="JSON object or @file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    s.add_argument("--stream", type=int, default=0)
    s.set_defaults(func=cmd_sample)

    f = sub.add_parser("fit", help="estimate parameters from a CSV of points")
    f.add_argument("--input", default="-", help="CSV path, '-' for stdin")
    f.add_argument("--family", choices=("euclid", "sphere"), default="euclid")
    f.add_argument("--method", choices=("mle", "mom"), default="mle")
    f.add_argument("--tol", type=float, default=1e-10)
    f.add_argument("--max-evals", type=int, default=10_000)
    f.add_argument("--seed", type=int, default=None)
    f.set_defaults(func=cmd_fit)

    t = sub.add_parser("transform", help="apply a Moebius map to points or to a parameter")
    t.add_argument("--map", default=None, help="JSON MoebiusMap / MoebiusChain / SphereMoebius, or @file")
    t.add_argument("--stereographic", choices=("forward", "inverse"), default=None)
    t.add_argument("--points", default=None, help="CSV path or '-'")
    t.add_argument("--param", default=None, help='JSON {"mu","sigma"} or {"phi"}')
    t.set_defaults(func=cmd_transform)

    g = sub.add_parser("density-grid", help="CSV density grid (header coord...,pdf)")
    g.add_argument("--family", required=True, choices=("euclid-cauchy", "sphere-cauchy", "kent", "marginal"))
    g.add_argument("--params", required=True)
    g.add_argument("--num", type=int, default=201)
    g.add_argument("--lo", type=float, default=-5.0)
    g.add_argument("--hi", type=float, default=5.0)
    g.set_defaults(func=cmd_density_grid)

    lg = sub.add_parser("lambert-grid", help="Lambert-disk density grid of the d=2 Kent-type family")
    lg.add_argument("--a11", type=float, required=True)
    lg.add_argument("--a12", type=float, required=True)
    lg.add_argument("--a22", type=float, required=True)
    lg.add_argument("--num", type=int, default=201)
    lg.set_defaults(func=cmd_lambert_grid)

    v = sub.add_parser("verify", help="run the acceptance suite, JSON report on stdout")
    v.add_argument("--suite", default="all", help="'all' or comma list of criterion numbers")
    v.add_argument("--seed", type=int, default=None)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the offending flag
        return EXIT_FLAGS if exc.code else 0
    try:
        return args.func(args)
    except FlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
