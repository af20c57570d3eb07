"""Independent numerical machinery for verification: quadrature,
finite-difference Jacobians, derivative-free maximisation and KS statistics.

Nothing here knows about Cauchy distributions; the checks in
:mod:`conformal_cauchy.acceptance` combine these tools with the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import DomainError, NonConvergenceError, SingularInputError
from .geometry import INFINITY, tangent_frame


@dataclass(frozen=True)
class OracleConfig:
    fd_step: float = 1e-5
    quad_order: int = 32
    quad_tol: float = 1e-10
    quad_max_order: int = 4096
    argmax_budget: int = 20_000
    argmax_restarts: int = 3
    ks_alpha: float = 0.01
    seed: int = 7


DEFAULT = OracleConfig()

DOMAINS = ("interval", "rectangle", "circle", "sphere", "disk", "real_line", "plane")


@dataclass(frozen=True)
class QuadratureSpec:
    """``domain`` and its geometry.

    interval: bounds=(a, b); rectangle: bounds=((a1, b1), (a2, b2));
    circle: S^1; sphere: S^2 with colatitude measured from ``pole``
    (default e_3); disk: radius ``radius`` centred at 0 (the Lambert disk
    has radius 2); real_line / plane: R^1 / R^2 compactified onto S^1 / S^2
    by the inverse stereographic projection.
    """

    domain: str
    order: int = 32
    tol: float = 1e-10
    bounds: Optional[tuple] = None
    pole: Optional[tuple] = None
    radius: float = 2.0
    max_order: int = 4096

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainError(f"unknown quadrature domain {self.domain!r}")
        if self.order < 8:
            raise DomainError("quadrature order must be >= 8")
        if not self.tol > 0:
            raise DomainError("tol must be positive")


def _gl(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _periodic(n: int):
    # half-step offset keeps nodes off the compactification pole
    t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    return t, np.full(n, 2.0 * np.pi / n)


def _pairwise_sum(v: np.ndarray) -> float:
    # numpy's sum is pairwise for contiguous float arrays; keep the order fixed
    return float(np.sum(np.ascontiguousarray(v, dtype=float)))


def _frame_from_pole(pole) -> np.ndarray:
    """Rotation whose third column is the pole direction."""
    p = np.asarray(pole, dtype=float)
    p = p / np.linalg.norm(p)
    q, _ = np.linalg.qr(np.column_stack([p, np.eye(3)]))
    if q[:, 0] @ p < 0:
        q = -q
    Q = np.column_stack([q[:, 1], q[:, 2], q[:, 0]])
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def _rule(spec: QuadratureSpec, n: int):
    """Nodes (rows) and weights for a rule with ``n`` points per axis."""
    dom = spec.domain
    if dom == "interval":
        a, b = spec.bounds
        x, w = _gl(n, a, b)
        return x[:, None], w
    if dom == "rectangle":
        (a1, b1), (a2, b2) = spec.bounds
        x1, w1 = _gl(n, a1, b1)
        x2, w2 = _gl(n, a2, b2)
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        return np.column_stack([X1.ravel(), X2.ravel()]), np.outer(w1, w2).ravel()
    if dom in ("circle", "real_line"):
        t, w = _periodic(2 * n)
        return np.column_stack([np.cos(t), np.sin(t)]), w
    if dom in ("sphere", "plane"):
        th, wth = _gl(n, 0.0, np.pi)
        ph, wph = _periodic(2 * n)
        TH, PH = np.meshgrid(th, ph, indexing="ij")
        Y = np.column_stack([(np.sin(TH) * np.cos(PH)).ravel(), (np.sin(TH) * np.sin(PH)).ravel(), np.cos(TH).ravel()])
        W = np.outer(wth * np.sin(th), wph).ravel()
        if spec.pole is not None:
            Y = Y @ _frame_from_pole(spec.pole).T
        return Y, W
    if dom == "disk":
        r, wr = _gl(n, 0.0, spec.radius)
        ph, wph = _periodic(2 * n)
        R, PH = np.meshgrid(r, ph, indexing="ij")
        X = np.column_stack([(R * np.cos(PH)).ravel(), (R * np.sin(PH)).ravel()])
        return X, np.outer(wr * r, wph).ravel()
    raise DomainError(dom)  # pragma: no cover


def _compactified(f: Callable, dom: str) -> Callable:
    """Pull an integrand on R^d back to S^d: dx = ((1 + |x|^2)/2)^d dS."""

    def g(Y):
        top, last = Y[:, :-1], Y[:, -1]
        d = top.shape[1]
        inside = last < 1.0 - 1e-15
        out = np.zeros(len(Y))
        if np.any(inside):
            X = top[inside] / (1.0 - last[inside])[:, None]
            jac = ((1.0 + np.sum(X * X, axis=1)) / 2.0) ** d
            out[inside] = np.asarray(f(X), dtype=float) * jac
        return out

    return g


def integrate(f: Callable, spec: QuadratureSpec) -> float:
    """Integrate a vectorised scalar field (rows of points -> values).

    The rule is doubled until two successive estimates differ by less than
    ``spec.tol``.  Sphere and circle points are unit vectors; interval and
    real-line points are 1-column arrays.
    """
    g = _compactified(f, spec.domain) if spec.domain in ("real_line", "plane") else f
    n = spec.order
    prev = None
    while n <= spec.max_order:
        X, W = _rule(spec, n)
        vals = np.asarray(g(X), dtype=float).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise SingularInputError("integrand is not finite at a quadrature node")
        cur = _pairwise_sum(vals * W)
        if prev is not None and abs(cur - prev) < spec.tol:
            return cur
        prev = cur
        n *= 2
    raise NonConvergenceError(f"quadrature did not reach tol {spec.tol} by order {spec.max_order}")


# --------------------------------------------------------------------------
# finite-difference Jacobians


def _fd_matrix(F: Callable, x: np.ndarray, dirs: np.ndarray, h: float, retract=None) -> np.ndarray:
    cols = []
    for v in dirs.T:
        xp, xm = x + h * v, x - h * v
        if retract is not None:
            xp, xm = retract(xp), retract(xm)
        fp, fm = F(xp), F(xm)
        if fp is INFINITY or fm is INFINITY:
            raise SingularInputError("map hits infinity inside the finite-difference stencil")
        fp, fm = np.asarray(fp, dtype=float), np.asarray(fm, dtype=float)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise SingularInputError("map is not finite inside the finite-difference stencil")
        cols.append((fp - fm) / (2.0 * h))
    return np.column_stack(cols)


def _volume(J: np.ndarray) -> float:
    if J.shape[0] == J.shape[1]:
        return abs(float(np.linalg.det(J)))
    return math.sqrt(max(float(np.linalg.det(J.T @ J)), 0.0))


def jacobian_det_fd(F: Callable, x, h: float | None = None, sphere_in: bool = False, sphere_out: bool = False,
                    singularities=()) -> float:
    """Absolute Jacobian determinant of ``F`` at ``x`` by central differences
    with one Richardson step.

    ``sphere_in`` differentiates along an orthonormal tangent frame of the
    sphere at x (points are renormalised onto the sphere); ``sphere_out``
    measures the image in the tangent frame at F(x).  Non-square cases use
    the Gram volume sqrt(det J'J).  Points within 10h of a listed
    singularity are refused.
    """
    h = DEFAULT.fd_step if h is None else h
    x = np.asarray(x, dtype=float).reshape(-1)
    for s in singularities:
        if s is INFINITY:
            continue
        if np.linalg.norm(x - np.asarray(s, dtype=float)) <= 10.0 * h:
            raise SingularInputError("point is within 10h of a singularity of the map")
    if sphere_in:
        dirs = tangent_frame(x)
        retract = lambda p: p / np.linalg.norm(p)
    else:
        dirs = np.eye(x.size)
        retract = None
    J1 = _fd_matrix(F, x, dirs, h, retract)
    J2 = _fd_matrix(F, x, dirs, h / 2.0, retract)
    J = (4.0 * J2 - J1) / 3.0
    if sphere_out:
        fx = np.asarray(F(x), dtype=float)
        J = tangent_frame(fx).T @ J
    return _volume(J)


# --------------------------------------------------------------------------
# derivative-free maximisation


@dataclass(frozen=True)
class ArgmaxResult:
    x: np.ndarray
    value: float
    converged: bool
    spread: float  # max distance between restart optima
    n_evals: int


def numeric_argmax(f: Callable, x0, budget: int | None = None, seed: int | None = None,
                   restarts: int | None = None, scale: float = 1.0, xtol: float = 1e-10) -> ArgmaxResult:
    """Nelder-Mead from x0 plus ``restarts`` seeded random restarts."""
    budget = DEFAULT.argmax_budget if budget is None else budget
    restarts = DEFAULT.argmax_restarts if restarts is None else restarts
    seed = DEFAULT.seed if seed is None else seed
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    rng = np.random.Generator(np.random.Philox(key=[int(seed) & 0xFFFFFFFFFFFFFFFF, 0x0A1]))
    starts = [x0] + [x0 + scale * rng.uniform(-0.5, 0.5, x0.size) for _ in range(restarts)]
    per = max(1, budget // len(starts))
    neg = lambda x: -float(f(x))
    results, evals, converged = [], 0, True
    for s in starts:
        res = optimize.minimize(neg, s, method="Nelder-Mead",
                                options=dict(xatol=xtol, fatol=1e-12, maxfev=per, maxiter=per, adaptive=x0.size > 2))
        # one restart from the optimum shakes off simplex collapse
        res = optimize.minimize(neg, res.x, method="Nelder-Mead",
                                options=dict(xatol=xtol, fatol=1e-12, maxfev=per, maxiter=per, adaptive=x0.size > 2))
        evals += res.nfev
        converged &= bool(res.success)
        results.append(res)
    best = min(results, key=lambda r: r.fun)
    spread = max(float(np.linalg.norm(r.x - best.x)) for r in results)
    return ArgmaxResult(best.x, -best.fun, converged, spread, evals)


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov


def ks_critical(n: int, alpha: float = 0.01, m: int | None = None) -> float:
    """Asymptotic critical value; only alpha = 0.01 (c = 1.628) is tabulated exactly."""
    c = 1.628 if alpha == 0.01 else math.sqrt(-0.5 * math.log(alpha / 2.0))
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def ks_statistic(sample, cdf: Callable) -> float:
    x = np.sort(np.asarray(sample, dtype=float).reshape(-1))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_2samp(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float).reshape(-1))
    b = np.sort(np.asarray(b, dtype=float).reshape(-1))
    grid = np.concatenate([a, b])
    Fa = np.searchsorted(a, grid, side="right") / a.size
    Fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(Fa - Fb)))


def numeric_cdf(pdf: Callable, lo: float, hi: float, cells: int = 4000, order: int = 16) -> Callable:
    """CDF of a 1-D density on [lo, hi] by cellwise Gauss-Legendre, interpolated
    linearly between cell edges (normalised to end at 1)."""
    edges = np.linspace(lo, hi, cells + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(pdf(nodes.ravel()), dtype=float).reshape(nodes.shape)
    mass = (vals * w[None, :]).sum(axis=1) * half
    cum = np.concatenate([[0.0], np.cumsum(mass)])
    total = cum[-1]
    cum /= total

    def F(t):
        return np.interp(np.asarray(t, dtype=float), edges, cum, left=0.0, right=1.0)

    F.total_mass = total
    return F


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly uniform points on S^2 (golden-angle spiral); spacing ~ sqrt(4 pi / n)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
