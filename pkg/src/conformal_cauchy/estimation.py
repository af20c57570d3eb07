"""Maximum likelihood for the Cauchy family on extended Euclidean space and,
by stereographic transport, on the sphere.

The log-likelihood is

    l(mu, sigma) = C + d { n log sigma - sum_j log(sigma^2 + ||x_j - mu||^2) },

and l~ denotes the braces.  Its stationary points are maxima, so a
profile-likelihood search followed by a Newton polish with the analytic
Hessian is reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import optimize

from .densities import log_euclid_const, log_sphere_const
from .errors import DomainError
from .geometry import INFINITY, ExtendedComplexParam
from .moebius import inv_stereographic_ext, inv_stereographic_array, stereographic_array


def _data(data, d: int | None = None) -> np.ndarray:
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if d in (None, 1) else X[None, :]
    if X.ndim != 2 or X.shape[0] == 0:
        raise DomainError("data must be a non-empty list of points")
    if d is not None and X.shape[1] != d:
        raise DomainError(f"data points must have dimension {d}, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise DomainError("data must be finite")
    return X


def _theta(theta) -> ExtendedComplexParam:
    if theta is INFINITY or not isinstance(theta, ExtendedComplexParam):
        raise DomainError("theta must be a finite ExtendedComplexParam")
    if theta.sigma <= 0:
        raise DomainError("sigma must be positive")
    return theta


# --------------------------------------------------------------------------
# likelihood and its derivatives


def loglik_euclid(theta: ExtendedComplexParam, data, d: int | None = None) -> float:
    theta = _theta(theta)
    X = _data(data, d if d is not None else theta.dim)
    n, d = X.shape
    r2 = np.sum((X - theta.mu) ** 2, axis=1)
    s2 = theta.sigma**2
    return float(n * log_euclid_const(d) + d * (n * math.log(theta.sigma) - np.sum(np.log(s2 + r2))))


def loglik_sphere(phi, data) -> float:
    """Sum of log C*_d(phi) densities over the unit vectors in ``data``."""
    Y = np.atleast_2d(np.asarray(data, dtype=float))
    phi = np.asarray(phi, dtype=float).reshape(-1)
    d = phi.size - 1
    r2 = np.sum((Y - phi) ** 2, axis=1)
    return float(len(Y) * log_sphere_const(d) + d * (len(Y) * math.log(abs(1.0 - phi @ phi)) - np.sum(np.log(r2))))


def likelihood_residual(theta: ExtendedComplexParam, data, d: int | None = None) -> np.ndarray:
    """sum_j inv_stereographic(a_j) with the configuration a_j = (x_j - mu)/sigma.

    The first d components are 2 sigma times the mu-score condition, the last
    one is n - 2 sum sigma^2/(sigma^2 + r_j^2); both vanish exactly at
    stationary points.
    """
    theta = _theta(theta)
    X = _data(data, d if d is not None else theta.dim)
    return inv_stereographic_array((X - theta.mu) / theta.sigma).sum(axis=0)


def gradient_tilde(theta: ExtendedComplexParam, X: np.ndarray) -> np.ndarray:
    """Gradient of l~ in the order (mu_1..mu_d, sigma)."""
    xb = X - theta.mu
    s2 = theta.sigma**2
    w = 1.0 / (s2 + np.sum(xb * xb, axis=1))
    g_mu = 2.0 * (w[:, None] * xb).sum(axis=0)
    g_sigma = len(X) / theta.sigma - 2.0 * theta.sigma * w.sum()
    return np.append(g_mu, g_sigma)


def hessian_tilde(theta: ExtendedComplexParam, X: np.ndarray) -> np.ndarray:
    """Analytic Hessian of l~ in the order (mu_1..mu_d, sigma)."""
    xb = X - theta.mu
    n, d = X.shape
    s, s2 = theta.sigma, theta.sigma**2
    r2 = np.sum(xb * xb, axis=1)
    q = s2 + r2
    H = np.empty((d + 1, d + 1))
    H[:d, :d] = (-2.0 * np.sum(1.0 / q) * np.eye(d)) + 4.0 * np.einsum("j,ji,jk->ik", 1.0 / q**2, xb, xb)
    H[:d, d] = H[d, :d] = -4.0 * s * (xb / q[:, None] ** 2).sum(axis=0)
    H[d, d] = -n / s2 - np.sum(2.0 * (r2 - s2) / q**2)
    return H


@dataclass(frozen=True)
class StationaryDiagnostics:
    grad_mu_residual: float
    grad_sigma_residual: float
    hessian_max_eigenvalue: float
    coincidence_flag: bool


def max_multiplicity(X: np.ndarray, tol: float = 0.0):
    """(largest number of coincident rows, one representative point)."""
    n = len(X)
    if tol == 0.0:
        _, idx, counts = np.unique(X, axis=0, return_index=True, return_counts=True)
        k = int(np.argmax(counts))
        return int(counts[k]), X[idx[k]]
    best, rep = 0, X[0]
    for i in range(n):
        c = int(np.sum(np.max(np.abs(X - X[i]), axis=1) <= tol))
        if c > best:
            best, rep = c, X[i]
    return best, rep


def stationary_diagnostics(theta: ExtendedComplexParam, data, d: int | None = None,
                           coincidence_tol: float = 0.0) -> StationaryDiagnostics:
    theta = _theta(theta)
    X = _data(data, d if d is not None else theta.dim)
    n = len(X)
    xb = X - theta.mu
    q = theta.sigma**2 + np.sum(xb * xb, axis=1)
    a1 = float(np.linalg.norm((xb / q[:, None]).sum(axis=0)))
    a2 = float(np.sum(theta.sigma**2 / q) - n / 2.0)
    H = X.shape[1] * hessian_tilde(theta, X)
    k, _ = max_multiplicity(X, coincidence_tol)
    return StationaryDiagnostics(a1, a2, float(np.linalg.eigvalsh(H)[-1]), bool(2 * k >= n))


# --------------------------------------------------------------------------
# profile likelihood


@dataclass(frozen=True)
class ProfileResult:
    sigma: float
    lam: float
    boundary: bool  # sup attained only as sigma -> 0 (half or more points at mu)


def profile_sigma(mu, data, d: int | None = None) -> ProfileResult:
    """sigma-hat(mu) solving sum sigma^2/(sigma^2 + r_j^2) = n/2, and lambda(mu)."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    X = _data(data, d if d is not None else mu.size)
    n, d = X.shape
    r2 = np.sum((X - mu) ** 2, axis=1)
    k = int(np.sum(r2 == 0.0))
    pos = r2[r2 > 0]
    if 2 * k >= n:
        if 2 * k > n:
            lam = math.inf
        else:
            lam = float(n * log_euclid_const(d) - d * np.sum(np.log(pos)))
        return ProfileResult(0.0, lam, True)
    # h(s) = sum s/(s + r^2) - n/2 increases from k - n/2 < 0 to n/2 > 0 in s = sigma^2
    h = lambda s: float(np.sum(s / (s + r2))) - n / 2.0
    lo = (n / 2.0 - k) / (2.0 * np.sum(1.0 / pos))
    hi = float(np.max(r2)) * (n + 1)
    s = optimize.brentq(h, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    sigma = math.sqrt(s)
    lam = float(n * log_euclid_const(d) + d * (n * math.log(sigma) - np.sum(np.log(s + r2))))
    return ProfileResult(sigma, lam, False)


# --------------------------------------------------------------------------
# result variants


@dataclass(frozen=True, eq=False)
class PointMass:
    location: np.ndarray

    @property
    def variant(self) -> str:
        return "point_mass"


@dataclass(frozen=True, eq=False)
class ContourCircle:
    """Circle of maximisers: center + radius (cos t plane[0] + sin t plane[1])."""

    center: np.ndarray
    radius: float
    plane: tuple

    @property
    def variant(self) -> str:
        return "contour_circle"

    def point(self, t: float) -> np.ndarray:
        return self.center + self.radius * (math.cos(t) * self.plane[0] + math.sin(t) * self.plane[1])


@dataclass(frozen=True, eq=False)
class ContourLine:
    """Line of maximisers point + t direction (sphere data with antipodal halves)."""

    point: np.ndarray
    direction: np.ndarray

    @property
    def variant(self) -> str:
        return "contour_line"


@dataclass(frozen=True, eq=False)
class Estimate:
    theta: ExtendedComplexParam
    loglik: float
    diagnostics: StationaryDiagnostics
    converged: bool = True
    n_evals: int = 0

    @property
    def variant(self) -> str:
        return "estimate"


MleResult = Union[PointMass, ContourCircle, Estimate]


def _euclid_circle(p0: np.ndarray, p1: np.ndarray) -> ContourCircle:
    """Circle in (mu, sigma)-space perpendicular to R^d with diameter (p0, p1)."""
    d = p0.size
    u = np.append((p1 - p0) / np.linalg.norm(p1 - p0), 0.0)
    e_sigma = np.zeros(d + 1)
    e_sigma[-1] = 1.0
    return ContourCircle(np.append((p0 + p1) / 2.0, 0.0), float(np.linalg.norm(p1 - p0) / 2.0), (u, e_sigma))


# --------------------------------------------------------------------------
# closed forms and numeric MLE


def _estimate(theta: ExtendedComplexParam, X: np.ndarray, converged=True, n_evals=0) -> Estimate:
    return Estimate(theta, loglik_euclid(theta, X), stationary_diagnostics(theta, X), converged, n_evals)


def mle_closed(data, d: int | None = None) -> MleResult:
    X = _data(data, d)
    n = len(X)
    if not 1 <= n <= 3:
        raise DomainError("closed-form MLE needs 1 <= n <= 3")
    k, rep = max_multiplicity(X)
    if 2 * k > n:
        return PointMass(rep.copy())
    if n == 2:
        return _euclid_circle(X[0], X[1])
    x1, x2, x3 = X
    a = float(np.sum((x1 - x2) ** 2))
    b = float(np.sum((x2 - x3) ** 2))
    c = float(np.sum((x3 - x1) ** 2))
    S = a + b + c
    mu = (a * x3 + b * x1 + c * x2) / S
    sigma = math.sqrt(3.0 * a * b * c) / S
    return _estimate(ExtendedComplexParam(mu, sigma), X)


@dataclass(frozen=True)
class MleConfig:
    tol: float = 1e-10
    max_evals: int = 10_000
    restarts: int = 1
    newton_steps: int = 100
    coincidence_tol: float = 0.0
    seed: int = 0


def _newton_polish(theta: ExtendedComplexParam, X: np.ndarray, cfg: MleConfig) -> tuple:
    """Damped Newton on (mu, sigma) with the analytic Hessian; returns (theta, converged)."""
    cur = theta
    cur_val = loglik_euclid(cur, X)
    for _ in range(cfg.newton_steps):
        g = gradient_tilde(cur, X)
        H = hessian_tilde(cur, X)
        if np.max(np.abs(g)) * max(1.0, cur.sigma) <= cfg.tol * 1e-2:
            return cur, True
        try:
            w = np.linalg.eigvalsh(H)
            step = -np.linalg.solve(H, g) if w[-1] < 0 else g / max(1.0, np.abs(w).max())
        except np.linalg.LinAlgError:
            step = g
        t = 1.0
        while t > 1e-12:
            cand = cur.lifted + t * step
            if cand[-1] > 0:
                nxt = ExtendedComplexParam.from_lifted(cand)
                val = loglik_euclid(nxt, X)
                if val >= cur_val - 1e-14 * abs(cur_val):
                    break
            t *= 0.5
        else:
            break
        moved = np.max(np.abs(nxt.lifted - cur.lifted))
        cur, cur_val = nxt, val
        if moved <= 1e-15 * max(1.0, np.max(np.abs(cur.lifted))):
            break
    d = stationary_diagnostics(cur, X)
    return cur, abs(d.grad_sigma_residual) < 1e-8 and d.grad_mu_residual * cur.sigma < 1e-8


def _profile_search(X: np.ndarray, cfg: MleConfig):
    n, d = X.shape
    mu0 = np.median(X, axis=0)
    mad = np.median(np.abs(X - mu0), axis=0)
    scale = float(np.max(mad)) if np.max(mad) > 0 else float(np.std(X)) or 1.0

    def neg_lam(mu):
        pr = profile_sigma(mu, X)
        return -pr.lam if np.isfinite(pr.lam) else -1e300

    rng = np.random.Generator(np.random.Philox(key=[cfg.seed & 0xFFFFFFFFFFFFFFFF, 0x5EED]))
    best, evals = None, 0
    starts = [mu0] + [mu0 + 0.5 * scale * rng.standard_normal(d) for _ in range(cfg.restarts - 1)]
    for start in starts:
        simplex = np.vstack([start] + [start + 0.5 * scale * np.eye(d)[i] for i in range(d)])
        res = optimize.minimize(
            neg_lam, start, method="Nelder-Mead",
            options=dict(initial_simplex=simplex, xatol=1e-10 * scale, fatol=1e-13,
                         maxfev=max(1, (cfg.max_evals - evals) // max(1, len(starts))), adaptive=d > 2),
        )
        evals += res.nfev
        if best is None or res.fun < best.fun:
            best = res
    return best.x, evals


def mle_numeric(data, d: int | None = None, config: MleConfig | None = None) -> MleResult:
    cfg = config or MleConfig()
    X = _data(data, d)
    n = len(X)
    if n <= 3 and cfg.coincidence_tol == 0.0:
        return mle_closed(X)
    k, rep = max_multiplicity(X, cfg.coincidence_tol)
    if 2 * k > n:
        return PointMass(rep.copy())
    if 2 * k == n:
        mask = np.max(np.abs(X - rep), axis=1) <= cfg.coincidence_tol
        rest = X[~mask]
        k2, rep2 = max_multiplicity(rest, cfg.coincidence_tol)
        if k2 == len(rest):
            return _euclid_circle(rep, rep2)

    mu, evals = _profile_search(X, cfg)
    pr = profile_sigma(mu, X)
    if pr.boundary:
        return PointMass(np.asarray(mu).copy())
    theta, ok = _newton_polish(ExtendedComplexParam(mu, pr.sigma), X, cfg)
    est = _estimate(theta, X, ok, evals)
    if 2 * k == n:
        # exactly half coincide at rep: the boundary sup lambda(rep) as sigma -> 0 may beat the interior
        edge = profile_sigma(rep, X)
        if edge.lam > est.loglik:
            return PointMass(rep.copy())
    return est


# --------------------------------------------------------------------------
# sphere


@dataclass(frozen=True, eq=False)
class SphereEstimate:
    phi: np.ndarray
    loglik: float
    euclid: Estimate
    rotation: np.ndarray  # data were rotated by this matrix before projection

    @property
    def variant(self) -> str:
        return "estimate"


def _rotation_to_south(v: np.ndarray) -> np.ndarray:
    """A rotation Q with Q v = -e_{d+1} (Householder pair, det +1)."""
    m = v.size
    target = np.zeros(m)
    target[-1] = -1.0
    w = v - target
    if np.linalg.norm(w) < 1e-14:
        return np.eye(m)
    H1 = np.eye(m) - 2.0 * np.outer(w, w) / (w @ w)  # reflection taking v to target
    # compose with a reflection fixing the target to restore det +1
    k = 0 if m > 1 else None
    u = np.zeros(m)
    u[k] = 1.0
    H2 = np.eye(m) - 2.0 * np.outer(u, u)
    return H2 @ H1


def _choose_pole(Y: np.ndarray) -> np.ndarray:
    """Direction sent to the south pole: the mean direction, unless data sit near its antipode."""
    ybar = Y.mean(axis=0)
    cands = []
    if np.linalg.norm(ybar) > 1e-8:
        cands.append(ybar / np.linalg.norm(ybar))
    m = Y.shape[1]
    for i in range(m):
        for s in (1.0, -1.0):
            e = np.zeros(m)
            e[i] = s
            cands.append(e)
    for v in cands:
        # north pole after rotation is -v; keep every point well away from it
        if np.min(np.linalg.norm(Y + v, axis=1)) > 1e-3:
            return v
    return max(cands, key=lambda v: np.min(np.linalg.norm(Y + v, axis=1)))


def _sphere_contour(y0: np.ndarray, y1: np.ndarray):
    """Circle (or line) through y0, y1 orthogonal to the unit sphere."""
    c = float(y0 @ y1)
    if abs(1.0 + c) <= 1e-12:
        return ContourLine(np.zeros_like(y0), y0.copy())
    center = (y0 + y1) / (1.0 + c)
    radius = math.sqrt(max(center @ center - 1.0, 0.0))
    u = y1 - y0
    u /= np.linalg.norm(u)
    w = center - (center @ u) * u
    w /= np.linalg.norm(w)
    return ContourCircle(center, radius, (u, w))


def mle_sphere(data, d: int | None = None, config: MleConfig | None = None):
    """MLE of phi for C*_d(phi) from unit vectors, via stereographic transport."""
    cfg = config or MleConfig()
    Y = np.atleast_2d(np.asarray(data, dtype=float))
    d = Y.shape[1] - 1 if d is None else int(d)
    if Y.shape[1] != d + 1 or len(Y) == 0:
        raise DomainError(f"data must be non-empty unit vectors of length d+1 = {d + 1}")
    if np.any(np.abs(np.linalg.norm(Y, axis=1) - 1.0) > 1e-10):
        raise DomainError("sphere data must be unit vectors")
    n = len(Y)
    k, rep = max_multiplicity(Y, cfg.coincidence_tol)
    if 2 * k > n:
        return PointMass(rep.copy())
    if 2 * k == n:
        mask = np.max(np.abs(Y - rep), axis=1) <= cfg.coincidence_tol
        rest = Y[~mask]
        k2, rep2 = max_multiplicity(rest, cfg.coincidence_tol)
        if k2 == len(rest):
            return _sphere_contour(rep, rep2)

    Q = _rotation_to_south(_choose_pole(Y))
    X = stereographic_array(Y @ Q.T)
    res = mle_numeric(X, d, cfg)
    if isinstance(res, PointMass):
        return PointMass(Q.T @ inv_stereographic_array(res.location[None, :])[0])
    if not isinstance(res, Estimate):
        raise DomainError(f"unexpected degenerate variant {res.variant} after transport")
    phi = Q.T @ inv_stereographic_ext(res.theta, d)
    return SphereEstimate(phi, loglik_sphere(phi, Y), res, Q)
