"""Gauss hypergeometric function, moments of the marginal and spherical
Cauchy families, and the method-of-moments estimator.

Notation: mu1(nu, p) = E(Y_1) and mu2(nu, p) = E(Y_1^2) for Y_1 with the
marginal density on (-1, 1), parameter p = varphi with |p| < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

from .errors import DomainError, NonConvergenceError

SERIES_MAX_TERMS = 1_000_000
SERIES_RTOL = 1e-12
SERIES_SWITCH = 0.9  # above this argument the integral representation is preferred
SMALL_PHI = 0.2  # below this |varphi| the power series in varphi is used
SERIES_MAX_PHI = 0.45  # inner Gegenbauer sums amplify rounding by ~(2|varphi|)^n beyond this
FORM_AGREEMENT = 1e-8
INTEGRAL_MIN_EXP = 0.05  # Euler weight exponents must stay this far above -1


# --------------------------------------------------------------------------
# 2F1


@dataclass(frozen=True)
class Hyp2F1Args:
    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if self.c <= 0 and float(self.c).is_integer():
            raise DomainError("c must not be a non-positive integer")
        if not self.z < 1:
            raise DomainError("2F1 is only evaluated for z < 1")


def _nonpos_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _series(a: float, b: float, c: float, z: float) -> float:
    """Plain Gauss series sum_n (a)_n (b)_n / ((c)_n n!) z^n, |z| < 1."""
    total, term = 1.0, 1.0
    comp = 0.0  # Kahan compensation
    n = 0
    settle = abs(a) + abs(b) + abs(c) + 2.0
    while n < SERIES_MAX_TERMS:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        n += 1
        if term == 0.0:
            return total
        yk = term - comp
        tk = total + yk
        comp = (tk - total) - yk
        total = tk
        # once the term ratio has settled near z the tail is bounded geometrically
        if n > settle and abs(term) <= 1e-3 * SERIES_RTOL * abs(total) * (1.0 - abs(z)):
            return total
    raise NonConvergenceError(f"2F1 series did not converge in {SERIES_MAX_TERMS} terms (a={a}, b={b}, c={c}, z={z})")


def _integral_pair(a: float, b: float, c: float):
    """Order (a, b) so that the Euler weight t^(b-1) (1-t)^(c-b-1) is best conditioned.

    Returns None when neither choice keeps both exponents at least
    INTEGRAL_MIN_EXP above -1 (the normalising gamma ratio then cancels badly).
    """
    best = None
    for p, q in ((a, b), (b, a)):
        margin = min(q, c - q)
        if margin >= INTEGRAL_MIN_EXP and (best is None or margin > best[0]):
            best = (margin, p, q)
    return None if best is None else best[1:]


def _integral(a: float, b: float, c: float, z: float) -> float:
    """Euler integral representation; needs c > b > 0 or c > a > 0."""
    pair = _integral_pair(a, b, c)
    if pair is None:
        raise DomainError(f"integral representation needs c > b > 0 with min(b, c-b) >= {INTEGRAL_MIN_EXP} "
                          "(or the same with a)")
    a, b = pair
    logc = gammaln(c) - gammaln(b) - gammaln(c - b)
    val, err = integrate.quad(
        lambda t: (1.0 - t * z) ** (-a), 0.0, 1.0, weight="alg", wvar=(b - 1.0, c - b - 1.0),
        epsabs=0.0, epsrel=1e-13, limit=500,
    )
    return math.exp(logc) * val


def _integral_ok(a, b, c) -> bool:
    return _integral_pair(a, b, c) is not None


def hyp2f1(a, b=None, c=None, z=None, *, method: str = "auto") -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    ``a`` may be a :class:`Hyp2F1Args`.  ``method`` is 'auto', 'series'
    (Pfaff-transformed series for z < 0) or 'integral'.
    """
    args = a if isinstance(a, Hyp2F1Args) else Hyp2F1Args(float(a), float(b), float(c), float(z))
    a, b, c, z = args.a, args.b, args.c, args.z
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    if method == "integral":
        return _integral(a, b, c, z)
    if method not in ("auto", "series"):
        raise ValueError(f"unknown method {method!r}")

    # reduce to a series argument w in [0, 1)
    prefactor, (pa, pb), w = 1.0, (a, b), z
    if z < 0:
        w = z / (z - 1.0)
        v1 = (a, c - b)  # (1-z)^{-a} F(a, c-b; c; w)
        v2 = (c - a, b)  # (1-z)^{-b} F(c-a, b; c; w)
        if _nonpos_int(a) or _nonpos_int(b):
            use1 = _nonpos_int(a)  # keep the terminating parameter
        elif _nonpos_int(c - b) or _nonpos_int(c - a):
            use1 = _nonpos_int(c - b)
        else:
            use1 = a <= b  # tail exponent a-b-1 versus b-a-1
        if use1:
            prefactor, (pa, pb) = (1.0 - z) ** (-a), v1
        else:
            prefactor, (pa, pb) = (1.0 - z) ** (-b), v2
    terminating = _nonpos_int(pa) or _nonpos_int(pb)
    if method == "auto" and w > SERIES_SWITCH and not terminating and _integral_ok(a, b, c):
        return _integral(a, b, c, z)
    return prefactor * _series(pa, pb, c, w)


def gauss_recursion(nu: int, z: float) -> float:
    """F_nu = 2F1(1/2, (nu-1)/2; (nu+1)/2; z) by the three-term recursion in nu.

    F_nu = (nu-1)/((nu-2)(nu-3)) [((nu-4) + (nu-3)/z) F_{nu-2} - ((nu-3)/z) F_{nu-4}],
    seeded with direct evaluations at nu = 1..4.
    """
    nu = int(nu)
    if nu < 1:
        raise DomainError("nu must be a positive integer")
    if z == 0.0:
        return 1.0
    vals = {k: hyp2f1(0.5, (k - 1) / 2.0, (k + 1) / 2.0, z) for k in range(1, 5)}
    for k in range(5, nu + 1):
        vals[k] = (k - 1.0) / ((k - 2.0) * (k - 3.0)) * (
            ((k - 4.0) + (k - 3.0) / z) * vals[k - 2] - ((k - 3.0) / z) * vals[k - 4]
        )
    return vals[nu]


# --------------------------------------------------------------------------
# marginal moments


def _check_phi(varphi: float) -> float:
    varphi = float(varphi)
    if not abs(varphi) < 1.0:
        raise DomainError("moments are evaluated for |varphi| < 1 (use 1/varphi otherwise)")
    return varphi


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not nu > 0:
        raise DomainError("nu must be positive")
    return nu


def _log_ratio(p):
    return math.log1p(p) - math.log1p(-p)


_MU1_CLOSED = {
    1: lambda p: p,
    2: lambda p: (1 + p * p) / (2 * p) * (1 - (1 - p * p) ** 2 / (2 * p * (1 + p * p)) * _log_ratio(p)),
    3: lambda p: p * (3 - p * p) / 2,
    4: lambda p: (1 + p * p) / (2 * p) * (
        1 - 3 * (1 - p * p) ** 2 / (8 * p * p) + 3 / (16 * p**3) * (1 - p * p) ** 4 / (1 + p * p) * _log_ratio(p)
    ),
}

_MU2_CLOSED = {
    1: lambda p: (1 + p * p) / 2,
    2: lambda p: (1 + p * p) / (4 * p * p) * (2 * (1 + p**4) / (1 + p * p) - (1 - p * p) ** 2 / p * _log_ratio(p)),
    3: lambda p: (1 + 6 * p * p - 3 * p**4) / 4,
    4: lambda p: (1 + p * p) / (16 * p**4) * (
        -2 * (3 - 8 * p**2 + 2 * p**4 - 8 * p**6 + 3 * p**8) / (1 + p * p) + 3 * (1 - p * p) ** 4 / p * _log_ratio(p)
    ),
}


def _mu1_form1(nu, p):
    z = -4.0 * p / (1.0 - p) ** 2
    return (1 + p * p) / (2 * p) * (1 - (1 + p) ** 2 / (1 + p * p) * hyp2f1(1.0, nu / 2.0, nu, z))


def _mu1_form2(nu, p):
    z = -4.0 * p * p / (1.0 - p * p) ** 2
    return (1 + p * p) / (2 * p) * (1 - (1 - p * p) / (1 + p * p) * hyp2f1(0.5, (nu - 1) / 2.0, (nu + 1) / 2.0, z))


def _mu2_form(nu, p):
    z = -4.0 * p / (1.0 - p) ** 2
    q = (1 + p) ** 2 / (1 + p * p)
    f1 = hyp2f1(1.0, nu / 2.0, nu, z)
    f2 = hyp2f1(2.0, nu / 2.0, nu, z)
    return (1 + p * p) ** 2 / (4 * p * p) * (1 - 2 * q * f1 + q * q * f2)


def _beta_even_moment(j: int, nu: float) -> float:
    """E(Y^{2j}) under the symmetric beta density (1 - y^2)^{(nu-2)/2} / B(nu/2, 1/2)."""
    return math.exp(gammaln(j + 0.5) - gammaln(0.5) - gammaln(j + (nu + 1) / 2.0) + gammaln((nu + 1) / 2.0))


def _power_series(nu: float, p: float, k: int, max_terms: int = 400) -> float:
    """E(Y_1^k) as a power series in p, from the Gegenbauer generating function
    (1 - 2py + p^2)^{-nu} = sum_n C_n^{(nu)}(y) p^n integrated against the symmetric beta law.
    """
    if p >= SERIES_MAX_PHI:
        raise DomainError(f"the power series in varphi is only used for |varphi| < {SERIES_MAX_PHI}")
    total = 0.0
    lg_nu = gammaln(nu)
    pn = 1.0
    for n in range(max_terms):
        if (n + k) % 2 == 0:
            coef = 0.0
            for m in range(n // 2 + 1):
                j = (n - 2 * m + k) // 2
                lg = gammaln(n - m + nu) - lg_nu - gammaln(m + 1) - gammaln(n - 2 * m + 1) + (n - 2 * m) * math.log(2.0)
                coef += (-1) ** m * math.exp(lg) * _beta_even_moment(j, nu)
            term = coef * pn
            total += term
            if n > 4 and abs(term) <= 1e-17 * abs(total):
                return (1.0 - p * p) ** nu * total
        pn *= p
    raise NonConvergenceError("power series in varphi did not converge")


def _moment(k: int, nu, varphi, method: str) -> float:
    nu = _check_nu(nu)
    varphi = _check_phi(varphi)
    sign = -1.0 if (varphi < 0 and k == 1) else 1.0
    p = abs(varphi)
    if p == 0.0:
        return 0.0 if k == 1 else 1.0 / (nu + 1.0)
    closed = _MU1_CLOSED if k == 1 else _MU2_CLOSED
    is_int = float(nu).is_integer() and int(nu) in closed
    if method == "auto":
        if p < SMALL_PHI:
            method = "series"
        elif is_int:
            method = "closed"
        else:
            method = "hyp2f1"
            if k == 1:
                v1, v2 = _mu1_form1(nu, p), _mu1_form2(nu, p)
                if abs(v1 - v2) > FORM_AGREEMENT:
                    raise NonConvergenceError(f"the two 2F1 forms of mu1 disagree: {v1!r} vs {v2!r}")
                return sign * v2
    if method == "series":
        return sign * _power_series(nu, p, k)
    if method == "closed":
        if not is_int:
            raise DomainError("closed forms exist only for nu in {1, 2, 3, 4}")
        return sign * closed[int(nu)](p)
    if method == "hyp2f1":
        return sign * (_mu1_form1(nu, p) if k == 1 else _mu2_form(nu, p))
    if method == "hyp2f1_alt":
        if k != 1:
            raise ValueError("the alternative 2F1 form is only available for the mean")
        return sign * _mu1_form2(nu, p)
    raise ValueError(f"unknown method {method!r}")


def marginal_mean(nu, varphi, method: str = "auto") -> float:
    """mu1(nu, varphi) = E(Y_1); method in {'auto', 'closed', 'hyp2f1', 'hyp2f1_alt', 'series'}."""
    return _moment(1, nu, varphi, method)


def marginal_second_moment(nu, varphi, method: str = "auto") -> float:
    """mu2(nu, varphi) = E(Y_1^2); method in {'auto', 'closed', 'hyp2f1', 'series'}."""
    return _moment(2, nu, varphi, method)


def marginal_variance(nu, varphi) -> float:
    return marginal_second_moment(nu, varphi) - marginal_mean(nu, varphi) ** 2


# --------------------------------------------------------------------------
# spherical Cauchy moments and method of moments


def sphere_mean_scatter(phi, d: int | None = None):
    """(E(Y), E(YY')) for Y ~ C*_d(phi); parameters outside the ball are reflected first."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    d = phi.size - 1 if d is None else int(d)
    if phi.size != d + 1:
        raise DomainError(f"phi must have length d+1 = {d + 1}")
    r = float(np.linalg.norm(phi))
    if abs(r - 1.0) <= 1e-12:
        raise DomainError("||phi|| = 1 is a point mass")
    if r > 1.0:
        phi, r = phi / r**2, 1.0 / r
    if r == 0.0:
        return np.zeros(d + 1), np.eye(d + 1) / (d + 1)
    u = phi / r
    m1 = marginal_mean(d, r)
    m2 = marginal_second_moment(d, r)
    scatter = ((1.0 - m2) * np.eye(d + 1) + ((d + 1) * m2 - 1.0) * np.outer(u, u)) / d
    return m1 * u, scatter


@dataclass(frozen=True)
class MomResult:
    phi: np.ndarray
    mean_resultant: float
    clamped: bool


R_MAX = 1.0 - 1e-9


def mom_estimate(sample, d: int | None = None, grid_size: int = 400) -> MomResult:
    """Method-of-moments estimate of phi from unit vectors (rows of ``sample``)."""
    Y = np.atleast_2d(np.asarray(sample, dtype=float))
    if Y.shape[0] == 0:
        raise DomainError("sample must be non-empty")
    d = Y.shape[1] - 1 if d is None else int(d)
    if Y.shape[1] != d + 1:
        raise DomainError(f"sample rows must have length d+1 = {d + 1}")
    ybar = Y.mean(axis=0)
    rbar = float(np.linalg.norm(ybar))
    if rbar == 0.0:
        return MomResult(np.zeros(d + 1), 0.0, False)

    grid = np.linspace(1e-3, R_MAX, grid_size)
    vals = np.array([marginal_mean(d, r) for r in grid])
    bad = np.nonzero(np.diff(vals) <= 0)[0]
    if bad.size:
        i = bad[0]
        raise NonConvergenceError(f"mu1({d}, r) not increasing near r={grid[i]:.6g}: {vals[i]!r} -> {vals[i + 1]!r}")
    if rbar >= vals[-1]:
        return MomResult(R_MAX * ybar / rbar, rbar, True)
    r = optimize.bisect(lambda t: marginal_mean(d, t) - rbar, 0.0, R_MAX, xtol=1e-14, rtol=1e-14)
    return MomResult(r * ybar / rbar, rbar, False)
