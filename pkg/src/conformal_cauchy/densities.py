"""Densities of the four Cauchy-type families and their parameter pushforwards.

All densities are computed in log space first; the linear versions
exponentiate.  Point-mass parameters have no density and raise
:class:`DensityUndefinedError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, gammaln

from .errors import DensityUndefinedError, DomainError, InvalidParameterError, SingularInputError
from .geometry import INFINITY, ExtendedComplexParam, Theta
from .moebius import (
    MoebiusChain,
    MoebiusMap,
    SphereMoebius,
    inv_stereographic_ext,
    moebius_apply_param,
    sphere_moebius_apply,
    stereographic,
)

UNIT_TOL = 1e-10
LOG_PI = np.log(np.pi)


def log_euclid_const(d: int) -> float:
    """log of 2^{d-1} Gamma((d+1)/2) / pi^{(d+1)/2}."""
    return (d - 1) * np.log(2.0) + gammaln((d + 1) / 2.0) - (d + 1) / 2.0 * LOG_PI


def log_sphere_const(d: int) -> float:
    """log of Gamma((d+1)/2) / (2 pi^{(d+1)/2}), i.e. minus the log surface area of S^d."""
    return gammaln((d + 1) / 2.0) - np.log(2.0) - (d + 1) / 2.0 * LOG_PI


def _rows(x, dim: int):
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != dim:
        raise DomainError(f"expected points of dimension {dim}, got {arr.shape[-1]}")
    return arr, single


def _out(v, single):
    return float(v[0]) if single else v


# --------------------------------------------------------------------------
# Cauchy on the extended Euclidean space


@dataclass(frozen=True)
class EuclideanCauchy:
    theta: Theta

    @property
    def is_point_mass(self) -> bool:
        return self.theta is INFINITY or self.theta.sigma == 0.0

    @classmethod
    def from_mu_sigma(cls, mu, sigma) -> "EuclideanCauchy":
        return cls(ExtendedComplexParam(mu, sigma))


def log_pdf_euclid(dist: EuclideanCauchy, x):
    if dist.is_point_mass:
        raise DensityUndefinedError("C_d(theta) with sigma = 0 or theta = infinity is a point mass")
    theta = dist.theta
    d = theta.dim
    X, single = _rows(x, d)
    diff = X - theta.mu
    r2 = np.einsum("ij,ij->i", diff, diff) + theta.sigma**2
    out = log_euclid_const(d) + d * (np.log(theta.sigma) - np.log(r2))
    return _out(out, single)


def pdf_euclid(dist: EuclideanCauchy, x):
    return np.exp(log_pdf_euclid(dist, x))


# --------------------------------------------------------------------------
# Cauchy on the sphere


@dataclass(frozen=True, eq=False)
class SphericalCauchy:
    """C*_d(phi): phi in R^{d+1} off the sphere, or INFINITY (uniform)."""

    phi: object

    def __post_init__(self):
        if self.phi is not INFINITY:
            phi = np.array(self.phi, dtype=float).reshape(-1)
            if phi.size < 2 or not np.all(np.isfinite(phi)):
                raise InvalidParameterError("phi must be a finite vector of length d+1 >= 2")
            phi.setflags(write=False)
            object.__setattr__(self, "phi", phi)

    @property
    def is_point_mass(self) -> bool:
        return self.phi is not INFINITY and abs(np.linalg.norm(self.phi) - 1.0) <= 1e-12

    @property
    def is_uniform(self) -> bool:
        return self.phi is INFINITY or not np.any(self.phi)


def _check_unit(Y: np.ndarray) -> None:
    norms = np.linalg.norm(Y, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise DomainError("sphere densities need unit vectors (|  ||y|| - 1 | <= 1e-10)")


def log_pdf_sphere(dist: SphericalCauchy, y):
    if dist.is_point_mass:
        raise DensityUndefinedError("C*_d(phi) with ||phi|| = 1 is a point mass")
    if dist.phi is INFINITY:
        Y, single = np.atleast_2d(np.asarray(y, dtype=float)), np.ndim(y) == 1
        _check_unit(Y)
        return _out(np.full(len(Y), log_sphere_const(Y.shape[1] - 1)), single)
    phi = dist.phi
    Y, single = _rows(y, phi.size)
    _check_unit(Y)
    d = phi.size - 1
    diff = Y - phi
    r2 = np.einsum("ij,ij->i", diff, diff)
    out = log_sphere_const(d) + d * (np.log(abs(1.0 - phi @ phi)) - np.log(r2))
    return _out(out, single)


def pdf_sphere(dist: SphericalCauchy, y):
    return np.exp(log_pdf_sphere(dist, y))


# --------------------------------------------------------------------------
# marginal family on (-1, 1)


@dataclass(frozen=True)
class MarginalCauchyBeta:
    """Law of Y_1 when Y ~ C*_nu(varphi e_1); nu may be any positive real."""

    varphi: float
    nu: float

    def __post_init__(self):
        if abs(abs(self.varphi) - 1.0) <= 1e-12:
            raise InvalidParameterError("|varphi| = 1 is a point mass")
        if not self.nu >= 0:
            raise InvalidParameterError("nu must be >= 0")


def log_pdf_marginal(dist: MarginalCauchyBeta, y1):
    y = np.asarray(y1, dtype=float)
    if np.any(np.abs(y) >= 1.0):
        raise DomainError("the marginal density lives on the open interval (-1, 1)")
    if dist.nu <= 0:
        raise DensityUndefinedError("nu = 0 has no density on (-1, 1)")
    p, nu = float(dist.varphi), float(dist.nu)
    out = (
        -betaln(nu / 2.0, 0.5)
        + nu * (np.log(abs(1.0 - p * p)) - np.log1p(p * p - 2.0 * p * y))
        + (nu - 2.0) / 2.0 * np.log1p(-y * y)
    )
    return float(out) if out.ndim == 0 else out


def pdf_marginal(dist: MarginalCauchyBeta, y1):
    return np.exp(log_pdf_marginal(dist, y1))


def real_moebius(y, b: float):
    """(y + b)/(b y + 1): the real Moebius map of (-1, 1) onto itself."""
    y = np.asarray(y, dtype=float)
    return (y + b) / (b * y + 1.0)


def real_moebius_derivative(y, b: float):
    y = np.asarray(y, dtype=float)
    return (1.0 - b * b) / (b * y + 1.0) ** 2


def marginal_pushforward_param(varphi: float, b: float) -> float:
    """Parameter of g(Y_1) when Y_1 has parameter varphi and g is :func:`real_moebius` with ``b``."""
    if not -1.0 < b < 1.0:
        raise DomainError("b must lie in (-1, 1)")
    if abs(abs(varphi) - 1.0) <= 1e-12:
        raise DomainError("|varphi| = 1 is a point mass")
    if b == 0.0:
        return float(varphi)
    vp = b / (1.0 + np.sqrt(1.0 - b * b))  # = (1 - sqrt(1 - b^2))/b without cancellation
    return float((varphi + vp) / (varphi * vp + 1.0))


# --------------------------------------------------------------------------
# Kent-type extension Y = h(U), h(u) = g^{-1}{mu + L g(u)}


@dataclass(frozen=True, eq=False)
class KentTypeCauchy:
    """Law of inv_stereo(mu + L stereo(U)) for U uniform on S^d.

    Derived quantities: ``A_mat`` = [[M, M mu], [mu' M, 1 + mu' M mu]] with
    M = (L L')^{-1}, ``Qbar`` = tr(A)/(d+1), ``T_mat`` = A - Qbar I, and the
    ascending eigen-decomposition ``eigvals``/``eigvecs`` of A.
    """

    mu: np.ndarray
    L: np.ndarray
    A_mat: np.ndarray = field(init=False, repr=False)
    Qbar: float = field(init=False, repr=False)
    T_mat: np.ndarray = field(init=False, repr=False)
    eigvals: np.ndarray = field(init=False, repr=False)
    eigvecs: np.ndarray = field(init=False, repr=False)
    log_const: float = field(init=False, repr=False)

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        L = np.array(self.L, dtype=float)
        if L.ndim == 0:
            L = L.reshape(1, 1)
        d = mu.size
        if L.shape != (d, d):
            raise InvalidParameterError(f"L must be {d}x{d}")
        det = np.linalg.det(L)
        if det == 0.0 or not np.isfinite(det):
            raise InvalidParameterError("L must be invertible")
        M = np.linalg.inv(L @ L.T)
        M = 0.5 * (M + M.T)
        Mmu = M @ mu
        A = np.empty((d + 1, d + 1))
        A[:d, :d] = M
        A[:d, d] = Mmu
        A[d, :d] = Mmu
        A[d, d] = 1.0 + mu @ Mmu
        Qbar = np.trace(A) / (d + 1)
        w, V = np.linalg.eigh(A)
        for name, val in (("mu", mu), ("L", L), ("A_mat", A), ("Qbar", Qbar), ("T_mat", A - Qbar * np.eye(d + 1)),
                          ("eigvals", w), ("eigvecs", V), ("log_const", log_sphere_const(d) - np.log(abs(det)))):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def dim(self) -> int:
        return self.mu.size


def _north_chart(Y: np.ndarray) -> np.ndarray:
    """y~ = (y - e_{d+1}) / ||y - e_{d+1}||, row-wise."""
    diff = Y.copy()
    diff[:, -1] -= 1.0
    n = np.linalg.norm(diff, axis=1)
    if np.any(n <= 1e-12):
        raise SingularInputError("the Kent-type density is undefined at the north pole e_{d+1}")
    return diff / n[:, None]


def log_pdf_kent(dist: KentTypeCauchy, y, form: str = "quadratic"):
    """log density; ``form`` is 'quadratic' (y~'A y~) or 'centered' (Qbar + y~'T y~)."""
    Y, single = _rows(y, dist.dim + 1)
    _check_unit(Y)
    Yt = _north_chart(Y)
    if form == "quadratic":
        q = np.einsum("ij,jk,ik->i", Yt, dist.A_mat, Yt)
    elif form == "centered":
        q = dist.Qbar + np.einsum("ij,jk,ik->i", Yt, dist.T_mat, Yt)
    else:
        raise ValueError(f"unknown form {form!r}")
    return _out(dist.log_const - dist.dim * np.log(q), single)


def pdf_kent(dist: KentTypeCauchy, y, form: str = "quadratic"):
    return np.exp(log_pdf_kent(dist, y, form))


@dataclass(frozen=True)
class KentExtremes:
    mode: np.ndarray
    antimode: np.ndarray
    fmax: float
    fmin: float
    degenerate: bool


def _from_north_chart(yt: np.ndarray) -> np.ndarray:
    """Inverse of y -> y~: the second intersection of the ray e + s y~ with the sphere."""
    if yt[-1] > 0:
        yt = -yt
    e = np.zeros_like(yt)
    e[-1] = 1.0
    return e - 2.0 * yt[-1] * yt


def kent_mode_antimode(dist: KentTypeCauchy, tie_tol: float = 1e-10) -> KentExtremes:
    """Mode/antimode from the extreme eigenvectors of A.

    An eigenvector lying in the equatorial plane maps to the north pole, which
    is then a limiting mode (the density is direction-dependent there).
    """
    w, V = dist.eigvals, dist.eigvecs
    scale = max(abs(w[-1]), 1.0)
    degenerate = bool(w[1] - w[0] <= tie_tol * scale or w[-1] - w[-2] <= tie_tol * scale)
    c = np.exp(dist.log_const)
    d = dist.dim
    return KentExtremes(
        mode=_from_north_chart(V[:, 0]),
        antimode=_from_north_chart(V[:, -1]),
        fmax=float(c * w[0] ** (-d)),
        fmin=float(c * w[-1] ** (-d)),
        degenerate=degenerate,
    )


# d = 2 coordinates.  Colatitude xi1 is measured from the south pole -e_3,
# the regular side of the chart y~ (the density is smooth there).


def lambert_params_from_L(L) -> tuple:
    """(a11, a12, a22): entries of (L L')^{-1} for a 2x2 L."""
    L = np.asarray(L, dtype=float)
    M = np.linalg.inv(L @ L.T)
    return float(M[0, 0]), float(0.5 * (M[0, 1] + M[1, 0])), float(M[1, 1])


def _lambert_const(a11, a12, a22) -> float:
    det = a11 * a22 - a12 * a12
    if det <= 0:
        raise InvalidParameterError("(a11, a12, a22) must form a positive definite matrix")
    return np.sqrt(det) / (4.0 * np.pi)


def kent_d2_density_polar(a11: float, a12: float, a22: float, xi1, xi2, form: str = "quadratic"):
    """Density of (xi1, xi2) w.r.t. sin(xi1) dxi1 dxi2, 0 <= xi1 <= pi, -pi <= xi2 < pi.

    ``form='harmonic'`` uses the alpha/beta rewrite with cos 2(xi2 - beta).
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    if np.any((xi1 < 0) | (xi1 > np.pi)) or np.any((xi2 < -np.pi) | (xi2 >= np.pi)):
        raise DomainError("polar coordinates out of range")
    c2 = _lambert_const(a11, a12, a22)
    s2 = np.sin(xi1 / 2.0) ** 2
    if form == "quadratic":
        c, s = np.cos(xi2), np.sin(xi2)
        bracket = (a11 - 1.0) * c * c + 2.0 * a12 * c * s + (a22 - 1.0) * s * s
        return c2 * (1.0 + s2 * bracket) ** -2
    if form == "harmonic":
        alpha = np.hypot(a11 - a22, 2.0 * a12)
        beta = np.arctan2(2.0 * a12, a11 - a22) / 2.0
        return c2 * (1.0 + 0.5 * s2 * (a11 + a22 - 2.0 + alpha * np.cos(2.0 * (xi2 - beta)))) ** -2
    raise ValueError(f"unknown form {form!r}")


def kent_d2_density_lambert(a11: float, a12: float, a22: float, v1, v2):
    """Density in Lambert equal-area coordinates (v1, v2), v1^2 + v2^2 <= 4."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.any(v1 * v1 + v2 * v2 > 4.0 + 1e-12):
        raise DomainError("Lambert coordinates must satisfy v1^2 + v2^2 <= 4")
    c2 = _lambert_const(a11, a12, a22)
    quad = (a11 - 1.0) * v1 * v1 + 2.0 * a12 * v1 * v2 + (a22 - 1.0) * v2 * v2
    return c2 * (1.0 + 0.25 * quad) ** -2


def kent_d2_densities(params, coords, chart: str = "lambert"):
    """d = 2 Kent-type density from ``params = (a11, a12, a22)``.

    ``chart='polar'`` takes ``coords = (xi1, xi2)``, ``chart='lambert'`` takes
    ``coords = (v1, v2)``.
    """
    a11, a12, a22 = (float(a) for a in params)
    u, v = coords
    if chart == "polar":
        return kent_d2_density_polar(a11, a12, a22, u, v)
    if chart == "lambert":
        return kent_d2_density_lambert(a11, a12, a22, u, v)
    raise ValueError(f"unknown chart {chart!r}")


def polar_to_sphere(xi1, xi2) -> np.ndarray:
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    return np.stack([np.sin(xi1) * np.cos(xi2), np.sin(xi1) * np.sin(xi2), -np.cos(xi1)], axis=-1)


def lambert_to_sphere(v1, v2) -> np.ndarray:
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    rho2 = v1 * v1 + v2 * v2
    k = np.sqrt(np.clip(1.0 - rho2 / 4.0, 0.0, None))
    return np.stack([v1 * k, v2 * k, rho2 / 2.0 - 1.0], axis=-1)


def sphere_to_lambert(y) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y, dtype=float))
    rho = np.sqrt(2.0 * (1.0 + y[:, 2]))
    planar = np.hypot(y[:, 0], y[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(planar > 0, rho / planar, 0.0)
    return y[:, :2] * scale[:, None]


# --------------------------------------------------------------------------
# parameter pushforwards


def pushforward_params(kind: str, transform, param):
    """Image of a parameter under the induced action.

    kind='euclid'            transform: MoebiusMap | MoebiusChain, param: theta
    kind='sphere'            transform: SphereMoebius, param: phi (vector or INFINITY)
    kind='inv_stereographic' param: theta -> phi
    kind='stereographic'     param: phi -> theta
    """
    if kind == "euclid":
        if isinstance(transform, MoebiusMap):
            return moebius_apply_param(transform, param)
        if isinstance(transform, MoebiusChain):
            return transform.apply_param(param)
    elif kind == "sphere":
        if isinstance(transform, SphereMoebius):
            return sphere_moebius_apply(transform, param)
    elif kind == "inv_stereographic":
        if param is INFINITY or isinstance(param, ExtendedComplexParam):
            d = None if param is INFINITY else param.dim
            if d is None:
                raise DomainError("cannot infer dimension from INFINITY; pass ExtendedComplexParam")
            return inv_stereographic_ext(param, d)
    elif kind == "stereographic":
        if param is not INFINITY:
            phi = np.asarray(param, dtype=float)
            return stereographic(phi, phi.size - 1)
    else:
        raise InvalidParameterError(f"unknown pushforward kind {kind!r}")
    raise InvalidParameterError(
        f"transform/parameter types do not match kind {kind!r}: {type(transform).__name__}, {type(param).__name__}"
    )
