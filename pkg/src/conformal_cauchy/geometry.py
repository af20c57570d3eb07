"""Extended points, extended complex parameters, rotations and reflections.

Points of the extended space R^d ∪ {∞} are plain 1-D numpy arrays, or the
singleton :data:`INFINITY`.  The point at infinity is a tagged value, never
an IEEE ``inf``; every map checks for it before doing arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, InvalidParameterError

ORTHO_TOL = 1e-12


class _Infinity:
    """The point at infinity of an extended space (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

ExtendedPoint = Union[np.ndarray, _Infinity]


def is_infinity(x) -> bool:
    return x is INFINITY


def as_point(x) -> ExtendedPoint:
    """Validate and coerce ``x`` into an extended point."""
    if x is INFINITY:
        return x
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError("points must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise DomainError("finite points must have finite coordinates; use INFINITY for the point at infinity")
    return arr


@dataclass(frozen=True, eq=False)
class ExtendedComplexParam:
    """theta = mu + i*sigma with mu in R^d.

    sigma and -sigma describe the same Cauchy law, so the stored sigma is
    always non-negative.  The point at infinity is :data:`INFINITY`, not an
    instance of this class.
    """

    mu: np.ndarray
    sigma: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        if mu.size == 0 or not np.all(np.isfinite(mu)):
            raise InvalidParameterError("mu must be a finite vector of length >= 1")
        sigma = float(self.sigma)
        if not np.isfinite(sigma):
            raise InvalidParameterError("sigma must be finite")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", abs(sigma))

    @property
    def dim(self) -> int:
        return self.mu.size

    @property
    def lifted(self) -> np.ndarray:
        """(mu', sigma)' as a point of R^{d+1}."""
        return np.append(self.mu, self.sigma)

    @classmethod
    def from_lifted(cls, v) -> "ExtendedComplexParam":
        v = np.asarray(v, dtype=float)
        return cls(v[:-1], v[-1])

    def norm(self) -> float:
        return float(np.sqrt(self.mu @ self.mu + self.sigma**2))

    def __eq__(self, other):
        if not isinstance(other, ExtendedComplexParam):
            return NotImplemented
        return self.sigma == other.sigma and np.array_equal(self.mu, other.mu)

    def __hash__(self):
        return hash((self.mu.tobytes(), self.sigma))

    def __repr__(self) -> str:
        return f"ExtendedComplexParam(mu={self.mu.tolist()}, sigma={self.sigma!r})"


Theta = Union[ExtendedComplexParam, _Infinity]


def _check_orthogonal(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParameterError(f"{what} must be a square matrix")
    err = np.max(np.abs(m @ m.T - np.eye(m.shape[0])))
    if err > ORTHO_TOL:
        raise InvalidParameterError(f"{what} is not orthogonal (max |MM'-I| = {err:.3e})")


def as_orthogonal(m) -> np.ndarray:
    """Return ``m`` as a read-only float matrix after checking MM' = I."""
    m = np.array(m, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    _check_orthogonal(m, "matrix")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Rotation:
    """A d x d rotation matrix (orthogonal, det +1, both to 1e-12)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        _check_orthogonal(m, "rotation")
        det = np.linalg.det(m)
        if abs(det - 1.0) > ORTHO_TOL:
            raise InvalidParameterError(f"rotation must have det +1, got {det!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, d: int) -> "Rotation":
        return cls(np.eye(d))

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self.matrix @ other.matrix)
        return self.matrix @ other

    @property
    def T(self) -> "Rotation":
        return Rotation(self.matrix.T)


def invert_point(x: ExtendedPoint, d: int | None = None) -> ExtendedPoint:
    """Inversion in the unit sphere, x -> x/||x||^2, with 0 <-> infinity.

    ``d`` is only needed to map INFINITY back to the origin of R^d.
    """
    if x is INFINITY:
        if d is None:
            raise DomainError("inverting INFINITY requires the dimension d")
        return np.zeros(d)
    x = as_point(x)
    m = np.abs(x).max()
    if m == 0.0:
        return INFINITY
    u = x / m  # rescale first: x @ x under/overflows at extreme magnitudes
    return (u / (u @ u)) / m


def reflection_matrix(phi) -> np.ndarray:
    """T_phi = 2 phi phi'/||phi||^2 - I (reflection through the line of phi)."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    n2 = phi @ phi
    if n2 == 0.0:
        raise DomainError("reflection axis phi must be non-zero")
    return 2.0 * np.outer(phi, phi) / n2 - np.eye(phi.size)


def reflect(phi, x) -> np.ndarray:
    """Apply T_phi to ``x`` (rows of ``x`` when 2-D)."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != phi.size:
        raise DomainError(f"dimension mismatch: phi has {phi.size}, x has {x.shape[-1]}")
    n2 = phi @ phi
    if n2 == 0.0:
        raise DomainError("reflection axis phi must be non-zero")
    proj = (x @ phi) / n2
    return 2.0 * np.multiply.outer(proj, phi) - x


def ext_param_transform(theta: Theta, a=None, gamma: float = 1.0, A=None) -> Theta:
    """Return A(gamma*(theta + a)) using the extended complex arithmetic.

    theta + a shifts mu only, gamma scales both mu and sigma, and A rotates
    mu only (the same order as in a Moebius map).  The result is
    re-canonicalised to sigma >= 0.
    """
    if theta is INFINITY:
        return INFINITY
    d = theta.dim
    a = np.zeros(d) if a is None else np.asarray(a, dtype=float).reshape(-1)
    A = np.eye(d) if A is None else as_orthogonal(A)
    if a.size != d or A.shape != (d, d):
        raise DomainError("dimension mismatch in ext_param_transform")
    return ExtendedComplexParam(A @ (gamma * (theta.mu + a)), gamma * theta.sigma)


def random_rotation(d: int, seed: int) -> Rotation:
    """Haar-distributed element of SO(d), deterministic in ``seed``."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if d == 1:
        return Rotation(np.ones((1, 1)))
    rng = np.random.Generator(np.random.Philox(key=[int(seed) & 0xFFFFFFFFFFFFFFFF, 0xA11CE]))
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Rotation(q)


def tangent_frame(y) -> np.ndarray:
    """Orthonormal basis (as columns) of the tangent space of the sphere at ``y``."""
    y = np.asarray(y, dtype=float).reshape(-1)
    y = y / np.linalg.norm(y)
    q, _ = np.linalg.qr(np.column_stack([y, np.eye(y.size)]))
    return q[:, 1:y.size]
