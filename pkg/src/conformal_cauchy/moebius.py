"""Moebius maps on the extended space, the sphere-preserving subgroup, and
(inverse) stereographic projection.

A general Moebius map is the 5-tuple ``[A, gamma, a, b, epsilon]``::

    g(x) = A (gamma (x + a) / ||x + a||**epsilon + b),   epsilon in {0, 2}

General compositions are kept as :class:`MoebiusChain` objects.  Only the
sphere subgroup ``g_{R,phi}`` has a closed-form composition law
(:func:`sphere_moebius_compose`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError
from .geometry import (
    INFINITY,
    ExtendedComplexParam,
    ExtendedPoint,
    Rotation,
    Theta,
    as_orthogonal,
    as_point,
    reflection_matrix,
)

UNIT_GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    A: np.ndarray
    gamma: float
    a: np.ndarray
    b: np.ndarray
    epsilon: int

    def __post_init__(self):
        A = as_orthogonal(self.A)
        d = A.shape[0]
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        if a.size != d or b.size != d:
            raise InvalidParameterError(f"a and b must have length {d}")
        if self.epsilon not in (0, 2):
            raise InvalidParameterError("epsilon must be 0 or 2")
        gamma = float(self.gamma)
        if gamma == 0.0 or not np.isfinite(gamma):
            raise InvalidParameterError("gamma must be finite and non-zero")
        for v in (a, b):
            v.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "epsilon", int(self.epsilon))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @classmethod
    def identity(cls, d: int) -> "MoebiusMap":
        return cls(np.eye(d), 1.0, np.zeros(d), np.zeros(d), 0)

    @classmethod
    def shift(cls, a) -> "MoebiusMap":
        a = np.asarray(a, dtype=float).reshape(-1)
        return cls(np.eye(a.size), 1.0, a, np.zeros(a.size), 0)

    @classmethod
    def scale(cls, gamma: float, d: int) -> "MoebiusMap":
        return cls(np.eye(d), gamma, np.zeros(d), np.zeros(d), 0)

    @classmethod
    def orthogonal(cls, A) -> "MoebiusMap":
        A = as_orthogonal(A)
        d = A.shape[0]
        return cls(A, 1.0, np.zeros(d), np.zeros(d), 0)

    @classmethod
    def inversion(cls, d: int) -> "MoebiusMap":
        return cls(np.eye(d), 1.0, np.zeros(d), np.zeros(d), 2)

    def lift(self) -> "MoebiusMap":
        """The (d+1)-dimensional map acting on (mu', sigma)'."""
        d = self.dim
        A = np.eye(d + 1)
        A[:d, :d] = self.A
        return MoebiusMap(A, self.gamma, np.append(self.a, 0.0), np.append(self.b, 0.0), self.epsilon)

    def __call__(self, x):
        return moebius_apply(self, x)

    def to_dict(self) -> dict:
        return {
            "A": self.A.tolist(),
            "gamma": self.gamma,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MoebiusMap":
        return cls(data["A"], data["gamma"], data["a"], data["b"], data["epsilon"])


def moebius_apply(m: MoebiusMap, x: ExtendedPoint) -> ExtendedPoint:
    """Apply ``m`` to a point of the extended space.

    Conventions: for epsilon=0, infinity is fixed; for epsilon=2, -a maps to
    infinity and infinity maps to A b (the limit of g(x) as ||x|| grows).
    """
    x = as_point(x)
    if x is INFINITY:
        return INFINITY if m.epsilon == 0 else m.A @ m.b
    if x.size != m.dim:
        raise DomainError(f"point has dimension {x.size}, map has {m.dim}")
    u = x + m.a
    if m.epsilon == 0:
        return m.A @ (m.gamma * u + m.b)
    r2 = u @ u
    if r2 == 0.0:
        return INFINITY
    return m.A @ (m.gamma * u / r2 + m.b)


def moebius_apply_array(m: MoebiusMap, X) -> np.ndarray:
    """Row-wise :func:`moebius_apply` for finite points; rows hitting the pole become nan."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    u = X + m.a
    if m.epsilon == 0:
        v = m.gamma * u
    else:
        r2 = np.einsum("ij,ij->i", u, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = m.gamma * u / r2[:, None]
        v[r2 == 0.0] = np.nan
    return (v + m.b) @ m.A.T


def moebius_apply_param(m: MoebiusMap, theta: Theta) -> Theta:
    """Induced action on theta = mu + i sigma (the lifted (d+1)-dim map)."""
    if theta is INFINITY:
        return INFINITY if m.epsilon == 0 else ExtendedComplexParam(m.A @ m.b, 0.0)
    if theta.dim != m.dim:
        raise DomainError(f"theta has dimension {theta.dim}, map has {m.dim}")
    image = moebius_apply(m.lift(), theta.lifted)
    if image is INFINITY:
        return INFINITY
    return ExtendedComplexParam.from_lifted(image)


@dataclass(frozen=True)
class MoebiusChain:
    """A composition of Moebius maps; ``maps[-1]`` is applied first."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise InvalidParameterError("a chain needs at least one map")
        dims = {m.dim for m in maps}
        if len(dims) != 1:
            raise InvalidParameterError(f"maps in a chain must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "maps", maps)

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    def __call__(self, x):
        for m in reversed(self.maps):
            x = moebius_apply(m, x)
        return x

    def apply_array(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        for m in reversed(self.maps):
            X = moebius_apply_array(m, X)
        return X

    def apply_param(self, theta: Theta) -> Theta:
        for m in reversed(self.maps):
            theta = moebius_apply_param(m, theta)
        return theta

    def to_dict(self) -> dict:
        return {"maps": [m.to_dict() for m in self.maps]}

    @classmethod
    def from_dict(cls, data: dict) -> "MoebiusChain":
        return cls(tuple(MoebiusMap.from_dict(m) for m in data["maps"]))


def chain_compose(outer: MoebiusChain, inner: MoebiusChain) -> MoebiusChain:
    """outer o inner: apply ``inner`` first."""
    if outer.dim != inner.dim:
        raise DomainError(f"cannot compose chains of dimension {outer.dim} and {inner.dim}")
    return MoebiusChain(outer.maps + inner.maps)


# --------------------------------------------------------------------------
# sphere subgroup


@dataclass(frozen=True, eq=False)
class SphereMoebius:
    """g_{R,phi}(x) = R { (1 - ||phi||^2) (x~ + phi) / ||x~ + phi||^2 + phi },  x~ = x/||x||^2."""

    R: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        R = self.R.matrix if isinstance(self.R, Rotation) else self.R
        R = Rotation(R).matrix
        phi = np.array(self.phi, dtype=float).reshape(-1)
        if phi.size != R.shape[0]:
            raise InvalidParameterError(f"phi must have length {R.shape[0]}")
        if not np.all(np.isfinite(phi)):
            raise InvalidParameterError("phi must be finite")
        if abs(np.linalg.norm(phi) - 1.0) <= UNIT_GUARD:
            raise InvalidParameterError("||phi|| = 1 gives a degenerate (point-mass) map")
        phi.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "phi", phi)

    @property
    def dim(self) -> int:
        """Ambient dimension d+1."""
        return self.phi.size

    @classmethod
    def identity(cls, n: int) -> "SphereMoebius":
        return cls(np.eye(n), np.zeros(n))

    def __call__(self, x):
        return sphere_moebius_apply(self, x)

    def to_dict(self) -> dict:
        return {"R": self.R.tolist(), "phi": self.phi.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SphereMoebius":
        return cls(data["R"], data["phi"])


def sphere_moebius_apply(s: SphereMoebius, x: ExtendedPoint) -> ExtendedPoint:
    x = as_point(x)
    phi = s.phi
    p2 = phi @ phi
    if x is INFINITY:
        return INFINITY if p2 == 0.0 else s.R @ (phi / p2)
    if x.size != s.dim:
        raise DomainError(f"point has dimension {x.size}, map has {s.dim}")
    r2 = x @ x
    if r2 == 0.0:
        return s.R @ phi
    w = x / r2 + phi
    w2 = w @ w
    if w2 == 0.0:
        return INFINITY
    return s.R @ ((1.0 - p2) * w / w2 + phi)


def sphere_moebius_apply_array(s: SphereMoebius, X) -> np.ndarray:
    """Row-wise apply for finite, non-zero points (the sampling hot path)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    phi = s.phi
    p2 = phi @ phi
    r2 = np.einsum("ij,ij->i", X, X)
    w = X / r2[:, None] + phi
    w2 = np.einsum("ij,ij->i", w, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (1.0 - p2) * w / w2[:, None] + phi
    out[w2 == 0.0] = np.nan
    return out @ s.R.T


def phi_to_tilde(phi) -> ExtendedPoint:
    """Convert between the phi and phi~ = phi/||phi||^2 parameterisations (an involution)."""
    phi = np.asarray(phi, dtype=float)
    p2 = phi @ phi
    if p2 == 0.0:
        return INFINITY
    return phi / p2


def _tilde_map(psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """g_{I,psi~}(x) in the phi~ parameterisation: T_psi {(1-||psi||^2)(x+psi)/||x+psi||^2 + psi}."""
    w = x + psi
    h = (1.0 - psi @ psi) * w / (w @ w) + psi
    return reflection_matrix(psi) @ h


def sphere_moebius_apply_tilde(R, psi, x) -> ExtendedPoint:
    """Apply the map written as R T_psi {...} with parameter psi = phi~ (for cross-checks)."""
    R = np.asarray(R, dtype=float)
    psi = np.asarray(psi, dtype=float)
    x = as_point(x)
    if x is INFINITY:
        return R @ reflection_matrix(psi) @ psi
    w = x + psi
    if w @ w == 0.0:
        return INFINITY
    return R @ _tilde_map(psi, x)


def sphere_moebius_compose(s2: SphereMoebius, s1: SphereMoebius) -> SphereMoebius:
    """Closed-form parameters of s2 o s1.

    Works in the phi~ parameterisation, where with psi_k = phi~_k::

        phi_check~ = g_{I,psi_1}(R1' psi_2)
        beta       = T_{psi_1} (R1' psi_2 + psi_1) / ||R1' psi_2 + psi_1||^2
        R_check    = R2 T_{psi_2} R1 T_{psi_1} T_beta T_{phi_check}

    and the degenerate branch psi_2 = -R1 psi_1 gives the pure rotation R2 R1.
    Maps with phi = 0 (pure rotations) are handled directly.
    """
    if s1.dim != s2.dim:
        raise DomainError("cannot compose sphere maps of different dimensions")
    R1, R2 = s1.R, s2.R
    if not np.any(s1.phi):
        return SphereMoebius(R2 @ R1, R1.T @ s2.phi)
    if not np.any(s2.phi):
        return SphereMoebius(R2 @ R1, s1.phi)
    psi1 = phi_to_tilde(s1.phi)
    psi2 = phi_to_tilde(s2.phi)
    u = R1.T @ psi2
    v = u + psi1
    scale = max(np.linalg.norm(u), np.linalg.norm(psi1))
    if np.linalg.norm(v) <= 1e-14 * scale:
        return SphereMoebius(R2 @ R1, np.zeros(s1.dim))
    psi_c = _tilde_map(psi1, u)
    if not np.any(psi_c):
        raise InvalidParameterError(
            "composite sends 0 to infinity; it is not of the form g_{R,phi} with finite phi"
        )
    beta = reflection_matrix(psi1) @ v / (v @ v)
    R_c = (
        R2
        @ reflection_matrix(psi2)
        @ R1
        @ reflection_matrix(psi1)
        @ reflection_matrix(beta)
        @ reflection_matrix(psi_c)
    )
    return SphereMoebius(R_c, phi_to_tilde(psi_c))


def sphere_moebius_invert(s: SphereMoebius) -> SphereMoebius:
    """Inverse map, from s = (R, 0) o (I, phi): s^-1 = (I, -phi) o (R', 0) = (R', -R phi)."""
    n = s.dim
    return sphere_moebius_compose(SphereMoebius(np.eye(n), -s.phi), SphereMoebius(s.R.T, np.zeros(n)))


# --------------------------------------------------------------------------
# stereographic projection


def inv_stereographic(x: ExtendedPoint, d: int | None = None) -> np.ndarray:
    """R^d ∪ {∞} -> S^d: (2/(||x||^2+1)) (x_1..x_d, (||x||^2-1)/2); ∞ -> e_{d+1}."""
    x = as_point(x)
    if x is INFINITY:
        if d is None:
            raise DomainError("inv_stereographic(INFINITY) requires the dimension d")
        e = np.zeros(d + 1)
        e[-1] = 1.0
        return e
    r2 = x @ x
    return np.append(2.0 * x, r2 - 1.0) / (r2 + 1.0)


def inv_stereographic_array(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    r2 = np.einsum("ij,ij->i", X, X)
    return np.column_stack([2.0 * X, r2 - 1.0]) / (r2 + 1.0)[:, None]


def stereographic_array(Y) -> np.ndarray:
    """Row-wise projection of sphere points to R^d (the north pole gives inf)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    top, last = Y[:, :-1], Y[:, -1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        south = top / (1.0 - last)
        # on the northern half of a unit sphere 1 - y_{d+1} cancels; use ||ybar||^2 = (1-y)(1+y)
        north = top * (1.0 + last) / np.sum(top * top, axis=1, keepdims=True)
        unit = np.abs(np.sum(Y * Y, axis=1, keepdims=True) - 1.0) <= 1e-12
        out = np.where((last > 0) & unit, north, south)
    out[(last[:, 0] == 1.0)] = np.inf
    return out


def _lifted(theta, d: int | None):
    if theta is INFINITY:
        return INFINITY
    if isinstance(theta, ExtendedComplexParam):
        return theta.lifted
    t = np.asarray(theta, dtype=float).reshape(-1)
    if t.size < 2:
        raise DomainError("a lifted parameter (mu', sigma)' needs length >= 2")
    return t


def inv_stereographic_ext(theta, d: int | None = None) -> ExtendedPoint:
    """theta = mu + i sigma -> (2/||theta+i||^2) (mu_1..mu_d, (||theta||^2-1)/2).

    ``theta`` is an :class:`ExtendedComplexParam` (sigma >= 0), INFINITY, or
    a raw lifted vector (mu', sigma)' whose sigma may be negative.  -i maps to
    infinity and infinity to e_{d+1}.
    """
    t = _lifted(theta, d)
    if t is INFINITY:
        if d is None:
            raise DomainError("inv_stereographic_ext(INFINITY) requires the dimension d")
        e = np.zeros(d + 1)
        e[-1] = 1.0
        return e
    mu, sigma = t[:-1], t[-1]
    denom = mu @ mu + (sigma + 1.0) ** 2
    if denom == 0.0:
        return INFINITY
    return np.append(2.0 * mu, t @ t - 1.0) / denom


def stereographic(y: ExtendedPoint, d: int | None = None, canonical: bool = True):
    """Inverse of :func:`inv_stereographic_ext`.

    With ``canonical=True`` an :class:`ExtendedComplexParam` (or INFINITY) is
    returned; points outside the closed unit ball then come back with sigma
    flipped, which names the same Cauchy law.  With ``canonical=False`` the raw
    lifted vector (mu', sigma)' is returned and the round trip is exact on all
    of R^{d+1}.
    """
    y = as_point(y)
    if y is INFINITY:
        if d is None:
            raise DomainError("stereographic(INFINITY) requires the dimension d")
        t = np.zeros(d + 1)
        t[-1] = -1.0
    else:
        ybar, top = y[:-1], y[-1]
        one_minus = 1.0 - top
        denom = ybar @ ybar + one_minus**2
        if denom == 0.0:
            return INFINITY
        t = np.append(2.0 * ybar, 2.0 * one_minus) / denom
        t[-1] -= 1.0
    if canonical:
        return ExtendedComplexParam.from_lifted(t)
    return t


def stereo_moebius_map(d: int) -> MoebiusMap:
    """g* on R^{d+1}: (I - 2 e e')(2 (x + e)/||x + e||^2 - e), as a 5-tuple.

    Equals :func:`inv_stereographic_ext` on lifted parameters.
    """
    n = d + 1
    e = np.zeros(n)
    e[-1] = 1.0
    return MoebiusMap(np.eye(n) - 2.0 * np.outer(e, e), 2.0, e, -e, 2)


def map_from_dict(data: dict):
    """Decode a JSON map: a chain ({"maps": ...}), a sphere map ({"R", "phi"}) or a 5-tuple."""
    if "maps" in data:
        return MoebiusChain.from_dict(data)
    if "R" in data and "phi" in data:
        return SphereMoebius.from_dict(data)
    if {"A", "gamma", "a", "b", "epsilon"} <= set(data):
        return MoebiusMap.from_dict(data)
    raise InvalidParameterError(f"unrecognised map fields: {sorted(data)}")
