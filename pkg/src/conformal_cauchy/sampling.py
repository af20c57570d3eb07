"""Exact samplers: uniform sphere variates pushed through Moebius and
stereographic maps.  No rejection steps.

Randomness comes from :class:`RngStream`, an immutable (seed, stream) pair
over the Philox-4x64 counter generator; the same value always reproduces the
same variates, and different stream ids give independent sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import SphericalCauchy
from .errors import DomainError, InvalidParameterError
from .geometry import INFINITY, ExtendedComplexParam
from .moebius import (
    SphereMoebius,
    inv_stereographic_array,
    sphere_moebius_apply_array,
    stereographic_array,
)

_U64 = 0xFFFFFFFFFFFFFFFF
_TWO_M53 = 2.0**-53


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _U64)
        object.__setattr__(self, "stream", int(self.stream) & _U64)

    def raw(self, n: int) -> np.ndarray:
        """First ``n`` 64-bit outputs of the stream."""
        bg = np.random.Philox(key=np.array([self.seed, self.stream], dtype=np.uint64))
        return bg.random_raw(int(n)).astype(np.uint64)

    def uniforms(self, n: int) -> np.ndarray:
        """53-bit uniforms on [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def normals(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller."""
        m = (int(n) + 1) // 2
        bits = self.raw(2 * m) >> np.uint64(11)
        u1 = (bits[0::2].astype(np.float64) + 1.0) * _TWO_M53  # (0, 1]
        u2 = bits[1::2].astype(np.float64) * _TWO_M53
        rad = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * m)
        z[0::2] = rad * np.cos(2.0 * np.pi * u2)
        z[1::2] = rad * np.sin(2.0 * np.pi * u2)
        return z[: int(n)]

    def child(self, k: int) -> "RngStream":
        """A derived stream, distinct from this one for every k >= 1."""
        return RngStream(self.seed, (self.stream * 0x9E3779B97F4A7C15 + int(k)) & _U64)


def _as_rng(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))


def sample_uniform_sphere(d: int, n: int, rng) -> np.ndarray:
    """n x (d+1) array of uniform variates on S^d (normalised Gaussian vectors)."""
    if d < 1 or n < 0:
        raise DomainError("need d >= 1 and n >= 0")
    X = _as_rng(rng).normals(n * (d + 1)).reshape(n, d + 1)
    return X / np.linalg.norm(X, axis=1)[:, None]


def sample_sphere_cauchy(phi, d: int, n: int, rng) -> np.ndarray:
    """Variates of C*_d(phi) as the image of uniform variates under g_{I,phi}."""
    U = sample_uniform_sphere(d, n, rng)
    if phi is INFINITY:
        return U
    dist = SphericalCauchy(phi)
    if dist.phi.size != d + 1:
        raise DomainError(f"phi must have length d+1 = {d + 1}")
    if dist.is_point_mass:
        raise InvalidParameterError("||phi|| = 1 is a point mass")
    if not np.any(dist.phi):
        return U
    return sphere_moebius_apply_array(SphereMoebius(np.eye(d + 1), dist.phi), U)


def sample_euclid_cauchy(theta: ExtendedComplexParam, d: int, n: int, rng) -> np.ndarray:
    """Variates of C_d(mu + i sigma): mu + sigma * stereographic(U)."""
    if theta is INFINITY or theta.sigma <= 0:
        raise DomainError("sigma must be positive")
    if theta.dim != d:
        raise DomainError(f"theta must have dimension {d}")
    Z = stereographic_array(sample_uniform_sphere(d, n, rng))
    return theta.mu + theta.sigma * Z


def sample_kent(mu, L, d: int, n: int, rng) -> np.ndarray:
    """Variates of the Kent-type family: inv_stereographic(mu + L stereographic(U))."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if mu.size != d or L.shape != (d, d):
        raise DomainError(f"mu must have length {d} and L shape {d}x{d}")
    if np.linalg.det(L) == 0.0:
        raise DomainError("L must be invertible")
    Z = stereographic_array(sample_uniform_sphere(d, n, rng))
    return inv_stereographic_array(mu + Z @ L.T)


def sample_marginal(varphi: float, nu: int, n: int, rng) -> np.ndarray:
    """First coordinate of C*_nu(varphi e_1) variates (nu a positive integer)."""
    if int(nu) != nu or nu < 1:
        raise DomainError("sampling the marginal family needs integer nu >= 1")
    nu = int(nu)
    phi = np.zeros(nu + 1)
    phi[0] = varphi
    return sample_sphere_cauchy(phi, nu, n, rng)[:, 0]
