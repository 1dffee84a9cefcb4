"""Maps between flat 3-space, the unit 3-sphere in R^4, and quaternions.

Two inverse-stereographic charts are provided. stereo_psi sends a point of
R^3 onto the unit sphere centred at the origin (the south pole (0,0,0,-1) is
the image of 0, the north pole the limit at infinity). stereo_phi is the
same chart shifted one unit along the fourth axis, so its image is the unit
sphere centred at (0,0,0,1), passing through the origin.

quaternion_from_bivectors multiplies two vectors embedded as planes: the
plane of u times the plane of v gives scalar -(u.v) plus the plane of
v x u (the plane product reverses the cross order, as the identity
(Iu)(Iv) = -u.v - I(u x v) requires). This agrees with the slot 0..3 block
of the full algebra product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Multivector
from .errors import DegenerateInput


def _as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True)
class R4Point:
    """A point of R^4 stored as a 3-vector part plus the fourth coordinate."""

    v: tuple
    w: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v[0], self.v[1], self.v[2], self.w])


@dataclass(frozen=True)
class Quaternion:
    """Scalar plus plane coefficients, ordered (yz, zx, xy)."""

    scalar: float
    bivector: tuple

    def as_array(self) -> np.ndarray:
        return np.array([self.scalar, *self.bivector])


def stereo_phi(x) -> R4Point:
    """Inverse stereographic chart onto the sphere centred at (0,0,0,1).

    phi(x) = (2 x / (|x|^2 + 1),  2 |x|^2 / (|x|^2 + 1)). phi(0) is the
    origin and the limit for |x| -> inf is (0,0,0,2).
    """
    x = _as_vec3(x)
    r2 = float(x @ x)
    s = 2.0 / (r2 + 1.0)
    v = s * x
    return R4Point(v=(float(v[0]), float(v[1]), float(v[2])), w=s * r2)


def stereo_psi(x) -> R4Point:
    """Inverse stereographic chart onto the unit sphere at the origin.

    Same vector part as stereo_phi with the fourth coordinate lowered by
    one; the image always has unit norm and psi(0) = (0,0,0,-1).
    """
    p = stereo_phi(x)
    return R4Point(v=p.v, w=p.w - 1.0)


def quaternion_from_bivectors(u, v) -> Quaternion:
    """Product of the planes dual to u and v: scalar -(u.v), plane v x u."""
    u = _as_vec3(u)
    v = _as_vec3(v)
    if float(np.linalg.norm(u)) < 1e-12 or float(np.linalg.norm(v)) < 1e-12:
        raise DegenerateInput("bivector factors must be nonzero")
    w = np.cross(v, u)
    return Quaternion(scalar=float(-(u @ v)),
                      bivector=(float(w[0]), float(w[1]), float(w[2])))


def quaternion_to_multivector(q: Quaternion, lam: int = +1) -> Multivector:
    """Embed into slots 0..3: plane coefficient order there is (xy, zx, yz)."""
    yz, zx, xy = q.bivector
    return Multivector([q.scalar, xy, zx, yz, 0.0, 0.0, 0.0, 0.0], lam)


def multivector_to_quaternion(x: Multivector) -> Quaternion:
    """Project slots 0..3 back out; slots 4..7 are ignored."""
    c = x.coeffs
    return Quaternion(scalar=float(c[0]),
                      bivector=(float(c[3]), float(c[2]), float(c[1])))
