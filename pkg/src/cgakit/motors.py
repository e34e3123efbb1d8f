"""Similarity transforms as even-grade versors: construction, application, decomposition.

A motor here is the product translator * rotor * dilator.  Motors are stored
as the 16 even-grade coefficients (grades 0, 2, 4) in canonical order, which
is also their wire layout.  The decomposition trick: apply the motor to the
unit sphere at the origin; the image is a sphere centered at the translation
vector whose radius is the scale factor, after which the rotor falls out as
translator(t)^-1 * M * dilator(d)^-1.

Quaternion convention is (w, x, y, z) throughout.  A unit quaternion maps to
the rotor  w - z*e12 + y*e13 - x*e23 , pinned by the requirement that the
sandwich of the 90-degree-about-z rotor carries (1,0,0) to (0,1,0).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import blades
from .algebra import (
    AlgebraError,
    Multivector,
    gp_into,
    packed_gp_ee,
    packed_gp_oe,
)
from .blades import (
    BLADE_COUNT,
    EVEN_INDICES,
    GRADES,
    ODD_INDICES,
    REVERSE_SIGNS_EVEN,
    VERSOR_EPS_EVEN,
)


class GeometryError(ValueError):
    """Base class for geometric contract violations."""


class FlatObjectError(GeometryError):
    """Round-object operation applied to a flat (no e_o content)."""


class ImaginarySphereError(GeometryError):
    """Round with negative squared radius where a real one was required."""

    def __init__(self, radius_sq: float):
        super().__init__(f"imaginary round: radius^2 = {radius_sq:g}")
        self.radius_sq = radius_sq


class SingularMotorError(GeometryError):
    """Motor with vanishing versor norm, or an even element that is no versor."""


class NotScalingMotorError(GeometryError):
    """Even element whose decomposition leaves non-rotor residue."""


# packed positions (see blades: even = grades 0,2,4; odd = grades 1,3,5)
_P_E12, _P_E13, _P_E14, _P_E15, _P_E23 = 1, 2, 3, 4, 5
_P_E24, _P_E25, _P_E34, _P_E35, _P_E45 = 6, 7, 8, 9, 10
_ODD_E1, _ODD_E2, _ODD_E3, _ODD_E4, _ODD_E5 = 0, 1, 2, 3, 4

# right-multiplying by the unit sphere at the origin (the constant -e4, in
# packed odd layout) is a signed gather: (M * (-e4))[k] = sign[k] * M[perm[k]]
_MC_PERM = np.array([blades.EO_LEFT[k, _ODD_E4] for k in range(16)], dtype=np.intp)
_MC_SIGN = np.array([-blades.EO_SIGN[k, _ODD_E4] for k in range(16)])


def _quat_normalized(q, warn_tol: float = 1e-6):
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4,):
        raise ValueError("quaternion must have 4 components (w, x, y, z)")
    n = float(np.linalg.norm(q))
    if n == 0.0 or not math.isfinite(n):
        raise ValueError("quaternion must be non-zero and finite")
    if abs(n - 1.0) > warn_tol:
        warnings.warn(f"quaternion deviates from unit norm by {abs(n - 1.0):.3g}; normalizing",
                      stacklevel=3)
    if abs(n - 1.0) > 1e-9:
        return q / n
    return q.copy()


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate 3-vector v by unit quaternion q = (w, x, y, z)."""
    w = q[0]
    u = q[1:]
    uv = np.cross(u, v)
    return v + 2.0 * (w * uv + np.cross(u, uv))


@dataclass
class Pose:
    """Conventional transform: translation, unit quaternion (w,x,y,z), uniform scale."""

    translation: np.ndarray
    rotation: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3).copy()
        if not np.all(np.isfinite(self.translation)):
            raise ValueError("translation must be finite")
        self.rotation = _quat_normalized(self.rotation)
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"scale must be positive, got {self.scale}")
        self.scale = float(self.scale)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]), 1.0)

    @classmethod
    def _fast(cls, t: np.ndarray, q: np.ndarray, s: float) -> "Pose":
        # hot-path constructor: trusts already-validated components
        p = object.__new__(cls)
        p.translation = t
        p.rotation = q
        p.scale = s
        return p

    def transform_point(self, p) -> np.ndarray:
        """Scale about the origin, rotate, then translate."""
        p = np.asarray(p, dtype=np.float64)
        return self.translation + quat_rotate(self.rotation, self.scale * p)


class Motor:
    """Even-grade versor stored as 16 coefficients in canonical order."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=np.float64)
        if arr.shape != (16,):
            raise ValueError(f"motor expects 16 even-grade coefficients, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("motor coefficients must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        self._c = arr

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @classmethod
    def identity(cls) -> "Motor":
        c = np.zeros(16)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def from_multivector(cls, mv: Multivector, tol: float = 1e-9) -> "Motor":
        """Project onto the even part; odd content above `tol` (relative) is an error."""
        c = mv.coeffs
        scale = float(np.max(np.abs(c)))
        odd = float(np.max(np.abs(c[ODD_INDICES]))) if scale else 0.0
        if scale and odd > tol * scale:
            raise ValueError(f"multivector has odd-grade content ({odd:g} vs scale {scale:g})")
        return cls(c[EVEN_INDICES])

    def to_multivector(self) -> Multivector:
        full = np.zeros(BLADE_COUNT)
        full[EVEN_INDICES] = self._c
        return Multivector(full)

    def reverse(self) -> "Motor":
        return Motor(self._c * REVERSE_SIGNS_EVEN)

    def inverse(self) -> "Motor":
        return motor_inverse(self)

    def versor_norm_sq(self) -> float:
        """Scalar part of M * ~M (signed; positive for proper motors)."""
        return float(np.dot(self._c * self._c, VERSOR_EPS_EVEN))

    def __mul__(self, other):
        if isinstance(other, Motor):
            out = packed_gp_ee(self._c, other._c, np.empty(16), np.empty((16, 16)))
            return Motor(out)
        if isinstance(other, (int, float, np.floating)):
            return Motor(self._c * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Motor(self._c * float(other))
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Motor):
            return Motor(self._c + other._c)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Motor):
            return Motor(self._c - other._c)
        return NotImplemented

    def __neg__(self):
        return Motor(-self._c)

    def __eq__(self, other):
        if isinstance(other, Motor):
            return bool(np.array_equal(self._c, other._c))
        return NotImplemented

    def __hash__(self):
        return hash(self._c.tobytes())

    def isclose(self, other: "Motor", atol: float = 1e-12, rtol: float = 1e-9) -> bool:
        return bool(np.allclose(self._c, other._c, atol=atol, rtol=rtol))

    def __repr__(self):
        mv = self.to_multivector()
        return f"Motor({mv!r})"


# ---------------------------------------------------------------------------
# constructors (translator / rotor / dilator and helpers)


def _translator_into(out16: np.ndarray, t1: float, t2: float, t3: float) -> np.ndarray:
    out16.fill(0.0)
    out16[0] = 1.0
    out16[_P_E14] = out16[_P_E15] = -0.5 * t1
    out16[_P_E24] = out16[_P_E25] = -0.5 * t2
    out16[_P_E34] = out16[_P_E35] = -0.5 * t3
    return out16


def _rotor_into(out16: np.ndarray, q: np.ndarray) -> np.ndarray:
    out16.fill(0.0)
    out16[0] = q[0]
    out16[_P_E12] = -q[3]
    out16[_P_E13] = q[2]
    out16[_P_E23] = -q[1]
    return out16


def _dilator_into(out16: np.ndarray, d: float) -> np.ndarray:
    out16.fill(0.0)
    out16[0] = 1.0
    out16[_P_E45] = (1.0 - d) / (1.0 + d)
    return out16


def translator(t) -> Motor:
    """Translation by t:  1 - 0.5*(t1 e1 + t2 e2 + t3 e3) * e_inf."""
    t = np.asarray(t, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(t)):
        raise ValueError("translation must be finite")
    return Motor(_translator_into(np.empty(16), t[0], t[1], t[2]))


def rotor(q) -> Motor:
    """Rotor equivalent to unit quaternion (w, x, y, z)."""
    q = _quat_normalized(q)
    return Motor(_rotor_into(np.empty(16), q))


def dilator(d: float) -> Motor:
    """Uniform scaling by d about the origin:  1 + (1-d)/(1+d) * e45."""
    if not (math.isfinite(d) and d > 0.0):
        raise GeometryError(f"dilation factor must be positive, got {d}")
    return Motor(_dilator_into(np.empty(16), d))


def motor_from_pose(pose: Pose) -> Motor:
    """translator(t) * rotor(q) * dilator(s)."""
    return translator(pose.translation) * rotor(pose.rotation) * dilator(pose.scale)


def rotor_to_quat(m: Motor | np.ndarray) -> np.ndarray:
    """Unit quaternion (w,x,y,z) of a rotor; normalizes the rotor part first."""
    c = m.coeffs if isinstance(m, Motor) else np.asarray(m, dtype=np.float64)
    a, b, cc, dd = c[0], c[_P_E12], c[_P_E13], c[_P_E23]
    n = math.sqrt(a * a + b * b + cc * cc + dd * dd)
    if n == 0.0:
        raise SingularMotorError("rotor part vanishes; no quaternion")
    return np.array([a / n, -dd / n, cc / n, -b / n])


# ---------------------------------------------------------------------------
# embeddings and round extraction


def embed_point(p) -> Multivector:
    """Conformal embedding: p + 0.5*|p|^2 * e_inf + e_o (normalized)."""
    return embed_sphere(p, 0.0)


def embed_sphere(center, radius: float) -> Multivector:
    """Sphere as a grade-1 element; radius 0 gives the embedded point."""
    x = np.asarray(center, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(x)) or not math.isfinite(radius):
        raise ValueError("sphere parameters must be finite")
    if radius < 0.0:
        raise GeometryError(f"radius must be non-negative, got {radius}")
    u = float(x @ x) - radius * radius
    c = np.zeros(BLADE_COUNT)
    c[1:4] = x
    c[4] = 0.5 * (u - 1.0)
    c[5] = 0.5 * (u + 1.0)
    return Multivector(c)


def embed_plane(normal, offset: float) -> Multivector:
    """Plane {x : x . n_hat = offset} as n_hat + offset * e_inf."""
    n = np.asarray(normal, dtype=np.float64).reshape(3)
    ln = float(np.linalg.norm(n))
    if ln == 0.0 or not np.all(np.isfinite(n)) or not math.isfinite(offset):
        raise ValueError("plane needs a non-zero finite normal and finite offset")
    n = n / ln
    c = np.zeros(BLADE_COUNT)
    c[1:4] = n
    c[4] = c[5] = offset
    return Multivector(c)


def embed_point_packed_into(p, out16: np.ndarray) -> np.ndarray:
    """Point embedding written into a packed odd-part buffer."""
    out16.fill(0.0)
    u = p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
    out16[_ODD_E1] = p[0]
    out16[_ODD_E2] = p[1]
    out16[_ODD_E3] = p[2]
    out16[_ODD_E4] = 0.5 * (u - 1.0)
    out16[_ODD_E5] = 0.5 * (u + 1.0)
    return out16


def point_normalize(x: Multivector) -> Multivector:
    """Scale a round so that coeff[e5] - coeff[e4] = 1."""
    c = x.coeffs
    nf = c[5] - c[4]
    scale = float(np.max(np.abs(c)))
    if abs(nf) <= 1e-9 * max(scale, 1.0):
        raise FlatObjectError("normalization factor e5-e4 vanishes (flat object)")
    return x * (1.0 / nf)


def point_to_vec3(x: Multivector) -> np.ndarray:
    """Euclidean position of an embedded (possibly unnormalized) point."""
    c = point_normalize(x).coeffs
    return c[1:4].copy()


def extract_sphere(s: Multivector) -> tuple[np.ndarray, float]:
    """Invert the sphere embedding: returns (center, radius).

    The radius is recovered as sqrt(|center|^2 - (S[e4] + S[e5])) after
    normalizing by S[e5] - S[e4]; this is the exact inverse of the embedding
    above.  A tiny negative radius^2 (within -1e-9) is clamped to zero.
    """
    c = s.coeffs
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        raise AlgebraError("zero multivector is not a sphere")
    nong1 = np.max(np.abs(c[GRADES != 1]))
    if nong1 > 1e-6 * scale:
        raise AlgebraError("expected a grade-1 round")
    nf = c[5] - c[4]
    if abs(nf) <= 1e-9 * scale:
        raise FlatObjectError("flat object: e5 - e4 coefficient vanishes")
    center = c[1:4] / nf
    r2 = float(center @ center) - (c[4] + c[5]) / nf
    if r2 < -1e-9:
        raise ImaginarySphereError(r2)
    return center, math.sqrt(max(r2, 0.0))


# ---------------------------------------------------------------------------
# application and decomposition


def _as_full_coeffs(m) -> np.ndarray:
    if isinstance(m, Motor):
        full = np.zeros(BLADE_COUNT)
        full[EVEN_INDICES] = m.coeffs
        return full
    if isinstance(m, Multivector):
        return m.coeffs.copy()
    raise TypeError(f"expected Motor or Multivector, got {type(m).__name__}")


def _versor_inverse_full(mc: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    scratch = np.empty((BLADE_COUNT, BLADE_COUNT))
    rev = mc * blades.REVERSE_SIGNS
    prod = gp_into(mc, rev, np.empty(BLADE_COUNT), scratch)
    s0 = prod[0]
    resid = float(np.max(np.abs(prod[1:])))
    scale = float(np.max(np.abs(prod)))
    if scale == 0.0 or abs(s0) <= tol * max(scale, 1.0):
        raise SingularMotorError("versor norm vanishes; not invertible")
    if resid > 1e-6 * abs(s0):
        raise SingularMotorError("element is not a versor (M * ~M is not scalar)")
    return rev / s0


def motor_inverse(m: Motor) -> Motor:
    """Inverse of a motor: ~M / (M ~M)_0, with a versor sanity check."""
    c = m.coeffs
    rev = c * REVERSE_SIGNS_EVEN
    prod = packed_gp_ee(c, rev, np.empty(16), np.empty((16, 16)))
    s0 = prod[0]
    resid = float(np.max(np.abs(prod[1:])))
    if abs(s0) <= 1e-12 * max(float(np.max(np.abs(c))) ** 2, 1e-300):
        raise SingularMotorError("motor versor norm vanishes")
    if resid > 1e-6 * abs(s0):
        raise SingularMotorError("even element is not a versor")
    return Motor(rev / s0)


def sandwich(m: Motor | Multivector, x: Multivector) -> Multivector:
    """Apply a versor:  M * X * M^-1."""
    mc = _as_full_coeffs(m)
    minv = _versor_inverse_full(mc)
    scratch = np.empty((BLADE_COUNT, BLADE_COUNT))
    tmp = gp_into(mc, x.coeffs, np.empty(BLADE_COUNT), scratch)
    out = gp_into(tmp, minv, np.empty(BLADE_COUNT), scratch)
    return Multivector(out)


class MotorWorkspace:
    """Reusable buffers for the packed decomposition/interpolation core.

    `pooled` carves the 16-lane views out of pool buffers once, so the frame
    loop never reserves memory; `fresh` builds new arrays on every frame and
    counts them, which is the unpooled baseline the benchmarks compare against.
    """

    __slots__ = ("tr", "rev", "tinv", "rot", "aux", "ev_a", "ev_b",
                 "odd_a", "odd_b", "s16", "_pool", "_held")

    _EVEN_NAMES = ("tr", "rev", "tinv", "rot", "aux", "ev_a", "ev_b")
    _ODD_NAMES = ("odd_a", "odd_b")

    def __init__(self, make_buffer, scratch):
        for name in self._EVEN_NAMES + self._ODD_NAMES:
            setattr(self, name, make_buffer())
        self.s16 = scratch
        self._pool = None
        self._held = []

    @classmethod
    def pooled(cls, pool) -> "MotorWorkspace":
        held = []

        def make():
            buf = pool.acquire()
            held.append(buf)
            return buf[:16]

        ws = cls(make, np.empty((16, 16)))
        ws._pool = pool
        ws._held = held
        return ws

    @classmethod
    def fresh(cls, meter=None) -> "MotorWorkspace":
        if meter is None:
            return cls(lambda: np.zeros(16), np.empty((16, 16)))
        return cls(lambda: meter.fresh(16), meter.fresh((16, 16)))

    def release(self):
        if self._pool is not None:
            for buf in self._held:
                self._pool.release(buf)
            self._held = []
            self._pool = None


def _extract_tqd_packed(m16: np.ndarray, ws: MotorWorkspace,
                        rotor_tol: float = 1e-4) -> tuple[float, float, float, np.ndarray, float]:
    """Core decomposition on packed coefficients; returns (t1, t2, t3, q, d).

    Renormalizes the motor by its versor norm first, then reads translation and
    scale off the transformed unit sphere and peels the rotor.  All work happens
    in the workspace buffers.
    """
    tr, rev, aux, tinv = ws.tr, ws.rev, ws.aux, ws.tinv
    odd_a, odd_b, s16 = ws.odd_a, ws.odd_b, ws.s16

    np.multiply(m16, m16, out=aux)
    nrm2 = float(np.dot(aux, VERSOR_EPS_EVEN))
    if not (nrm2 > 1e-18):
        raise SingularMotorError(f"versor norm^2 = {nrm2:g}; cannot decompose")
    inv_n = 1.0 / math.sqrt(nrm2)
    np.multiply(m16, inv_n, out=tr)
    np.multiply(tr, REVERSE_SIGNS_EVEN, out=rev)

    # image of the unit sphere at the origin; M * (-e4) is a signed gather
    np.take(tr, _MC_PERM, out=odd_a)
    np.multiply(odd_a, _MC_SIGN, out=odd_a)
    packed_gp_oe(odd_a, rev, odd_b, s16)

    s1, s2, s3, s4, s5 = odd_b[:5].tolist()
    nf = s5 - s4
    if abs(nf) <= 1e-12:
        raise FlatObjectError("motor image of the unit sphere is flat")
    t1 = s1 / nf
    t2 = s2 / nf
    t3 = s3 / nf
    r2 = t1 * t1 + t2 * t2 + t3 * t3 - (s4 + s5) / nf
    if r2 < -1e-9:
        raise ImaginarySphereError(r2)
    d = math.sqrt(max(r2, 0.0))
    if d <= 1e-12:
        raise NotScalingMotorError("decomposed scale factor vanishes")

    # rotor = translator(t)^-1 * M * dilator(d)^-1
    tinv.fill(0.0)
    tinv[0] = 1.0
    h1, h2, h3 = 0.5 * t1, 0.5 * t2, 0.5 * t3
    tinv[_P_E14] = h1
    tinv[_P_E15] = h1
    tinv[_P_E24] = h2
    tinv[_P_E25] = h2
    tinv[_P_E34] = h3
    tinv[_P_E35] = h3
    packed_gp_ee(tinv, tr, ws.rot, s16)
    rot = ws.rot
    if abs(d - 1.0) > 1e-14:
        beta = (1.0 - d) / (1.0 + d)
        aux.fill(0.0)
        aux[0] = 1.0
        aux[_P_E45] = -beta  # inverse dilator up to scale
        packed_gp_ee(rot, aux, ws.ev_a, s16)
        rot = ws.ev_a

    vals = rot[:6].tolist()
    a, b, cc, dd = vals[0], vals[_P_E12], vals[_P_E13], vals[_P_E23]
    rotor2 = a * a + b * b + cc * cc + dd * dd
    total2 = float(np.dot(rot, rot))
    resid2 = max(total2 - rotor2, 0.0)
    if resid2 > (rotor_tol * rotor_tol) * total2:
        raise NotScalingMotorError(
            f"non-rotor residue {math.sqrt(resid2 / total2):.3g} after peeling T and D")

    qn = math.sqrt(rotor2)
    q = np.array([a / qn, -dd / qn, cc / qn, -b / qn])
    return t1, t2, t3, q, d


def extract_trd(m: Motor | Multivector) -> tuple[np.ndarray, np.ndarray, float]:
    """Decompose a scaling motor into (translation, quaternion, scale)."""
    if isinstance(m, Multivector):
        m = Motor.from_multivector(m, tol=1e-6)
    ws = MotorWorkspace.fresh()
    t1, t2, t3, q, d = _extract_tqd_packed(m.coeffs, ws)
    return np.array([t1, t2, t3]), q, d
