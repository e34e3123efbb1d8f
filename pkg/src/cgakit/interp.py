"""Pose interpolation through motor space.

The pipeline: reduce each input pose to the dilation-free motor TR plus its
scale factor, blend TR coefficients linearly per alpha, re-extract translation
and rotation from the blend, and interpolate the scale factor separately and
linearly.  Blending whole motors instead would couple the dilator into the
blend nonlinearly; blending the scale on its own keeps it exactly linear.

Two drivers share the same arithmetic core and differ only in where their
working buffers come from: `InterpolationContext` holds pool-backed buffers
for the lifetime of the pose pair (zero steady-state reservations), while
`FreshInterpolator` builds new buffers on every call and counts them, serving
as the unpooled baseline in benchmarks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import packed_gp_ee, packed_gp_eo, packed_gp_oe
from .blades import REVERSE_SIGNS_EVEN, VERSOR_EPS_EVEN
from .motors import (
    GeometryError,
    Motor,
    MotorWorkspace,
    Pose,
    _dilator_into,
    _extract_tqd_packed,
    _rotor_into,
    _translator_into,
    dilator,
    embed_point_packed_into,
    extract_trd,
    motor_inverse,
    rotor,
    translator,
)
from .pool import AllocationMeter, MultivectorPool

_P_E45 = 10  # packed even position of e45


class DegenerateInterpolantError(GeometryError):
    """Blended motor collapsed to (numerically) zero versor norm."""


@dataclass
class PreprocessedPose:
    """Dilation-free motor plus scale factor, ready for blending."""

    tr: Motor
    scale: float
    source: str = "given-as-pose"

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"scale must be positive, got {self.scale}")


def _unit_versor(m: Motor) -> Motor:
    n2 = m.versor_norm_sq()
    if not n2 > 1e-18:
        raise DegenerateInterpolantError(f"versor norm^2 = {n2:g}")
    return m * (1.0 / math.sqrt(n2))


def preprocess(value) -> PreprocessedPose:
    """Reduce a pose given in any accepted form to (TR, scale).

    Accepts a `Pose`, a single `Motor` (decomposed via the unit-sphere trick),
    or a (T, R, D) triple of motors.
    """
    if isinstance(value, PreprocessedPose):
        return value
    if isinstance(value, Pose):
        tr = translator(value.translation) * rotor(value.rotation)
        return PreprocessedPose(_unit_versor(tr), value.scale, "given-as-pose")
    if isinstance(value, Motor):
        _, _, d = extract_trd(value)
        tr = value * motor_inverse(dilator(d))
        return PreprocessedPose(_unit_versor(tr), d, "given-as-motor")
    if isinstance(value, (tuple, list)) and len(value) == 3:
        t, r, d_motor = value
        if not all(isinstance(m, Motor) for m in value):
            raise TypeError("triple input must contain three motors")
        beta = d_motor.coeffs[_P_E45] / d_motor.coeffs[0]
        scale = (1.0 - beta) / (1.0 + beta)
        return PreprocessedPose(_unit_versor(t * r), scale, "given-as-TRD")
    raise TypeError(f"cannot preprocess {type(value).__name__}")


def _aligned_sign(tr_a16: np.ndarray, tr_b16: np.ndarray) -> float:
    """-1 when the two motors sit on opposite sheets (scalar of A * ~B < 0)."""
    dot = float(np.dot(tr_a16 * tr_b16, VERSOR_EPS_EVEN))
    return -1.0 if dot < 0.0 else 1.0


def _clamped_alpha(alpha: float) -> float:
    if alpha < 0.0 or alpha > 1.0:
        warnings.warn(f"alpha {alpha:g} outside [0, 1]; clamping", stacklevel=3)
        return min(max(alpha, 0.0), 1.0)
    return alpha


def _blend_and_extract(tr_a16, tr_b16, s_a, s_b, alpha, ws):
    """Shared arithmetic: lerp the TR motors, decompose, lerp the scale."""
    np.multiply(tr_a16, 1.0 - alpha, out=ws.ev_b)
    np.multiply(tr_b16, alpha, out=ws.aux)
    ws.ev_b += ws.aux
    try:
        # a blend of two motors is not itself an exact motor; the relaxed
        # rotor tolerance lets the extraction project onto the rotor part
        # while still catching outright collapse
        t1, t2, t3, q, d = _extract_tqd_packed(ws.ev_b, ws, rotor_tol=0.5)
    except GeometryError as exc:
        raise DegenerateInterpolantError(str(exc)) from exc
    if abs(d - 1.0) > 0.05:
        warnings.warn(
            f"blended motor drifted from unit scale (d = {d:.6g}); poses may be too far apart",
            stacklevel=4)
    s = (1.0 - alpha) * s_a + alpha * s_b
    return t1, t2, t3, q, s


def _apply_pose_packed(t1, t2, t3, q, s, point, ws) -> np.ndarray:
    """Image of `point` under translator*rotor*dilator built in the workspace."""
    _translator_into(ws.tinv, t1, t2, t3)
    _rotor_into(ws.aux, q)
    packed_gp_ee(ws.tinv, ws.aux, ws.ev_a, ws.s16)
    _dilator_into(ws.tinv, s)
    packed_gp_ee(ws.ev_a, ws.tinv, ws.tr, ws.s16)
    np.multiply(ws.tr, REVERSE_SIGNS_EVEN, out=ws.rev)
    embed_point_packed_into(point, ws.odd_a)
    packed_gp_eo(ws.tr, ws.odd_a, ws.odd_b, ws.s16)
    packed_gp_oe(ws.odd_b, ws.rev, ws.odd_a, ws.s16)
    nf = ws.odd_a[4] - ws.odd_a[3]
    return np.array([ws.odd_a[0] / nf, ws.odd_a[1] / nf, ws.odd_a[2] / nf])


class InterpolationContext:
    """Pool-backed interpolation state for one pose pair.

    Preprocessing happens once per bound pose; every `interpolate` call after
    construction works entirely inside buffers acquired up front, so the pool
    allocation counter stays put across frames.
    """

    def __init__(self, pose_a, pose_b, pool: MultivectorPool | None = None,
                 align_signs: bool = True):
        self._pool = pool if pool is not None else MultivectorPool()
        self._ws = MotorWorkspace.pooled(self._pool)
        self._buf_a = self._pool.acquire()
        self._buf_b = self._pool.acquire()
        self._tr_a = self._buf_a[:16]
        self._tr_b = self._buf_b[:16]
        self._align = align_signs
        self._s_a = 1.0
        self._s_b = 1.0
        self._closed = False
        pre_a = preprocess(pose_a)
        pre_b = preprocess(pose_b)
        np.copyto(self._tr_a, pre_a.tr.coeffs)
        np.copyto(self._tr_b, pre_b.tr.coeffs)
        self._s_a = pre_a.scale
        self._s_b = pre_b.scale
        self._align_now()

    def _align_now(self):
        if self._align and _aligned_sign(self._tr_a, self._tr_b) < 0:
            np.negative(self._tr_b, out=self._tr_b)

    @property
    def pool(self) -> MultivectorPool:
        return self._pool

    @property
    def poses(self) -> tuple[PreprocessedPose, PreprocessedPose]:
        return (PreprocessedPose(Motor(self._tr_a.copy()), self._s_a),
                PreprocessedPose(Motor(self._tr_b.copy()), self._s_b))

    def rebind(self, pose_a=None, pose_b=None):
        """Replace one or both endpoints without new reservations for pooled state."""
        if pose_a is not None:
            pre = preprocess(pose_a)
            np.copyto(self._tr_a, pre.tr.coeffs)
            self._s_a = pre.scale
        if pose_b is not None:
            pre = preprocess(pose_b)
            np.copyto(self._tr_b, pre.tr.coeffs)
            self._s_b = pre.scale
        self._align_now()

    def advance(self, next_pose):
        """Shift: the old end pose becomes the start, `next_pose` the new end."""
        np.copyto(self._tr_a, self._tr_b)
        self._s_a = self._s_b
        pre = preprocess(next_pose)
        np.copyto(self._tr_b, pre.tr.coeffs)
        self._s_b = pre.scale
        self._align_now()

    def interpolate(self, alpha: float) -> Pose:
        alpha = _clamped_alpha(alpha)
        t1, t2, t3, q, s = _blend_and_extract(
            self._tr_a, self._tr_b, self._s_a, self._s_b, alpha, self._ws)
        return Pose._fast(np.array([t1, t2, t3]), q, s)

    def apply_interpolated(self, alpha: float, point) -> np.ndarray:
        alpha = _clamped_alpha(alpha)
        ws = self._ws
        t1, t2, t3, q, s = _blend_and_extract(
            self._tr_a, self._tr_b, self._s_a, self._s_b, alpha, ws)
        return _apply_pose_packed(t1, t2, t3, q, s, np.asarray(point, dtype=np.float64), ws)

    def close(self):
        if not self._closed:
            self._ws.release()
            self._pool.release(self._buf_a)
            self._pool.release(self._buf_b)
            self._closed = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class FreshInterpolator:
    """Same arithmetic as `InterpolationContext`, fresh buffers every call.

    The allocation meter records each buffer creation; benchmarks use this as
    the no-pooling baseline.
    """

    def __init__(self, pose_a, pose_b, meter: AllocationMeter | None = None,
                 align_signs: bool = True):
        self.meter = meter if meter is not None else AllocationMeter()
        self._align = align_signs
        pre_a = preprocess(pose_a)
        pre_b = preprocess(pose_b)
        self._tr_a = pre_a.tr.coeffs.copy()
        self._tr_b = pre_b.tr.coeffs.copy()
        self._s_a = pre_a.scale
        self._s_b = pre_b.scale
        self._align_now()

    def _align_now(self):
        if self._align and _aligned_sign(self._tr_a, self._tr_b) < 0:
            self._tr_b = -self._tr_b

    def advance(self, next_pose):
        pre = preprocess(next_pose)
        self.meter.count += 2  # endpoint coefficient arrays are rebuilt, not reused
        self._tr_a = self._tr_b
        self._s_a = self._s_b
        self._tr_b = pre.tr.coeffs.copy()
        self._s_b = pre.scale
        self._align_now()

    def interpolate(self, alpha: float) -> Pose:
        alpha = _clamped_alpha(alpha)
        ws = MotorWorkspace.fresh(self.meter)
        t1, t2, t3, q, s = _blend_and_extract(
            self._tr_a, self._tr_b, self._s_a, self._s_b, alpha, ws)
        return Pose._fast(np.array([t1, t2, t3]), q, s)

    def apply_interpolated(self, alpha: float, point) -> np.ndarray:
        alpha = _clamped_alpha(alpha)
        ws = MotorWorkspace.fresh(self.meter)
        t1, t2, t3, q, s = _blend_and_extract(
            self._tr_a, self._tr_b, self._s_a, self._s_b, alpha, ws)
        return _apply_pose_packed(t1, t2, t3, q, s, np.asarray(point, dtype=np.float64), ws)

    def close(self):
        pass


def interpolate(ctx, alpha: float) -> Pose:
    return ctx.interpolate(alpha)


def apply_interpolated(ctx, alpha: float, point) -> np.ndarray:
    return ctx.apply_interpolated(alpha, point)


# ---------------------------------------------------------------------------
# conventional pipeline (lerp + slerp + lerp), the comparison baseline


def slerp(q_a: np.ndarray, q_b: np.ndarray, alpha: float) -> np.ndarray:
    """Shortest-path spherical interpolation of unit quaternions (w,x,y,z)."""
    dot = float(np.dot(q_a, q_b))
    if dot < 0.0:
        q_b = -q_b
        dot = -dot
    if dot > 1.0 - 1e-10:
        out = (1.0 - alpha) * q_a + alpha * q_b
        return out / np.linalg.norm(out)
    theta = math.acos(min(dot, 1.0))
    sin_t = math.sin(theta)
    out = (math.sin((1.0 - alpha) * theta) * q_a + math.sin(alpha * theta) * q_b) / sin_t
    return out / np.linalg.norm(out)


def conventional_interpolate(pose_a: Pose, pose_b: Pose, alpha: float) -> Pose:
    """Translation lerp, quaternion slerp, scale lerp."""
    alpha = _clamped_alpha(alpha)
    t = (1.0 - alpha) * pose_a.translation + alpha * pose_b.translation
    q = slerp(pose_a.rotation, pose_b.rotation, alpha)
    s = (1.0 - alpha) * pose_a.scale + alpha * pose_b.scale
    return Pose._fast(t, q, s)
