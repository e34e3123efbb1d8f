"""Classification of blades into renderable geometric entities.

Decision tree (x is numerically a single-grade blade; everything else is
`unknown`):

* grade 1: direct round/flat split.  Vanishing e5-e4 content means a plane,
  otherwise a sphere whose squared radius decides sphere / point / imaginary.
* grade 4: dual down to grade 1 (same object, other representation).
* grade 2: a wedge with e_inf that vanishes marks a flat point; a vanishing
  e_inf contraction marks a line (two-plane intersection form); remaining
  rounds split on the sign of the metric square: circles carry positive
  (X ~X)_0, point pairs negative, and the point-pair reading must additionally
  produce two null endpoints, otherwise the object is an imaginary circle
  (e.g. the wedge of two disjoint spheres).
* grade 3: dual down to grade 2.

Every successful classification re-embeds its parameters through the matching
construction and accepts only if the result reproduces the input up to a
nonzero scalar (1e-6 relative), which doubles as the numeric blade test.
Scale factors, including negative ones, never change the outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import Multivector, e_inf
from .blades import BLADE_COUNT, GRADES, INDEX_OF_NAME
from .motors import embed_plane, embed_point, point_normalize

REL_TOL = 1e-6

_E14, _E24, _E34 = INDEX_OF_NAME["e14"], INDEX_OF_NAME["e24"], INDEX_OF_NAME["e34"]
_E15, _E25, _E35 = INDEX_OF_NAME["e15"], INDEX_OF_NAME["e25"], INDEX_OF_NAME["e35"]
_E45 = INDEX_OF_NAME["e45"]
_E145, _E245, _E345 = INDEX_OF_NAME["e145"], INDEX_OF_NAME["e245"], INDEX_OF_NAME["e345"]
_E124, _E134, _E234 = INDEX_OF_NAME["e124"], INDEX_OF_NAME["e134"], INDEX_OF_NAME["e234"]


class Kind(str, Enum):
    POINT = "point"
    SPHERE = "sphere"
    PLANE = "plane"
    LINE = "line"
    CIRCLE = "circle"
    POINT_PAIR = "point_pair"
    IMAGINARY = "imaginary"  # real blade, negative squared radius
    UNKNOWN = "unknown"


@dataclass
class GeometricObject:
    raw: Multivector
    kind: Kind
    params: dict
    grade: int

    def reembed(self) -> Multivector | None:
        """Rebuild a multivector from the parameters via the matching construction."""
        return _reembed(self.kind, self.params, self.grade)


def _maxabs(x: Multivector) -> float:
    return float(np.max(np.abs(x.coeffs)))


def _dominant_grade(x: Multivector) -> int | None:
    c = np.abs(x.coeffs)
    scale = float(c.max())
    if scale == 0.0:
        return None
    present = [g for g in range(6) if c[GRADES == g].max() > REL_TOL * scale]
    if len(present) != 1:
        return None
    return present[0]


def _canonical_sign(vec: np.ndarray) -> float:
    for v in vec:
        if abs(v) > 1e-9:
            return 1.0 if v > 0 else -1.0
    return 1.0


def _matches(raw: Multivector, candidate: Multivector | None) -> bool:
    """True when candidate equals raw up to a nonzero scalar, 1e-6 relative."""
    if candidate is None:
        return False
    a = raw.coeffs / _maxabs(raw)
    nc = _maxabs(candidate)
    if nc == 0.0:
        return False
    b = candidate.coeffs / nc
    return bool(np.max(np.abs(a - b)) < REL_TOL or np.max(np.abs(a + b)) < REL_TOL)


def _embed_round(center: np.ndarray, radius_sq: float) -> Multivector:
    # like embed_sphere but accepts a negative squared radius
    u = float(center @ center) - radius_sq
    c = np.zeros(BLADE_COUNT)
    c[1:4] = center
    c[4] = 0.5 * (u - 1.0)
    c[5] = 0.5 * (u + 1.0)
    return Multivector(c)


def _embed_circle_ipns(center: np.ndarray, radius_sq: float, normal: np.ndarray) -> Multivector:
    sphere = _embed_round(center, radius_sq)
    plane = embed_plane(normal, float(center @ (normal / np.linalg.norm(normal))))
    return sphere ^ plane


def _reembed(kind: Kind, params: dict, grade: int) -> Multivector | None:
    if kind in (Kind.UNKNOWN,):
        return None
    if kind == Kind.POINT:
        p = embed_point(params["center"])
        if grade == 1:
            return p
        if grade == 2 and params.get("flat"):
            return p ^ e_inf
        if grade == 2:
            return _embed_circle_ipns(np.asarray(params["center"], float), 0.0,
                                      np.asarray(params["normal"], float))
        if grade == 4:
            return p.dual()
    if kind == Kind.SPHERE or (kind == Kind.IMAGINARY and "normal" not in params):
        s = _embed_round(np.asarray(params["center"], float), params["radius_sq"])
        return s.dual() if grade == 4 else s
    if kind == Kind.PLANE:
        pl = embed_plane(params["normal"], params["offset"])
        return pl.dual() if grade == 4 else pl
    if kind == Kind.LINE:
        p = np.asarray(params["point"], float)
        u = np.asarray(params["direction"], float)
        line = embed_point(p) ^ embed_point(p + u) ^ e_inf
        return line.dual() if grade == 2 else line
    if kind == Kind.CIRCLE or (kind == Kind.IMAGINARY and "normal" in params):
        circ = _embed_circle_ipns(np.asarray(params["center"], float),
                                  params["radius_sq"], np.asarray(params["normal"], float))
        return circ.dual() if grade == 3 else circ
    if kind == Kind.POINT_PAIR:
        pp = embed_point(params["points"][0]) ^ embed_point(params["points"][1])
        return pp.dual() if grade == 3 else pp
    return None


def _accept(raw: Multivector, kind: Kind, params: dict, grade: int) -> GeometricObject:
    obj = GeometricObject(raw, kind, params, grade)
    if _matches(raw, obj.reembed()):
        return obj
    return GeometricObject(raw, Kind.UNKNOWN, {}, grade)


def _unknown(raw: Multivector) -> GeometricObject:
    g = _dominant_grade(raw)
    return GeometricObject(raw, Kind.UNKNOWN, {}, -1 if g is None else g)


def _classify_grade1(raw: Multivector, v: Multivector, grade: int) -> GeometricObject:
    c = v.coeffs
    scale = _maxabs(v)
    nf = c[5] - c[4]
    if abs(nf) <= REL_TOL * scale:
        n = c[1:4].copy()
        ln = float(np.linalg.norm(n))
        if ln <= REL_TOL * scale:
            return _unknown(raw)
        sign = _canonical_sign(n / ln)
        params = {"normal": sign * n / ln, "offset": sign * float(c[4]) / ln}
        return _accept(raw, Kind.PLANE, params, grade)
    center = c[1:4] / nf
    r2 = float(center @ center) - (c[4] + c[5]) / nf
    r2_tol = 1e-8 * max(1.0, float(center @ center))
    if r2 > r2_tol:
        return _accept(raw, Kind.SPHERE,
                       {"center": center, "radius": math.sqrt(r2), "radius_sq": r2}, grade)
    if r2 < -r2_tol:
        return _accept(raw, Kind.IMAGINARY, {"center": center, "radius_sq": r2}, grade)
    return _accept(raw, Kind.POINT, {"center": center}, grade)


def _line_params_from_opns(line3: Multivector) -> dict | None:
    c = line3.coeffs
    u = np.array([c[_E145], c[_E245], c[_E345]])
    lu = float(np.linalg.norm(u))
    if lu <= REL_TOL * _maxabs(line3):
        return None
    # moment bivector e12,e13,e23 slots pair with e4 and e5; m = x1 cross x2
    m = np.array([c[_E234], -c[_E134], c[_E124]])
    point = np.cross(u, m) / (lu * lu)
    sign = _canonical_sign(u / lu)
    return {"point": point, "direction": sign * u / lu}


def _classify_grade2(raw: Multivector, b: Multivector, grade: int) -> GeometricObject:
    scale = _maxabs(b)
    tol = REL_TOL * scale
    inf_wedge = e_inf ^ b
    if _maxabs(inf_wedge) <= tol:
        # flat point p ^ e_inf
        c = b.coeffs
        s = -c[_E45]
        if abs(s) <= tol:
            return _unknown(raw)
        p = np.array([c[_E14], c[_E24], c[_E34]]) / s
        p_alt = np.array([c[_E15], c[_E25], c[_E35]]) / s
        if np.max(np.abs(p - p_alt)) > REL_TOL * max(1.0, float(np.max(np.abs(p)))):
            return _unknown(raw)
        return _accept(raw, Kind.POINT, {"center": p, "flat": True}, grade)

    contraction = e_inf | b
    if _maxabs(contraction) <= tol:
        # two-plane intersection: a line
        opns = raw if grade == 3 else b.dual()
        params = _line_params_from_opns(opns)
        if params is None:
            return _unknown(raw)
        return _accept(raw, Kind.LINE, params, grade)

    # rounds: center from the reflection of infinity in the blade
    try:
        center = point_normalize(b * e_inf * b).coeffs[1:4].copy()
    except Exception:
        return _unknown(raw)
    num = (b * b.reverse()).scalar_part
    den = (contraction * contraction.reverse()).scalar_part
    if den <= 0.0 or abs(num) <= REL_TOL * scale * scale:
        # vanishing square: zero-radius round (a tangent point)
        normal = _plane_normal(contraction)
        if normal is None:
            return _unknown(raw)
        return _accept(raw, Kind.POINT,
                       {"center": center, "normal": normal["normal"]}, grade)
    r2 = num / den
    normal = _plane_normal(contraction)
    if r2 > 0.0:
        if normal is None:
            return _unknown(raw)
        return _accept(raw, Kind.CIRCLE,
                       {"center": center, "radius": math.sqrt(r2), "radius_sq": r2,
                        "normal": normal["normal"]}, grade)
    # negative metric square: a real point pair, or an imaginary circle
    s = math.sqrt(-num)
    v_sq = (contraction * contraction).scalar_part
    if v_sq > 0.0:
        vinv = contraction * (1.0 / v_sq)
        ends = []
        for sgn in (1.0, -1.0):
            cand = (b + Multivector.scalar(sgn * s)) * vinv
            null = abs((cand * cand).scalar_part)
            nf = cand["e5"] - cand["e4"]
            if null < REL_TOL * max(1.0, cand.norm() ** 2) and abs(nf) > REL_TOL * cand.norm():
                ends.append(cand.coeffs[1:4] / nf)
        if len(ends) == 2:
            ends.sort(key=tuple)
            obj = _accept(raw, Kind.POINT_PAIR, {"points": [ends[0], ends[1]]}, grade)
            if obj.kind is Kind.POINT_PAIR:
                return obj
    if normal is None:
        return _unknown(raw)
    return _accept(raw, Kind.IMAGINARY,
                   {"center": center, "radius_sq": r2, "normal": normal["normal"]}, grade)


def _plane_normal(v: Multivector) -> dict | None:
    n = v.coeffs[1:4].copy()
    ln = float(np.linalg.norm(n))
    if ln <= REL_TOL * max(_maxabs(v), 1e-300):
        return None
    sign = _canonical_sign(n / ln)
    return {"normal": sign * n / ln}


def classify(x: Multivector) -> GeometricObject:
    """Classify a blade of grade 1..4; non-blades come back as `unknown`."""
    grade = _dominant_grade(x)
    if grade is None or grade in (0, 5):
        return _unknown(x)
    if grade == 1:
        return _classify_grade1(x, x, 1)
    if grade == 4:
        return _classify_grade1(x, x.dual(), 4)
    if grade == 2:
        return _classify_grade2(x, x, 2)
    return _classify_grade2(x, x.dual(), 3)
