"""Dense multivector values and the product kernel for R(4,1).

Two layers live here.  The `Multivector` class is the public value type:
immutable, finite-checked, with operator sugar (`*` geometric product,
`^` outer, `|` inner, `~` reverse).  Below it sit `*_into` kernel functions
that work on raw float64 arrays and accept explicit output/scratch buffers,
so hot paths can run without touching the allocator.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

from . import blades
from .blades import (
    BLADE_COUNT,
    BLADE_NAMES,
    DUAL_GATHER,
    DUAL_GATHER_SIGN,
    EE_W,
    EO_W,
    GP_LEFT,
    GP_SIGN,
    GRADES,
    INDEX_OF_NAME,
    INNER_SIGN,
    OE_W,
    OUTER_SIGN,
    REVERSE_SIGNS,
)

Scalar = Union[int, float, np.floating]


class AlgebraError(ValueError):
    """Contract violation in an algebra-level operation."""


# ---------------------------------------------------------------------------
# raw-array kernel


def _product_into(sign_table: np.ndarray, a: np.ndarray, b: np.ndarray,
                  out: np.ndarray, scratch: np.ndarray) -> np.ndarray:
    np.take(a, GP_LEFT, out=scratch)
    np.multiply(scratch, sign_table, out=scratch)
    np.dot(scratch, b, out=out)
    return out


def gp_into(a, b, out, scratch):
    """Geometric product into `out`; `scratch` is a (32, 32) work array."""
    return _product_into(GP_SIGN, a, b, out, scratch)


def outer_into(a, b, out, scratch):
    return _product_into(OUTER_SIGN, a, b, out, scratch)


def inner_into(a, b, out, scratch):
    return _product_into(INNER_SIGN, a, b, out, scratch)


def reverse_into(a, out):
    return np.multiply(a, REVERSE_SIGNS, out=out)


def dual_into(a, out):
    """Right multiplication by the inverse pseudoscalar (a gather, no product)."""
    np.take(a, DUAL_GATHER, out=out)
    np.multiply(out, DUAL_GATHER_SIGN, out=out)
    return out


def grade_part_into(a, k, out):
    np.multiply(a, GRADES == k, out=out)
    return out


def packed_gp_ee(a16, b16, out16, scratch16):
    """even * even -> even, on 16-slot packed coefficient views."""
    flat = scratch16.reshape(256)
    np.dot(EE_W, a16, out=flat)
    np.dot(scratch16, b16, out=out16)
    return out16


def packed_gp_eo(a16_even, b16_odd, out16_odd, scratch16):
    """even * odd -> odd."""
    flat = scratch16.reshape(256)
    np.dot(EO_W, a16_even, out=flat)
    np.dot(scratch16, b16_odd, out=out16_odd)
    return out16_odd


def packed_gp_oe(a16_odd, b16_even, out16_odd, scratch16):
    """odd * even -> odd."""
    flat = scratch16.reshape(256)
    np.dot(OE_W, a16_odd, out=flat)
    np.dot(scratch16, b16_even, out=out16_odd)
    return out16_odd


def _fresh_scratch() -> np.ndarray:
    return np.empty((BLADE_COUNT, BLADE_COUNT))


# ---------------------------------------------------------------------------
# public value type


def _coerce(value) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (BLADE_COUNT,):
        raise AlgebraError(f"expected {BLADE_COUNT} coefficients, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise AlgebraError("multivector coefficients must be finite")
    return arr


class Multivector:
    """Immutable dense element of the algebra: 32 coefficients in canonical order."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float]):
        arr = _coerce(coeffs).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "_c", arr)

    # construction helpers -------------------------------------------------

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Multivector":
        mv = object.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise AlgebraError("multivector coefficients must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(mv, "_c", arr)
        return mv

    @classmethod
    def zero(cls) -> "Multivector":
        return cls._wrap(np.zeros(BLADE_COUNT))

    @classmethod
    def scalar(cls, value: float) -> "Multivector":
        c = np.zeros(BLADE_COUNT)
        c[0] = value
        return cls._wrap(c)

    @classmethod
    def basis(cls, blade: int | str) -> "Multivector":
        idx = INDEX_OF_NAME[blade] if isinstance(blade, str) else int(blade)
        if not 0 <= idx < BLADE_COUNT:
            raise AlgebraError(f"blade index {idx} out of range")
        c = np.zeros(BLADE_COUNT)
        c[idx] = 1.0
        return cls._wrap(c)

    # accessors -------------------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only view of the 32 coefficients."""
        return self._c

    def __getitem__(self, blade: int | str) -> float:
        idx = INDEX_OF_NAME[blade] if isinstance(blade, str) else int(blade)
        return float(self._c[idx])

    @property
    def scalar_part(self) -> float:
        return float(self._c[0])

    def grades(self, tol: float = 0.0) -> tuple[int, ...]:
        """Grades with any coefficient of magnitude above `tol`."""
        present = []
        for g in range(6):
            if np.any(np.abs(self._c[GRADES == g]) > tol):
                present.append(g)
        return tuple(present)

    # algebra ---------------------------------------------------------------

    def geometric_product(self, other: "Multivector") -> "Multivector":
        return Multivector._wrap(gp_into(self._c, other._c, np.empty(BLADE_COUNT), _fresh_scratch()))

    def outer_product(self, other: "Multivector") -> "Multivector":
        return Multivector._wrap(outer_into(self._c, other._c, np.empty(BLADE_COUNT), _fresh_scratch()))

    def inner_product(self, other: "Multivector") -> "Multivector":
        return Multivector._wrap(inner_into(self._c, other._c, np.empty(BLADE_COUNT), _fresh_scratch()))

    def reverse(self) -> "Multivector":
        return Multivector._wrap(self._c * REVERSE_SIGNS)

    def dual(self) -> "Multivector":
        return Multivector._wrap(dual_into(self._c, np.empty(BLADE_COUNT)))

    def grade_part(self, k: int) -> "Multivector":
        if not 0 <= k <= 5:
            raise AlgebraError(f"grade {k} out of range 0..5")
        return Multivector._wrap(self._c * (GRADES == k))

    def norm(self) -> float:
        """Euclidean coefficient norm (not the metric norm)."""
        return float(np.linalg.norm(self._c))

    # operators -------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return self.geometric_product(other)
        if isinstance(other, (int, float, np.floating)):
            return Multivector._wrap(self._c * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector._wrap(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector._wrap(self._c / float(other))
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multivector):
            return self.outer_product(other)
        return NotImplemented

    def __or__(self, other):
        if isinstance(other, Multivector):
            return self.inner_product(other)
        return NotImplemented

    def __invert__(self):
        return self.reverse()

    def __add__(self, other):
        if isinstance(other, Multivector):
            return Multivector._wrap(self._c + other._c)
        if isinstance(other, (int, float, np.floating)):
            return self + Multivector.scalar(float(other))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Multivector):
            return Multivector._wrap(self._c - other._c)
        if isinstance(other, (int, float, np.floating)):
            return self - Multivector.scalar(float(other))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector.scalar(float(other)) - self
        return NotImplemented

    def __neg__(self):
        return Multivector._wrap(-self._c)

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return bool(np.array_equal(self._c, other._c))
        return NotImplemented

    def __hash__(self):
        return hash(self._c.tobytes())

    def isclose(self, other: "Multivector", atol: float = 1e-12, rtol: float = 1e-9) -> bool:
        return bool(np.allclose(self._c, other._c, atol=atol, rtol=rtol))

    def __repr__(self):
        terms = []
        for i, v in enumerate(self._c):
            if v != 0.0:
                name = BLADE_NAMES[i]
                terms.append(f"{v:g}" if i == 0 else f"{v:g}*{name}")
        return "Multivector(0)" if not terms else "Multivector(" + " + ".join(terms) + ")"


# ---------------------------------------------------------------------------
# named constants

E = tuple(Multivector.basis(i) for i in range(BLADE_COUNT))
e1, e2, e3, e4, e5 = E[1], E[2], E[3], E[4], E[5]

# null basis: origin and infinity
e_o = Multivector._wrap(0.5 * (E[5].coeffs - E[4].coeffs))
e_inf = Multivector._wrap(E[4].coeffs + E[5].coeffs)

pseudoscalar = E[blades.PSEUDOSCALAR]

E_O_COEFFS = e_o.coeffs
E_INF_COEFFS = e_inf.coeffs


# module-level operation aliases matching the functional vocabulary

def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a.geometric_product(b)


def outer_product(a: Multivector, b: Multivector) -> Multivector:
    return a.outer_product(b)


def inner_product(a: Multivector, b: Multivector) -> Multivector:
    return a.inner_product(b)


def reverse(a: Multivector) -> Multivector:
    return a.reverse()


def dual(a: Multivector) -> Multivector:
    return a.dual()


def grade_part(a: Multivector, k: int) -> Multivector:
    return a.grade_part(k)


def add(a: Multivector, b: Multivector) -> Multivector:
    return a + b


def scalar_mul(a: Multivector, s: float) -> Multivector:
    return a * s
