"""Blade conventions and product tables for the 32-dimensional algebra R(4,1).

Everything downstream (products, involutions, the wire format, the playground
protocol) relies on the single canonical blade ordering fixed here:

* grade-major: grades 0,1,2,3,4,5 in that order,
* lexicographic by ascending basis-vector indices within each grade.

Index 0 is the scalar, 1..5 are e1..e5, 6..15 the bivectors e12,e13,e14,e15,
e23,e24,e25,e34,e35,e45, and so on up to index 31 = e12345.

Metric signature: e1^2 = e2^2 = e3^2 = e4^2 = +1, e5^2 = -1.

Products are table-driven.  For a diagonal, non-degenerate metric the product
of two basis blades is always +/- a single basis blade, and for every output
blade k each right operand j pairs with exactly one left operand i.  The hot
tables below exploit that: out[k] = sum_j SIGN[k, j] * a[LEFT[k, j]] * b[j],
which turns the geometric product into a gather, a multiply, and a 32x32
matrix-vector product.

The dual is right-multiplication by the inverse pseudoscalar (e12345)^-1.
In this metric the pseudoscalar squares to -1, so dual(dual(X)) = -X for
every grade.
"""

from __future__ import annotations

import numpy as np

BLADE_COUNT = 32
VECTOR_COUNT = 5

# squares of e1..e5 under the metric
VECTOR_SQUARES = (1.0, 1.0, 1.0, 1.0, -1.0)


def _vectors_of(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(VECTOR_COUNT) if mask >> i & 1)


def _grade_of(mask: int) -> int:
    return bin(mask).count("1")


# canonical index -> bitmask (bit i set means basis vector e_{i+1} present)
MASKS: tuple[int, ...] = tuple(
    sorted(range(BLADE_COUNT), key=lambda m: (_grade_of(m), _vectors_of(m)))
)
INDEX_OF_MASK: dict[int, int] = {m: i for i, m in enumerate(MASKS)}

GRADES = np.array([_grade_of(m) for m in MASKS], dtype=np.int64)

BLADE_NAMES: tuple[str, ...] = tuple(
    "1" if m == 0 else "e" + "".join(str(i + 1) for i in _vectors_of(m))
    for m in MASKS
)
INDEX_OF_NAME: dict[str, int] = {n: i for i, n in enumerate(BLADE_NAMES)}


def _product_sign(mask_a: int, mask_b: int) -> float:
    """Sign of blade(mask_a) * blade(mask_b) = sign * blade(mask_a ^ mask_b).

    Counts the transpositions needed to interleave the two factor strings,
    then applies one metric factor per contracted vector pair.
    """
    sign = 1.0
    rest = mask_a >> 1
    swaps = 0
    while rest:
        swaps += _grade_of(rest & mask_b)
        rest >>= 1
    if swaps & 1:
        sign = -sign
    common = mask_a & mask_b
    for i in range(VECTOR_COUNT):
        if common >> i & 1:
            sign *= VECTOR_SQUARES[i]
    return sign


def _build_cayley() -> tuple[np.ndarray, np.ndarray]:
    """(index, sign) tables: blade_i * blade_j = sign[i,j] * blade_{index[i,j]}."""
    idx = np.zeros((BLADE_COUNT, BLADE_COUNT), dtype=np.uint8)
    sgn = np.zeros((BLADE_COUNT, BLADE_COUNT), dtype=np.float64)
    for i, mi in enumerate(MASKS):
        for j, mj in enumerate(MASKS):
            idx[i, j] = INDEX_OF_MASK[mi ^ mj]
            sgn[i, j] = _product_sign(mi, mj)
    return idx, sgn


CAYLEY_INDEX, CAYLEY_SIGN = _build_cayley()


def _build_hot_tables() -> tuple[np.ndarray, np.ndarray]:
    """Gather layout: out[k] = sum_j GP_SIGN[k,j] * a[GP_LEFT[k,j]] * b[j]."""
    left = np.zeros((BLADE_COUNT, BLADE_COUNT), dtype=np.intp)
    sign = np.zeros((BLADE_COUNT, BLADE_COUNT), dtype=np.float64)
    for k, mk in enumerate(MASKS):
        for j, mj in enumerate(MASKS):
            mi = mk ^ mj  # unique left operand with blade_i * blade_j ~ blade_k
            left[k, j] = INDEX_OF_MASK[mi]
            sign[k, j] = _product_sign(mi, mj)
    return left, sign


GP_LEFT, GP_SIGN = _build_hot_tables()

# Outer product: only contraction-free pairs survive (grades add exactly).
# Inner product: symmetric grade-lowering contraction, keeping the
# |grade(a) - grade(b)| part of each blade product; on grade-1 operands
# gp = inner + outer holds exactly, which is the contract relied on here.
_GI = GRADES[GP_LEFT]
_GJ = GRADES[np.arange(BLADE_COUNT)][None, :]
_GK = GRADES[:, None]
OUTER_SIGN = np.where(_GK == _GI + _GJ, GP_SIGN, 0.0)
INNER_SIGN = np.where(_GK == np.abs(_GI - _GJ), GP_SIGN, 0.0)

# grade-wise involution signs
REVERSE_SIGNS = np.array([(-1.0) ** (g * (g - 1) // 2) for g in GRADES])

# dual = right multiplication by the inverse pseudoscalar
_PSS = BLADE_COUNT - 1
_PSS_SQUARE = CAYLEY_SIGN[_PSS, _PSS]  # -1 in this metric


def _build_dual() -> tuple[np.ndarray, np.ndarray]:
    perm = np.zeros(BLADE_COUNT, dtype=np.intp)
    sign = np.zeros(BLADE_COUNT, dtype=np.float64)
    for i in range(BLADE_COUNT):
        perm[i] = CAYLEY_INDEX[i, _PSS]
        sign[i] = CAYLEY_SIGN[i, _PSS] / _PSS_SQUARE
    return perm, sign


DUAL_INDEX, DUAL_SIGN = _build_dual()

# scatter layout for applying the dual in place: out[DUAL_INDEX[i]] = DUAL_SIGN[i]*a[i]
DUAL_GATHER = np.zeros(BLADE_COUNT, dtype=np.intp)
DUAL_GATHER[DUAL_INDEX] = np.arange(BLADE_COUNT)
DUAL_GATHER_SIGN = DUAL_SIGN[DUAL_GATHER]

# even (grades 0,2,4) and odd (grades 1,3,5) sub-bases in canonical order;
# the 16 even slots are the motor coefficient layout used on the wire
EVEN_INDICES = np.array([i for i in range(BLADE_COUNT) if GRADES[i] % 2 == 0], dtype=np.intp)
ODD_INDICES = np.array([i for i in range(BLADE_COUNT) if GRADES[i] % 2 == 1], dtype=np.intp)
_EVEN_POS = {int(g): p for p, g in enumerate(EVEN_INDICES)}
_ODD_POS = {int(g): p for p, g in enumerate(ODD_INDICES)}


def _build_packed(out_idx: np.ndarray, rhs_idx: np.ndarray,
                  lhs_pos: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """16x16 gather tables for one parity sector of the product."""
    n = len(out_idx)
    left = np.zeros((n, n), dtype=np.intp)
    sign = np.zeros((n, n), dtype=np.float64)
    for kp, kg in enumerate(out_idx):
        for jp, jg in enumerate(rhs_idx):
            mi = MASKS[kg] ^ MASKS[jg]
            left[kp, jp] = lhs_pos[INDEX_OF_MASK[mi]]
            sign[kp, jp] = _product_sign(mi, MASKS[jg])
    return left, sign


# even*even -> even, even*odd -> odd, odd*even -> odd
EE_LEFT, EE_SIGN = _build_packed(EVEN_INDICES, EVEN_INDICES, _EVEN_POS)
EO_LEFT, EO_SIGN = _build_packed(ODD_INDICES, ODD_INDICES, _EVEN_POS)
OE_LEFT, OE_SIGN = _build_packed(ODD_INDICES, EVEN_INDICES, _ODD_POS)


def _as_matrix_form(left: np.ndarray, sign: np.ndarray) -> np.ndarray:
    """(256, 16) operator so that (W @ a).reshape(16, 16) @ b is the product.

    Two BLAS matrix-vector products beat the gather/multiply/dot sequence on
    these sizes, and the (16, 16) intermediate reuses the caller's scratch.
    """
    w = np.zeros((256, 16))
    for k in range(16):
        for j in range(16):
            w[k * 16 + j, left[k, j]] = sign[k, j]
    return np.ascontiguousarray(w)


EE_W = _as_matrix_form(EE_LEFT, EE_SIGN)
EO_W = _as_matrix_form(EO_LEFT, EO_SIGN)
OE_W = _as_matrix_form(OE_LEFT, OE_SIGN)

REVERSE_SIGNS_EVEN = REVERSE_SIGNS[EVEN_INDICES]
REVERSE_SIGNS_ODD = REVERSE_SIGNS[ODD_INDICES]

# scalar part of blade * ~blade per even slot; versor_norm_sq of an even
# element M is sum_i VERSOR_EPS_EVEN[i] * m_i^2 == scalar part of M * ~M
VERSOR_EPS_EVEN = np.array(
    [CAYLEY_SIGN[g, g] * REVERSE_SIGNS[g] for g in EVEN_INDICES], dtype=np.float64
)

# positions of frequently used blades
SCALAR = 0
E1, E2, E3, E4, E5 = 1, 2, 3, 4, 5
E12 = INDEX_OF_NAME["e12"]
E13 = INDEX_OF_NAME["e13"]
E14 = INDEX_OF_NAME["e14"]
E15 = INDEX_OF_NAME["e15"]
E23 = INDEX_OF_NAME["e23"]
E24 = INDEX_OF_NAME["e24"]
E25 = INDEX_OF_NAME["e25"]
E34 = INDEX_OF_NAME["e34"]
E35 = INDEX_OF_NAME["e35"]
E45 = INDEX_OF_NAME["e45"]
PSEUDOSCALAR = _PSS

# even-sector positions of the motor-relevant blades
EVEN_POS = {int(g): p for p, g in enumerate(EVEN_INDICES)}
ODD_POS = {int(g): p for p, g in enumerate(ODD_INDICES)}


def cayley_table_text() -> str:
    """Human-readable dump of the full blade product table."""
    width = max(len(n) for n in BLADE_NAMES) + 1
    lines = ["# blade products: row * column = entry", ""]
    header = " " * width + "".join(f"{n:>{width + 1}}" for n in BLADE_NAMES)
    lines.append(header)
    for i in range(BLADE_COUNT):
        cells = []
        for j in range(BLADE_COUNT):
            s = CAYLEY_SIGN[i, j]
            name = BLADE_NAMES[CAYLEY_INDEX[i, j]]
            cells.append(f"{'-' if s < 0 else '+'}{name}")
        lines.append(f"{BLADE_NAMES[i]:<{width}}" + "".join(f"{c:>{width + 1}}" for c in cells))
    return "\n".join(lines) + "\n"
