import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgakit.algebra import Multivector
from cgakit.motors import (
    FlatObjectError,
    ImaginarySphereError,
    Motor,
    NotScalingMotorError,
    Pose,
    SingularMotorError,
    dilator,
    embed_plane,
    embed_point,
    embed_sphere,
    extract_sphere,
    extract_trd,
    motor_from_pose,
    motor_inverse,
    point_normalize,
    point_to_vec3,
    rotor,
    rotor_to_quat,
    sandwich,
    translator,
)

from oracles import apply_trs, random_unit_quat

Q90Z = np.array([math.sqrt(0.5), 0.0, 0.0, math.sqrt(0.5)])


def random_pose(rng) -> tuple[np.ndarray, np.ndarray, float]:
    t = rng.uniform(-5, 5, size=3)
    q = random_unit_quat(rng)
    s = float(rng.uniform(0.2, 4.0))
    return t, q, s


# --- constructors -----------------------------------------------------------


def test_translator_identity():
    assert translator([0, 0, 0]).isclose(Motor.identity())


def test_translator_table_coefficients():
    m = translator([1.0, 0.0, 0.0]).to_multivector()
    expected = {"1": 1.0, "e14": -0.5, "e15": -0.5}
    for name, want in expected.items():
        assert m[name] == pytest.approx(want)
    nz = {i for i, v in enumerate(m.coeffs) if v != 0.0}
    assert nz == {0, 8, 9}


def test_translator_moves_embedded_point():
    m = translator([2.0, 3.0, -1.0])
    out = sandwich(m, embed_point([1.0, 1.0, 1.0]))
    assert np.allclose(point_to_vec3(out), [3.0, 4.0, 0.0], atol=1e-12)


def test_rotor_identity():
    assert rotor([1, 0, 0, 0]).isclose(Motor.identity())


def test_rotor_90deg_about_z_pins_sign_convention():
    m = rotor(Q90Z)
    out = sandwich(m, embed_point([1.0, 0.0, 0.0]))
    assert np.allclose(point_to_vec3(out), [0.0, 1.0, 0.0], atol=1e-12)


def test_rotor_times_its_reverse_is_one():
    rng = np.random.default_rng(0)
    for _ in range(10):
        r = rotor(random_unit_quat(rng))
        assert (r * r.reverse()).isclose(Motor.identity(), atol=1e-12)


def test_rotor_warns_and_normalizes_on_non_unit_input():
    with pytest.warns(UserWarning):
        r = rotor([2.0, 0.0, 0.0, 0.0])
    assert r.isclose(Motor.identity())
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rotor([1.0 + 1e-8, 0.0, 0.0, 0.0])  # tiny drift: silently renormalized


def test_rotor_matches_quaternion_rotation():
    rng = np.random.default_rng(1)
    for _ in range(50):
        q = random_unit_quat(rng)
        p = rng.uniform(-3, 3, size=3)
        got = point_to_vec3(sandwich(rotor(q), embed_point(p)))
        want = apply_trs([0, 0, 0], q, 1.0, p)
        assert np.allclose(got, want, atol=1e-9)


def test_dilator_identity_and_table_value():
    assert dilator(1.0).isclose(Motor.identity())
    m = dilator(2.0).to_multivector()
    assert m["1"] == pytest.approx(1.0)
    assert m["e45"] == pytest.approx(-1.0 / 3.0)
    assert np.count_nonzero(m.coeffs) == 2


def test_dilator_scales_points():
    out = sandwich(dilator(2.0), embed_point([1.0, 1.0, 0.0]))
    assert np.allclose(point_to_vec3(out), [2.0, 2.0, 0.0], atol=1e-12)


def test_dilator_inverse_matches_closed_form():
    d = 2.0
    inv = motor_inverse(dilator(d)).to_multivector()
    # (1+d)^2/(4d) + (d^2-1)/(4d) e45, here exactly 9/8 + 3/8 e45
    assert inv["1"] == pytest.approx((1 + d) ** 2 / (4 * d))
    assert inv["e45"] == pytest.approx((d * d - 1) / (4 * d))


def test_dilator_rejects_nonpositive():
    for bad in (0.0, -1.0, -0.5):
        with pytest.raises(Exception):
            dilator(bad)


# --- embeddings and sphere extraction ---------------------------------------


def test_embed_sphere_unit_origin_is_minus_e4():
    s = embed_sphere([0.0, 0.0, 0.0], 1.0)
    expected = np.zeros(32)
    expected[4] = -1.0
    assert np.array_equal(s.coeffs, expected)


def test_embed_point_origin_is_e_o():
    from cgakit.algebra import e_o

    assert embed_point([0, 0, 0]).isclose(e_o)


def test_embed_point_unit_x():
    p = embed_point([1.0, 0.0, 0.0])
    assert p["e1"] == pytest.approx(1.0)
    assert p["e4"] == pytest.approx(0.0)
    assert p["e5"] == pytest.approx(1.0)
    assert p["e5"] - p["e4"] == pytest.approx(1.0)


def test_extract_sphere_roundtrips():
    c, r = extract_sphere(embed_sphere([0, 0, 0], 1.0) * -1.0)  # -(-e4) = e4 scaling
    assert np.allclose(c, 0.0) and r == pytest.approx(1.0)
    c, r = extract_sphere(embed_point([1.0, 2.0, 3.0]))
    assert np.allclose(c, [1, 2, 3]) and r == 0.0
    c, r = extract_sphere(2.0 * embed_sphere([1.0, 0.0, 0.0], 0.5))
    assert np.allclose(c, [1, 0, 0]) and r == pytest.approx(0.5)


def test_unit_sphere_radius_is_one_not_sqrt2():
    # regression pinning the embedding-consistent radius formula
    _, r = extract_sphere(embed_sphere([0.0, 0.0, 0.0], 1.0))
    assert r == pytest.approx(1.0, abs=1e-12)
    assert abs(r - math.sqrt(2.0)) > 0.4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_extract_embed_identity(seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(-100, 100, size=3)
    r = float(rng.uniform(0.01, 100.0))
    got_c, got_r = extract_sphere(embed_sphere(c, r))
    assert np.max(np.abs(got_c - c)) < 1e-9 * max(1.0, np.max(np.abs(c)))
    assert abs(got_r - r) < 1e-9 * max(1.0, r)


def test_extract_sphere_zero_radius_exact_cases():
    for c in ([0, 0, 0], [1, 2, 3], [-4, 0.5, 2.25]):
        got_c, got_r = extract_sphere(embed_point(c))
        assert np.allclose(got_c, c)
        assert got_r == 0.0


def test_embed_sphere_rejects_negative_radius():
    with pytest.raises(Exception):
        embed_sphere([0, 0, 0], -1.0)


def test_extract_sphere_rejects_non_grade1():
    from cgakit.algebra import AlgebraError

    with pytest.raises(AlgebraError):
        extract_sphere(Multivector.basis("e12"))
    with pytest.raises(AlgebraError):
        extract_sphere(Multivector.zero())


def test_extract_sphere_flat_error():
    with pytest.raises(FlatObjectError):
        extract_sphere(embed_plane([0, 0, 1], 2.0))


def test_extract_sphere_imaginary_error():
    s = np.zeros(32)
    s[4] = 0.5 - 0.5  # e4
    # sphere at origin with r^2 = -1: e4 coeff = (0-(-1)-1)/2 = 0, e5 = (0+1+1)/2 = 1
    s[4] = 0.0
    s[5] = 1.0
    with pytest.raises(ImaginarySphereError):
        extract_sphere(Multivector(s))


def test_embed_plane_contains_its_points():
    pl = embed_plane([0.0, 0.0, 2.0], 3.0)
    for xy in ([0, 0], [1, 5], [-2, 0.5]):
        p = embed_point([xy[0], xy[1], 3.0])
        assert abs((p | pl).scalar_part) < 1e-12


# --- sandwich and inverses ---------------------------------------------------


def test_sandwich_identity():
    rng = np.random.default_rng(2)
    x = Multivector(rng.normal(size=32))
    assert sandwich(Motor.identity(), x).isclose(x)


def test_sandwich_matches_trs_matrix_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        t, q, s = (rng.uniform(-5, 5, size=3), random_unit_quat(rng),
                   float(rng.uniform(0.2, 4.0)))
        m = translator(t) * rotor(q) * dilator(s)
        p = rng.uniform(-3, 3, size=3)
        got = point_to_vec3(sandwich(m, embed_point(p)))
        want = apply_trs(t, q, s, p)
        rel = np.max(np.abs(got - want)) / max(1.0, np.max(np.abs(want)))
        assert rel < 1e-6


def test_sandwich_with_reverse_gives_same_object_up_to_scale():
    rng = np.random.default_rng(4)
    t, q, s = rng.uniform(-2, 2, size=3), random_unit_quat(rng), 1.7
    m = translator(t) * rotor(q) * dilator(s)
    x = embed_point([0.3, -0.2, 1.1])
    via_inverse = sandwich(m, x)
    mf = m.to_multivector()
    via_reverse = mf * x * mf.reverse()
    a = point_normalize(via_inverse).coeffs
    b = point_normalize(via_reverse).coeffs
    assert np.allclose(a, b, atol=1e-9)


def test_sandwich_composition_law():
    rng = np.random.default_rng(5)
    m1 = translator(rng.normal(size=3)) * rotor(random_unit_quat(rng))
    m2 = rotor(random_unit_quat(rng)) * dilator(1.4)
    x = embed_point(rng.normal(size=3))
    lhs = sandwich(m2, sandwich(m1, x))
    rhs = sandwich(m2 * m1, x)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-9)


def test_sandwich_preserves_null_property():
    rng = np.random.default_rng(6)
    for _ in range(20):
        t, q, s = random_pose(rng)
        m = translator(t) * rotor(q) * dilator(s)
        x = sandwich(m, embed_point(rng.normal(size=3)))
        null = (x * x).scalar_part
        assert abs(null) < 1e-9 * max(1.0, x.norm() ** 2)


def test_singular_motor_rejected():
    with pytest.raises(SingularMotorError):
        motor_inverse(Motor(np.zeros(16)))
    nonversor = Motor.identity() + Motor(np.eye(16)[11])  # 1 + e1234
    with pytest.raises(SingularMotorError):
        motor_inverse(nonversor)


def test_motor_inverse_cases():
    assert motor_inverse(Motor.identity()).isclose(Motor.identity())
    t = np.array([1.0, -2.0, 0.5])
    assert motor_inverse(translator(t)).isclose(translator(-t), atol=1e-12)
    rng = np.random.default_rng(7)
    for _ in range(10):
        tv, q, s = random_pose(rng)
        m = translator(tv) * rotor(q) * dilator(s)
        inv = motor_inverse(m)
        assert (m * inv).isclose(Motor.identity(), atol=1e-9)
        explicit = motor_inverse(dilator(s)) * motor_inverse(rotor(q)) * motor_inverse(translator(tv))
        assert (m * explicit).isclose(Motor.identity(), atol=1e-9)


# --- decomposition ------------------------------------------------------------


def test_extract_trd_identity():
    t, q, d = extract_trd(Motor.identity())
    assert np.allclose(t, 0)
    assert np.allclose(np.abs(q), [1, 0, 0, 0])
    assert d == pytest.approx(1.0)


def test_extract_trd_known_composition():
    m = translator([1.0, 2.0, 3.0]) * rotor(Q90Z) * dilator(2.0)
    t, q, d = extract_trd(m)
    assert np.allclose(t, [1, 2, 3], atol=1e-9)
    assert d == pytest.approx(2.0, abs=1e-9)
    assert min(np.max(np.abs(q - Q90Z)), np.max(np.abs(q + Q90Z))) < 1e-9


def test_extract_trd_pure_dilation():
    t, q, d = extract_trd(dilator(0.5))
    assert np.allclose(t, 0, atol=1e-12)
    assert np.allclose(np.abs(q), [1, 0, 0, 0], atol=1e-12)
    assert d == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_extract_trd_roundtrip(seed):
    rng = np.random.default_rng(seed)
    t, q, s = random_pose(rng)
    m = translator(t) * rotor(q) * dilator(s)
    got_t, got_q, got_d = extract_trd(m)
    assert np.max(np.abs(got_t - t)) < 1e-6 * max(1.0, np.max(np.abs(t)))
    assert abs(got_d - s) < 1e-6 * s
    assert min(np.max(np.abs(got_q - q)), np.max(np.abs(got_q + q))) < 1e-6


def test_extract_trd_scale_invariant():
    rng = np.random.default_rng(8)
    t, q, s = random_pose(rng)
    m = translator(t) * rotor(q) * dilator(s)
    t2, q2, d2 = extract_trd(-3.7 * m)
    assert np.allclose(t2, t, atol=1e-9)
    assert d2 == pytest.approx(s, rel=1e-9)
    assert min(np.max(np.abs(q2 - q)), np.max(np.abs(q2 + q))) < 1e-9


def test_extract_trd_rejects_non_scaling_motor():
    # an even versor that is not of the T*R*D family: rotation in a plane
    # mixing the Euclidean and null directions
    weird = np.zeros(16)
    weird[0] = math.cos(0.3)
    weird[3] = math.sin(0.3)  # e14 generator
    with pytest.raises((NotScalingMotorError, ImaginarySphereError, FlatObjectError)):
        extract_trd(Motor(weird))


def test_rotor_to_quat_roundtrip():
    rng = np.random.default_rng(9)
    for _ in range(20):
        q = random_unit_quat(rng)
        got = rotor_to_quat(rotor(q))
        assert min(np.max(np.abs(got - q)), np.max(np.abs(got + q))) < 1e-12


# --- pose / motor types --------------------------------------------------------


def test_pose_validation():
    with pytest.raises(ValueError):
        Pose([0, 0, 0], [1, 0, 0, 0], scale=0.0)
    with pytest.raises(ValueError):
        Pose([0, 0, np.nan], [1, 0, 0, 0])
    with pytest.warns(UserWarning):
        p = Pose([0, 0, 0], [0.5, 0, 0, 0])
    assert np.allclose(p.rotation, [1, 0, 0, 0])


def test_pose_transform_point_matches_oracle():
    rng = np.random.default_rng(10)
    t, q, s = random_pose(rng)
    pose = Pose(t, q, s)
    p = rng.normal(size=3)
    assert np.allclose(pose.transform_point(p), apply_trs(t, q, s, p), atol=1e-12)


def test_motor_multivector_roundtrip():
    rng = np.random.default_rng(11)
    t, q, s = random_pose(rng)
    m = translator(t) * rotor(q) * dilator(s)
    back = Motor.from_multivector(m.to_multivector())
    assert back.isclose(m)


def test_motor_rejects_odd_content():
    mv = Multivector.basis("e1")
    with pytest.raises(ValueError):
        Motor.from_multivector(mv)


def test_motor_from_pose_matches_product():
    rng = np.random.default_rng(12)
    t, q, s = random_pose(rng)
    assert motor_from_pose(Pose(t, q, s)).isclose(translator(t) * rotor(q) * dilator(s))
