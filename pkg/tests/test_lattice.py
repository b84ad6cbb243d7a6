import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shfront.lattice import (
    AXIS_X, AngleSpec, LatticeError, LatticeVector, angle_for_delta, enumerate_lattice, generators,
    hyperbolic_gap, lattice_csv, make_direction, parse_angle, reduce_to_sector, strip_membership,
    symmetry_images, transverse_class,
)

SQ3 = math.sqrt(3.0)


def brute_force_count(kind, radius):
    # independent: float basis vectors, generous index box
    if kind == "hex":
        e1, e2 = (1.0, 0.0), (-0.5, SQ3 / 2)
    else:
        e1, e2 = (1.0, 0.0), (0.0, 1.0)
    m = int(3 * radius) + 2
    n = 0
    for i in range(-m, m + 1):
        for j in range(-m, m + 1):
            x = i * e1[0] + j * e2[0]
            y = i * e1[1] + j * e2[1]
            if x * x + y * y <= radius * radius + 1e-9:
                n += 1
    return n


hex_angles = st.integers(1, 60).flatmap(lambda a: st.tuples(st.just(a), st.integers(0, a)))
square_angles = st.integers(1, 60).flatmap(lambda a: st.tuples(st.just(a), st.integers(0, a - 1)))
small_vectors = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


def test_hex_disc_of_radius_two_has_nineteen_points():
    assert len(enumerate_lattice("hex", 2.0)) == 19


@pytest.mark.parametrize("kind", ["hex", "square"])
@pytest.mark.parametrize("radius", [1.0, 1.5, 2.0, 3.3, 6.0])
def test_enumeration_matches_brute_force(kind, radius):
    assert len(enumerate_lattice(kind, radius)) == brute_force_count(kind, radius)


def test_enumeration_sorted_by_norm():
    pts = enumerate_lattice("hex", 4)
    norms = [g.norm_sq_int for g in pts]
    assert norms == sorted(norms)
    assert pts[0] == LatticeVector(0, 0, "hex")


def test_generators_are_unit_vectors():
    for kind in ("hex", "square"):
        for g in generators(kind):
            assert g.is_critical
            assert math.isclose(g.norm, 1.0)
    k1, k2, k3 = generators("hex")
    s = k1 + k2 + k3
    assert (s.n1, s.n2) == (0, 0)


def test_parse_angle_forms():
    assert parse_angle("0", "hex") == AXIS_X
    assert parse_angle("axis", "square") == AXIS_X
    assert parse_angle("pi/6", "hex") == AngleSpec(1, 1)
    assert parse_angle("cot=2/1", "square") == AngleSpec(2, 1)
    assert parse_angle("4/2", "hex") == AngleSpec(2, 1)


@pytest.mark.parametrize("text,kind", [("0.5", "hex"), ("pi/6", "square"), ("pi/4", "hex"), ("abc", "hex")])
def test_parse_angle_rejects(text, kind):
    with pytest.raises(LatticeError):
        parse_angle(text, kind)


def test_square_diagonal_outside_sector():
    with pytest.raises(LatticeError):
        make_direction("square", parse_angle("pi/4", "square"))


def test_degenerate_directions():
    hx = make_direction("hex", parse_angle("pi/6", "hex"))
    assert hx.degenerate_mode == 2
    assert hx.proj[1] == 0.0
    assert math.isclose(hx.theta, math.pi / 6)
    sq = make_direction("square", AXIS_X)
    assert sq.degenerate_mode == 2
    assert make_direction("hex", AXIS_X).degenerate_mode is None
    assert make_direction("square", AngleSpec(2, 1)).degenerate_mode is None


@given(hex_angles, small_vectors)
def test_norm_splits_into_axial_and_transverse(ab, n):
    d = make_direction("hex", AngleSpec(*ab))
    g = LatticeVector(*n, "hex")
    assert math.isclose(d.axial(g) ** 2 + d.transverse(g) ** 2, g.norm_sq_int, rel_tol=1e-12, abs_tol=1e-12)


@given(square_angles, small_vectors)
def test_norm_split_square(ab, n):
    d = make_direction("square", AngleSpec(*ab))
    g = LatticeVector(*n, "square")
    assert math.isclose(d.axial(g) ** 2 + d.transverse(g) ** 2, g.norm_sq_int, rel_tol=1e-12, abs_tol=1e-12)


@given(hex_angles)
def test_exact_projection_matches_float(ab):
    d = make_direction("hex", AngleSpec(*ab))
    for j in (1, 2, 3):
        assert math.isclose(d.proj_sq(j), d.proj[j - 1] ** 2, rel_tol=1e-12, abs_tol=1e-15)
    assert math.isclose(sum(d.proj_sq(j) for j in (1, 2, 3)), 1.5, rel_tol=1e-14)


@given(hex_angles)
def test_second_mode_weight_formula(ab):
    a, b = ab
    d = make_direction("hex", AngleSpec(a, b))
    if b == 0:
        expected = 1.0
    else:
        r = Fraction(a, b)
        expected = float(3 * (r - 1) ** 2 / (3 * r * r + 1))
    assert math.isclose(4 * d.proj_sq(2), expected, rel_tol=1e-13, abs_tol=1e-15)


@given(hex_angles)
def test_hex_point_group_preserves_projection_multiset(ab):
    ang = AngleSpec(*ab)
    base = sorted(round(abs(p), 12) for p in make_direction("hex", ang).proj)
    for img in symmetry_images("hex", ang):
        # images are direction vectors (sqrt3 a, b); compute projections directly
        x, y = SQ3 * img.a, img.b
        r = math.hypot(x, y)
        projs = sorted(round(abs((x * g.kx + y * g.ky) / r), 12) for g in generators("hex"))
        assert projs == base


@given(hex_angles)
def test_reduce_to_sector_is_identity_inside(ab):
    ang = AngleSpec(*ab)
    assert reduce_to_sector("hex", ang) == ang


def test_reduce_to_sector_maps_outside_direction():
    # (sqrt3 * 1, 3): 60 degrees, equivalent to the x axis
    assert reduce_to_sector("hex", AngleSpec(1, 3)) == AXIS_X


def test_strip_membership_and_tangency():
    d = make_direction("hex", AXIS_X)
    # k2 has transverse component sqrt3/2 < 1
    assert strip_membership(LatticeVector(0, 1, "hex"), d).in_critical_strip
    # (1, 2) = (0, sqrt3): transverse sqrt3 > 1
    assert transverse_class(LatticeVector(1, 2, "hex"), d) == 1
    sq = make_direction("square", AXIS_X)
    assert transverse_class(LatticeVector(0, 1, "square"), sq) == 0


def test_hyperbolic_gap_values():
    assert math.isclose(hyperbolic_gap(make_direction("hex", AXIS_X), 6), SQ3 - 1)
    assert math.isclose(hyperbolic_gap(make_direction("square", AXIS_X), 6), 1.0)


@pytest.mark.parametrize("delta", [0.3, 0.1, 0.03, 0.01])
def test_angle_for_delta_hits_target(delta):
    ang = angle_for_delta(delta)
    d = make_direction("hex", ang)
    assert abs(4 * d.proj_sq(2) - delta) < 0.01 * delta + 1e-3


def test_lattice_csv_header_and_rows():
    text = lattice_csv("hex", 2.0, make_direction("hex", AXIS_X))
    lines = text.strip().splitlines()
    assert lines[0] == "n1,n2,kx,ky,axial,transverse,in_strip"
    assert len(lines) == 20
