from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ppoly.exact_core import MPoly, parse_poly
from ppoly.hull import hull_inequalities, primitive
from ppoly.polytope import (DegenerateChartError, ParamPolytope, Polytope, PolytopeError, cayley_slice, cayley_sum,
                            minkowski_combination, minkowski_sum)

from conftest import small_fractions

TRI = Polytope.from_points([(0, 0), (1, 0), (0, 1)])
SEG = Polytope.from_points([(0, 0), (0, 1)])
SQUARE = Polytope([(-1, 0), (1, 0), (0, -1), (0, 1)], [0, 1, 0, 1])


def test_trapezoid_family_volume(trapezoid_family):
    vol = trapezoid_family.volume_polynomial()
    assert vol == parse_poly("a*b + 1/2*b^2", trapezoid_family.params)
    assert not vol.depends_on("x0") and not vol.depends_on("y0")
    P = trapezoid_family.at({"a": 2, "b": 1, "x0": 0, "y0": 0})
    assert sorted(P.vertices) == [(0, 0), (0, 1), (2, 1), (3, 0)]
    assert P.volume() == F(5, 2)


def test_unit_cube():
    cube = Polytope.from_points([(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)])
    assert cube.volume() == 1
    assert cube.f_vector() == [8, 12, 6, 1]


def test_square_fan():
    fan = SQUARE.normal_fan()
    assert fan.rays == ((-1, 0), (0, -1), (0, 1), (1, 0))
    assert len(fan.maximal_cones()) == 4
    assert SQUARE.f_vector() == [4, 4, 1]
    assert SQUARE.scale(3).normal_fan() == fan


def test_minkowski_triangle_segment():
    Q = minkowski_sum(TRI, SEG)
    assert sorted(Q.vertices) == [(0, 0), (0, 2), (1, 0), (1, 1)]
    assert Q.volume() == F(3, 2)


def test_cayley_triangle_is_fflv():
    D = cayley_sum(TRI, minkowski_sum(TRI, SEG))
    assert len(D.vertices) == 7
    assert D.f_vector() == [7, 11, 6, 1]
    assert D.volume() == 1


def test_lower_dimensional_hull():
    P = Polytope.from_points([(0, 0, 0), (1, 1, 0), (2, 0, 0)])
    assert P.affine_dimension == 2
    assert P.volume() == 0
    assert P.volume(return_flag=True) == (0, True)
    assert Polytope.from_points([(1, 2)]).vertices == [(1, 2)]


def test_errors():
    with pytest.raises(PolytopeError):
        Polytope([(1, 0), (0, 1)], [1, 1]).check()
    with pytest.raises(PolytopeError):
        Polytope([(1, 0), (-1, 0), (0, 1), (0, -1)], [-1, 0, 1, 0]).check()


def test_degenerate_chart():
    # the square pyramid apex sits on four facets; moving one offset breaks it
    p = ("t",)
    fam = ParamPolytope([(0, 0, -1), (1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)],
                        [0, 1, 1, MPoly.var(p, "t"), 1], p, {"t": 1})
    with pytest.raises(DegenerateChartError):
        fam.vertex_chart()


def test_family_json_roundtrip(trapezoid_family):
    again = ParamPolytope.from_json(trapezoid_family.to_json())
    assert again.to_json() == trapezoid_family.to_json()
    assert again.volume_polynomial() == trapezoid_family.volume_polynomial()


def test_support_function(trapezoid_family):
    h = trapezoid_family.support_function((1, 0))
    assert h == parse_poly("a + b + x0", trapezoid_family.params)


point_sets = st.integers(2, 3).flatmap(lambda n: st.lists(
    st.tuples(*[st.integers(-3, 3) for _ in range(n)]), min_size=n + 1, max_size=8, unique=True))


@given(point_sets)
def test_euler_relation(points):
    P = Polytope.from_points(points)
    f = P.f_vector()
    assert sum((-1) ** k * c for k, c in enumerate(f)) == 1


@given(point_sets)
def test_hull_contains_points_and_vertices_are_points(points):
    P = Polytope.from_points(points)
    assert all(P.contains(p) for p in points)
    assert set(P.vertices) <= {tuple(F(x) for x in p) for p in points}
    for a, b in hull_inequalities(points):
        assert tuple(a) == primitive(a)


@given(point_sets)
def test_fan_partition(points):
    P = Polytope.from_points(points)
    if not P.is_full_dimensional():
        return
    fan = P.normal_fan()
    assert len(fan.maximal_cones()) == len(P.vertices)
    assert len(fan.rays) == len(P.facet_map)
    # a generic direction picks out exactly one vertex, hence one maximal cone
    w = (F(1), F(1, 7), F(1, 49))[:P.dim]
    vals = [sum(a * b for a, b in zip(v, w)) for v in P.vertices]
    assert vals.count(max(vals)) == 1


@given(point_sets)
def test_triangulation_volume(points):
    P = Polytope.from_points(points)
    if not P.is_full_dimensional():
        return
    # volume is translation invariant and scales by k^n
    assert P.translate([1] * P.dim).volume() == P.volume()
    assert P.scale(2).volume() == P.volume() * 2 ** P.dim


@given(st.sampled_from([F(0), F(1, 2), F(1)]))
def test_cayley_slice(t):
    P = TRI
    Q = minkowski_sum(TRI, SEG)
    C = cayley_sum(P, Q)
    assert cayley_slice(C, t).same_as(minkowski_combination(P, Q, t, 1 - t))


def test_volume_polynomial_matches_numeric(trapezoid_family):
    vol = trapezoid_family.volume_polynomial()
    for a, b in ((1, 1), (F(1, 2), 3), (5, F(2, 3))):
        pt = {"a": a, "b": b, "x0": 1, "y0": -2}
        assert vol.evaluate(pt) == trapezoid_family.volume(pt)
