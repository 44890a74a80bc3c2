from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ppoly.exact_core import MPoly, apply_operator, parse_poly
from ppoly.khp_ring import KhpRing
from ppoly.polytope import ParamPolytope, Polytope, cayley_sum, minkowski_sum
from ppoly.pushpull import (TruncationError, TruncationSpec, build_pushpull_family, build_truncation,
                            check_ode, check_star_star, cutoff_volume, extract_q_data, face_coefficient,
                            shift_operator, theorem_data, truncation_family, verify_theorem_main)


def test_empty_truncation_is_hat(square_prism_spec):
    spec = TruncationSpec(square_prism_spec.family, {"a": 1}, [])
    Q = build_truncation(spec).at()
    assert Q.same_as(spec.hat)
    assert extract_q_data(spec).q.is_zero()


def test_vertex_truncation_of_double_triangle(triangle_spec):
    Q = build_truncation(triangle_spec).at()
    assert sorted(Q.vertices) == [(0, 0), (0, 2), (1, 0), (1, 1)]
    tri = Polytope.from_points([(0, 0), (1, 0), (0, 1)])
    assert Q.same_as(minkowski_sum(tri, Polytope.from_points([(0, 0), (0, 1)])))


def test_q_data_vertex_cut(trapezoid_spec):
    qd = extract_q_data(trapezoid_spec)
    assert qd.vol_F == MPoly.const(("a", "b"), 1)
    assert qd.q.to_text() == "1/2*s^2"
    assert face_coefficient(trapezoid_spec, qd) == 1


def test_invalid_specs(trapezoid_spec):
    fam = trapezoid_spec.family
    with pytest.raises(TruncationError):
        TruncationSpec(fam, {"b": 1}, [(1, 3)], depths=[5]).validate()
    with pytest.raises(TruncationError):
        TruncationSpec(fam, {"b": 1}, [(1, 3)], cut_normals=[(0, 1)]).validate()
    with pytest.raises(TruncationError):
        TruncationSpec(fam, {"q": 1}, [])
    with pytest.raises(TruncationError):
        TruncationSpec(fam, {"b": 1}, [(1, 3)], depths=[0])


def test_example_family_volume(trapezoid_spec):
    vol = build_pushpull_family(trapezoid_spec).volume_polynomial()
    assert vol == parse_poly("a*b*s + 1/2*s*b^2 + 1/2*s^2*a + 1/2*s^2*b", ("a", "b", "s"))


def test_theorem_example(trapezoid_spec):
    rep = verify_theorem_main(trapezoid_spec)
    assert rep.passed, rep.dumps()
    assert [c.name for c in rep.checks] == ["operators_exist", "star_star", "bundle_relation",
                                            "relations_lift", "hilbert_doubling"]
    assert rep.data["relation"] == "∂a*∂b - ∂b*∂s + ∂s^2"
    assert rep.data["c2_source"] == "hint"
    assert check_ode(trapezoid_spec)


def test_theorem_without_hint(triangle_spec):
    rep = verify_theorem_main(triangle_spec)
    assert rep.passed
    assert rep.data["c2"] == "∂a^2"
    assert rep.data["hilbert_delta"] == [1, 2, 2, 1]


def test_prism(square_prism_spec):
    rep = verify_theorem_main(square_prism_spec)
    assert rep.passed
    assert rep.data["relation"] == "∂s^2"
    td = theorem_data(square_prism_spec)
    assert td.vol_delta == parse_poly("a*b*s", ("a", "b", "s"))
    assert check_ode(square_prism_spec, td)


def test_star_star_is_blind_to_c2_for_quadratic_q(trapezoid_spec):
    # q = s^2/2 does not depend on the base, so any c2 passes; the bundle relation then decides
    qd = extract_q_data(trapezoid_spec)
    c1 = shift_operator(trapezoid_spec)
    good, bad = parse_poly("a*b", ("a", "b")), parse_poly("2*a*b", ("a", "b"))
    assert check_star_star(trapezoid_spec, qd, c1, good)
    assert check_star_star(trapezoid_spec, qd, c1, bad)
    vol = build_pushpull_family(trapezoid_spec).volume_polynomial()
    v = vol.vars
    s, b = MPoly.var(v, "s"), MPoly.var(v, "b")
    assert apply_operator(s * s - b * s + good.extend(v), vol).is_zero()
    assert not apply_operator(s * s - b * s + bad.extend(v), vol).is_zero()


def test_x_squared_relation_in_ring(trapezoid_spec):
    td = theorem_data(trapezoid_spec)
    R = KhpRing(td.vol_delta)
    x = R.generator("s")
    c1 = R.element(td.c1.extend(R.vars))
    c2 = R.element(td.c2.extend(R.vars))
    assert x * x == c1 * x - c2


def test_fail_fast_stops_early(trapezoid_spec):
    spec = TruncationSpec(trapezoid_spec.family, {"b": 1}, [(1, 3)], depths=[F(1, 2)])
    rep = verify_theorem_main(spec, fail_fast=True)
    assert rep.passed  # depth does not matter for a vertex cut


@given(st.fractions(min_value=F(1, 4), max_value=3, max_denominator=4),
       st.fractions(min_value=F(1, 4), max_value=3, max_denominator=4),
       st.fractions(min_value=F(1, 4), max_value=1, max_denominator=4))
def test_cutoff_volume_identity(a, b, s):
    # vol(P-hat) = vol(Q) + vol(cut-off part) at many points of the chamber
    spec = TruncationSpec(
        ParamPolytope([(-1, 0), (0, -1), (0, 1), (1, 1)],
                      [0, 0, MPoly.var(("a", "b"), "b"), MPoly.linear(("a", "b"), {"a": 1, "b": 1})],
                      ("a", "b"), {"a": 1, "b": 1}), {"b": 1}, [(1, 3)])
    at = {"a": a + 1, "b": b + 1}
    fam = truncation_family(spec)
    hat = spec.family.at(at)
    Q = fam.at({**at, "s": s})
    assert hat.volume() == Q.volume() + cutoff_volume(spec, at, s)


def test_semigroup_and_slice(trapezoid_spec):
    fam = build_pushpull_family(trapezoid_spec)
    A = fam.at({"a": 1, "b": 1, "s": 1})
    B = fam.at({"a": 2, "b": F(1, 2), "s": F(3, 2)})
    C = fam.at({"a": 3, "b": F(3, 2), "s": F(5, 2)})
    assert minkowski_sum(A, B).same_as(C)


def test_s_one_member_is_cayley_sum(trapezoid_spec):
    fam = build_pushpull_family(trapezoid_spec)
    P = trapezoid_spec.family.at()
    Q = build_truncation(trapezoid_spec).at()
    assert fam.at().same_as(cayley_sum(P, Q))


def test_analogy_transport(trapezoid_spec):
    # Delta(P', P' - P + Q) has the same fan as Delta(P, Q)
    fam = build_pushpull_family(trapezoid_spec)
    D1 = fam.at({"a": 1, "b": 1, "s": 1})
    D2 = fam.at({"a": 3, "b": 2, "s": 1})
    assert D1.normal_fan() == D2.normal_fan()


def test_spec_json_roundtrip(trapezoid_spec):
    again = TruncationSpec.from_json(trapezoid_spec.to_json())
    assert again.to_json() == trapezoid_spec.to_json()
    assert verify_theorem_main(again).passed


def test_ample_shift_recorded(trapezoid_spec):
    spec = TruncationSpec(trapezoid_spec.family, {"b": 1}, [(1, 3)], ample_shift={"a": 2})
    rep = verify_theorem_main(spec)
    assert rep.passed
    assert rep.data["ample_shift"] == {"a": "2"}
    assert rep.data["reference"]["a"] == "3"
