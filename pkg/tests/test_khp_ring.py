from fractions import Fraction as F
from math import factorial

import pytest
from hypothesis import given, strategies as st

from ppoly.exact_core import MPoly, apply_operator, parse_poly
from ppoly.khp_ring import KhpRing, RingClass
from ppoly.polytope import ParamPolytope

V = ("a", "b")
VOL = parse_poly("a*b + 1/2*b^2", V)


@pytest.fixture(scope="module")
def R():
    return KhpRing(VOL)


def test_hilbert_and_annihilator(R):
    assert R.hilbert == [1, 2, 1]
    assert R.total_dimension == 4
    ann = R.annihilator[2]
    assert len(ann) == 2
    span_target = [parse_poly("a^2", V), parse_poly("b^2 - a*b", V)]
    for D in span_target:
        assert R.is_relation(D)
    assert R.annihilator[1] == []
    assert R.presentation() == "Z[∂a,∂b]/(∂a^2, -∂a*∂b + ∂b^2)"


def test_classes_and_socle(R):
    da, db = R.generator("a"), R.generator("b")
    assert da * da == R.zero()
    assert db * db == da * db
    assert R.socle_pairing(da * db) == 1
    assert (da * db).degree() == 2
    assert R.one().degree() == 0
    assert R.class_of_polytope([2, 1]) == 2 * da + db
    with pytest.raises(ValueError):
        R.socle_pairing(da)


def test_solve_for_operator(R):
    part, ker = R.solve_for_operator(MPoly.const(V, 1), 2)
    assert apply_operator(part, VOL) == MPoly.const(V, 1)
    assert len(ker) == 2
    assert R.solve_for_operator(MPoly.var(V, "a"), 2) is None
    part, ker = R.solve_for_operator(MPoly.const(V, 0), 3)
    assert part.is_zero() and len(ker) == 4


def test_non_homogeneous_rejected():
    with pytest.raises(ValueError):
        KhpRing(parse_poly("a*b + a", V))
    with pytest.raises(ValueError):
        KhpRing(MPoly.const(V, 0))


def test_power_pairing_euler(R):
    # (a da + b db)^n applied to a degree-n form gives n! times the form
    coeffs = [MPoly.var(V, "a"), MPoly.var(V, "b")]
    assert R.power_pairing(coeffs) == VOL * factorial(2)


forms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)).filter(lambda e: sum(e) == 3),
                        st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(bool), min_size=1, max_size=5)


@given(forms)
def test_gorenstein_symmetry(terms):
    R = KhpRing(MPoly(("x", "y", "z"), terms))
    assert R.hilbert == R.hilbert[::-1]
    assert R.hilbert[0] == R.hilbert[-1] == 1


@given(forms, st.data())
def test_class_arithmetic(terms, data):
    R = KhpRing(MPoly(("x", "y", "z"), terms))
    ops = [R.element(parse_poly(t, R.vars)) for t in ("x + y", "x*z - 2*y", "z^2 + 1", "y")]
    a, b, c = (data.draw(st.sampled_from(ops)) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(st.lists(st.integers(1, 4), min_size=2, max_size=2))
def test_polytope_ring_is_gorenstein(sizes):
    # rectangles: vol = ab, ring Q[da, db]/(da^2, db^2)
    p = ("a", "b")
    fam = ParamPolytope([(-1, 0), (1, 0), (0, -1), (0, 1)], [0, MPoly.var(p, "a"), 0, MPoly.var(p, "b")],
                        p, dict(zip(p, sizes)))
    R = KhpRing(fam.volume_polynomial())
    assert R.hilbert == [1, 2, 1]
    assert R.is_relation(parse_poly("a^2", p)) and R.is_relation(parse_poly("b^2", p))


def test_report_is_json_ready(R):
    import json
    rep = R.report()
    assert json.loads(json.dumps(rep))["hilbert"] == [1, 2, 1]
    assert rep["integral_socle"] is True


def test_classes_from_different_rings_do_not_mix(R):
    other = KhpRing(VOL)
    with pytest.raises(ValueError):
        R.generator("a") + other.generator("a")
