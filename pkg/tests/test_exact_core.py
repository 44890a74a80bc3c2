from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ppoly.exact_core import (LinMap, MPoly, apply_operator, det, inverse, kernel, monomials, parse_poly,
                              poly_det, rank, rat, rref, solve_affine, solve_square)

from conftest import VARS, polys, small_fractions


def test_rat_rejects_floats():
    assert rat("3/4") == F(3, 4)
    assert rat(2) == F(2)
    with pytest.raises(TypeError):
        rat(0.5)


def test_text_format_and_parse():
    p = parse_poly("a*b + 1/2*b^2", ("a", "b"))
    assert p.to_text() == "a*b + 1/2*b^2"
    assert parse_poly("∂a**2 - ∂a*∂b", ("a", "b")).to_text("∂") == "∂a^2 - ∂a*∂b"
    assert parse_poly("0", ("a",)).is_zero()
    with pytest.raises(ValueError):
        parse_poly("q + 1", ("a",))


def test_monomials_descending_lex():
    assert monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(monomials(3, 3)) == 10


def test_diff_and_operator():
    vol = parse_poly("a*b + 1/2*b^2", ("a", "b"))
    assert apply_operator(parse_poly("a^2", ("a", "b")), vol).is_zero()
    assert apply_operator(parse_poly("b^2 - a*b", ("a", "b")), vol).is_zero()
    assert apply_operator(parse_poly("a*b", ("a", "b")), vol) == MPoly.const(("a", "b"), 1)
    with pytest.raises(ValueError):
        apply_operator(MPoly.var(("a",), "a"), vol)


def test_substitute_composes():
    p = parse_poly("x^2*y", ("x", "y"))
    t = ("s", "t")
    img = {"x": parse_poly("s + t", t), "y": parse_poly("2*s", t)}
    q = p.substitute(img, t)
    assert q == parse_poly("2*s^3 + 4*s^2*t + 2*s*t^2", t)


@given(polys(), polys(), st.sampled_from(VARS))
def test_leibniz(p, q, v):
    assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)


@given(polys(max_exp=2), polys(max_exp=2), polys())
def test_operator_composition(d1, d2, p):
    assert apply_operator(d1 * d2, p) == apply_operator(d1, apply_operator(d2, p))
    assert apply_operator(d1 + d2, p) == apply_operator(d1, p) + apply_operator(d2, p)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@given(polys(), st.fixed_dictionaries({v: small_fractions() for v in VARS}))
def test_evaluate_is_homomorphism(p, pt):
    q = p * p + p
    assert q.evaluate(pt) == p.evaluate(pt) ** 2 + p.evaluate(pt)


@given(polys())
def test_json_roundtrip(p):
    assert MPoly.from_json(p.to_json()) == p
    assert parse_poly(p.to_text(), VARS) == p


matrices = st.integers(1, 4).flatmap(lambda n: st.integers(1, 4).flatmap(
    lambda m: st.lists(st.lists(small_fractions(-3, 3, 2), min_size=m, max_size=m), min_size=n, max_size=n)))


@given(matrices)
def test_kernel_is_kernel(rows):
    M = LinMap(rows)
    ker = kernel(M)
    assert len(ker) + rank(rows, M.cols) == M.cols
    for v in ker:
        assert all(x == 0 for x in M @ v)


@given(matrices, st.data())
def test_solve_affine(rows, data):
    M = LinMap(rows)
    x = data.draw(st.lists(small_fractions(), min_size=M.cols, max_size=M.cols))
    rhs = M @ x
    part, ker = solve_affine(M, rhs)
    assert M @ part == rhs


def test_solve_affine_inconsistent():
    assert solve_affine(LinMap([[1, 1], [2, 2]]), [1, 3]) is None


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small_fractions(-3, 3, 2), min_size=n, max_size=n),
                                                   min_size=n, max_size=n)))
def test_det_inverse_consistent(A):
    d = det(A)
    inv = inverse(A)
    if d == 0:
        assert inv is None
        assert rank(A) < len(A)
    else:
        n = len(A)
        prod = [[sum(A[i][k] * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert prod == [[F(int(i == j)) for j in range(n)] for i in range(n)]


def test_poly_det_matches_numeric():
    v = ("a", "b")
    a, b = MPoly.var(v, "a"), MPoly.var(v, "b")
    M = [[a, b, MPoly.const(v, 1)], [b, a + b, a], [MPoly.const(v, 2), a, b]]
    D = poly_det(M, v)
    for pt in ({"a": 1, "b": 2}, {"a": F(1, 3), "b": -1}):
        num = [[e.evaluate(pt) for e in row] for row in M]
        assert D.evaluate(pt) == det(num)


def test_rref_pivots():
    red, piv = rref([[0, 2, 4], [1, 1, 1]], 3)
    assert piv == [0, 1]
    assert red[1] == [0, 1, 2]
