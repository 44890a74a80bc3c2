from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

settings.register_profile("exact", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("exact")

VARS = ("x", "y", "z")


def small_fractions(lo=-4, hi=4, den=4):
    return st.fractions(min_value=lo, max_value=hi, max_denominator=den)


@st.composite
def polys(draw, variables=VARS, max_terms=4, max_exp=3):
    from ppoly.exact_core import MPoly
    terms = draw(st.dictionaries(
        st.tuples(*[st.integers(0, max_exp) for _ in variables]),
        small_fractions(), max_size=max_terms))
    return MPoly(variables, terms)


@pytest.fixture(scope="session")
def tower():
    from ppoly.bott_samelson import build_tower_12132
    return build_tower_12132()


@pytest.fixture(scope="session")
def trapezoid_family():
    from ppoly.exact_core import MPoly
    from ppoly.polytope import ParamPolytope
    p = ("a", "b", "x0", "y0")
    x0, y0 = MPoly.var(p, "x0"), MPoly.var(p, "y0")
    # 0 <= x - x0, 0 <= y - y0 <= b, (x - x0) + (y - y0) <= a + b
    return ParamPolytope(
        [(-1, 0), (0, -1), (0, 1), (1, 1)],
        [-x0, -y0, MPoly.var(p, "b") + y0, MPoly.linear(p, {"a": 1, "b": 1, "x0": 1, "y0": 1})],
        p, {"a": 1, "b": 1, "x0": 0, "y0": 0})


@pytest.fixture(scope="session")
def trapezoid_spec():
    from ppoly.exact_core import MPoly
    from ppoly.polytope import ParamPolytope
    from ppoly.pushpull import TruncationSpec
    p = ("a", "b")
    fam = ParamPolytope([(-1, 0), (0, -1), (0, 1), (1, 1)],
                        [0, 0, MPoly.var(p, "b"), MPoly.linear(p, {"a": 1, "b": 1})], p, {"a": 1, "b": 1})
    return TruncationSpec(fam, {"b": 1}, [(1, 3)], d_f_hint="∂a*∂b")


@pytest.fixture(scope="session")
def square_prism_spec():
    from ppoly.exact_core import MPoly
    from ppoly.polytope import ParamPolytope
    from ppoly.pushpull import TruncationSpec
    p = ("a", "b")
    fam = ParamPolytope([(-1, 0), (1, 0), (0, -1), (0, 1)],
                        [0, MPoly.var(p, "a"), 0, MPoly.var(p, "b")], p, {"a": 1, "b": 1})
    return TruncationSpec(fam, {}, [])


@pytest.fixture(scope="session")
def triangle_spec():
    from ppoly.exact_core import MPoly
    from ppoly.polytope import ParamPolytope
    from ppoly.pushpull import TruncationSpec
    p = ("a",)
    fam = ParamPolytope([(-1, 0), (0, -1), (1, 1)], [0, 0, MPoly.var(p, "a")], p, {"a": 1})
    return TruncationSpec(fam, {"a": 1}, [(1, 2)])


F = Fraction
