"""FFLV polytopes and the push-pull tower for the Bott-Samelson word (1,2,1,3,2) in type A3."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .exact_core import MPoly, parse_poly, rat
from .hull import primitive
from .khp_ring import KhpRing
from .polytope import ParamPolytope, Polytope, minkowski_sum
from .pushpull import TruncationSpec, theorem_data, verify_theorem_main, check_ode, VerificationReport

TOWER_WORD = (1, 2, 1, 3, 2)
TOWER_PARAMS = ("a", "b", "c", "d", "e")
XI = ("xi1", "xi2", "xi3", "xi4", "xi5")


# FFLV ---------------------------------------------------------------------

def fflv_index(i: int, j: int) -> int:
    """u-index of the positive root (i, j), 1 <= i < j.

    Reading the triangular table row by row from the right:

        ...   l4      l3      l2      l1
            u6      u3      u1
                u5      u2
                    u4

    so (1,2)->1, (1,3)->2, (2,3)->3, (1,4)->4, (2,4)->5, (3,4)->6.
    """
    if not 1 <= i < j:
        raise ValueError(f"bad root position ({i}, {j})")
    return (j - 1) * (j - 2) // 2 + i


def fflv_table(n: int) -> list[list[tuple[int, int, int]]]:
    """Rows of the table: row r lists (u-index, i, j) with j - i = r, right to left."""
    return [[(fflv_index(i, i + r), i, i + r) for i in range(1, n - r + 1)] for r in range(1, n)]


def dyck_paths(n: int, i: int, j: int) -> list[frozenset]:
    """Staircase paths from cell (i, i+1) to cell (j-1, j), as sets of u-indices."""
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    out = []

    def walk(p, q, acc):
        acc = acc + [fflv_index(p, q)]
        if (p, q) == (j - 1, j):
            out.append(frozenset(acc))
            return
        if p + 1 < q and p + 1 <= j - 1:
            walk(p + 1, q, acc)
        if q + 1 <= j:
            walk(p, q + 1, acc)

    walk(i, i + 1, [])
    return sorted(out, key=lambda s: sorted(s))


@dataclass
class FflvSpec:
    n: int
    lambdas: tuple

    def __post_init__(self):
        if len(self.lambdas) != self.n:
            raise ValueError(f"need {self.n} weights, got {len(self.lambdas)}")

    @property
    def dim(self) -> int:
        return self.n * (self.n - 1) // 2


def fflv_polytope(spec: FflvSpec, params: Sequence[str] | None = None) -> ParamPolytope:
    """FFLV polytope; weights may be numbers or affine MPolys (in ``params``)."""
    n, m = spec.n, spec.dim
    params = tuple(params or ())
    lam = [l if isinstance(l, MPoly) else MPoly.const(params, rat(l)) for l in spec.lambdas]
    normals, offsets, labels = [], [], []
    for k in range(1, m + 1):
        e = [0] * m
        e[k - 1] = -1
        normals.append(e)
        offsets.append(MPoly.const(params, 0))
        labels.append(f"u{k}>=0")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            bound = lam[j - 1] - lam[i - 1]
            for path in dyck_paths(n, i, j):
                row = [0] * m
                for k in path:
                    row[k - 1] = 1
                normals.append(row)
                offsets.append(bound)
                labels.append("+".join(f"u{k}" for k in sorted(path)) + f"<=l{j}-l{i}")
    fam = ParamPolytope(normals, offsets, params, None, m, labels)
    return fam


def fflv_concrete(lambdas: Sequence) -> Polytope:
    lambdas = [rat(x) for x in lambdas]
    n = len(lambdas)
    for i in range(n):
        for j in range(i + 1, n):
            if lambdas[j] < lambdas[i]:
                raise ValueError("negative FFLV bound; virtual FFLV polytopes are not supported")
    return fflv_polytope(FflvSpec(n, tuple(lambdas))).at({})


# presentations ------------------------------------------------------------

def projective_bundle_presentation(base_relations: Sequence[MPoly], c1: MPoly, c2: MPoly, new_var: str) -> list[MPoly]:
    """Relations of R[x]/(x^2 - c1 x + c2) over a ring with the given relations."""
    for p, d in ((c1, 1), (c2, 2)):
        if not p.is_zero() and (not p.is_homogeneous() or p.degree() != d):
            raise ValueError(f"{p} is not homogeneous of degree {d}")
    variables = tuple(c1.vars)
    if new_var not in variables:
        variables = variables + (new_var,)
    X = MPoly.var(variables, new_var)
    rels = [r.extend(variables) for r in base_relations]
    rels.append(X * X - c1.extend(variables) * X + c2.extend(variables))
    return rels


def xi_poly(text: str) -> MPoly:
    return parse_poly(text, XI)


# reference data for the tower, in xi variables
STEP_CHERN = [("0", "0"), ("xi1", "0"), ("-xi2", "xi2^2"), ("xi2", "0"), ("xi3+xi4-xi2", "xi3*xi4-xi3*xi2")]
# what x^2 - (dc + dd) x + (dc^2 + dd^2) becomes after x = xi4 + xi5, reduced by the lower relations
DERIVED_XI5 = "xi5^2 - xi2*xi5 - xi3*xi5 + xi4*xi5 + xi2*xi3 - xi3*xi4"
DICTIONARY = {"xi1": "a", "xi2": "b", "xi3": "c-b", "xi4": "d", "xi5": "e-d"}


def xi_relations(k: int) -> list[MPoly]:
    rels: list[MPoly] = []
    for step in range(k):
        c1, c2 = (xi_poly(t) for t in STEP_CHERN[step])
        rels = projective_bundle_presentation(rels, c1, c2, XI[step])
    return rels


def translate(p: MPoly, params: Sequence[str] = TOWER_PARAMS) -> MPoly:
    """Rewrite a xi-polynomial as a d-operator through the dictionary."""
    params = tuple(params)
    images = {x: parse_poly(DICTIONARY[x], TOWER_PARAMS) for x in p.vars}
    full = p.substitute(images, TOWER_PARAMS)
    k = len(params)
    if any(any(e[k:]) for e in full.terms):
        raise ValueError(f"{p} uses generators beyond {params}")
    return MPoly(params, {e[:k]: c for e, c in full.terms.items()})


# tower --------------------------------------------------------------------

@dataclass
class TowerStep:
    word_prefix: tuple
    polytope_family: ParamPolytope
    ring: KhpRing
    presentation: list
    report: VerificationReport | None = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        fam = self.polytope_family
        return {
            "word": list(self.word_prefix),
            "inequalities": _ineq_text(fam),
            "volume": self.ring.vol.to_text(),
            "hilbert": self.ring.hilbert,
            "relations": [r.to_text() for r in self.presentation],
            "dictionary": {x: DICTIONARY[x] for x in XI[:len(self.word_prefix)]},
            "checks": self.checks,
            "notes": self.notes,
            "theorem": self.report.to_json() if self.report else None,
        }


def _ineq_text(fam: ParamPolytope) -> list[str]:
    out = []
    for a, o in zip(fam.normals, fam.offsets):
        lhs = " + ".join((f"{c}*" if c != 1 else "") + f"u{k + 1}" for k, c in enumerate(a) if c and c > 0)
        neg = " + ".join((f"{-c}*" if c != -1 else "") + f"u{k + 1}" for k, c in enumerate(a) if c < 0)
        if lhs and neg:
            out.append(f"{lhs} <= {o.to_text()} + {neg}")
        elif lhs:
            out.append(f"{lhs} <= {o.to_text()}")
        else:
            out.append(f"{neg} >= {(-o).to_text()}")
    return out


def _facet(fam: ParamPolytope, normal) -> int:
    target = primitive(normal)
    P = fam.at()
    for i in sorted(P.facet_map):
        if primitive(fam.normals[i]) == target:
            return i
    raise ValueError(f"no facet with normal {normal}")


def _verbatim(text_rows: Sequence[str], dim: int, params: Sequence[str], reference) -> ParamPolytope:
    """Family from rows 'u1+u2 <= a+b' (all inequalities of that shape or 'u1 >= 0')."""
    params = tuple(params)
    uvars = tuple(f"u{k + 1}" for k in range(dim))
    normals, offsets, labels = [], [], []
    for row in text_rows:
        if ">=" in row:
            lhs, rhs = row.split(">=")
            sign = -1
        else:
            lhs, rhs = row.split("<=")
            sign = 1
        L = parse_poly(lhs, uvars)
        normals.append([sign * L.terms.get(tuple(int(i == k) for i in range(dim)), 0) for k in range(dim)])
        offsets.append(parse_poly(rhs, params) * sign)
        labels.append(row.replace(" ", ""))
    return ParamPolytope(normals, offsets, params, reference, dim, labels)


LISTED_ROWS = {
    2: ["u1>=0", "u1<=a", "u2>=0", "u1+u2<=a+b"],
    3: ["u1>=0", "u1<=a+b", "u3>=0", "u3<=c", "u2>=0", "u2+u3<=b+c", "u1+u2+u3<=a+b+c"],
    4: ["u1>=0", "u2>=0", "u3>=0", "u4>=0", "u3<=c", "u4<=d", "u1+u4<=a+b+d",
        "u2+u3+u4<=b+c+d", "u1+u2+u3+u4<=a+b+c+d"],
    5: ["u1>=0", "u2>=0", "u3>=0", "u4>=0", "u5>=0", "u1<=a+b+d", "u5<=e", "u3+u5<=c+e", "u4+u5<=d+e",
        "u1+u4+u5<=a+b+d+e", "u2+u3+u5<=b+c+d+e", "u2+u4+u5<=b+c+d+e",
        "u1+u2+u3+u5<=a+b+c+d+e", "u1+u2+u4+u5<=a+b+c+d+e",
        "u2+u3+u4+2*u5<=b+c+d+2*e", "u1+u2+u3+u4+2*u5<=a+b+c+d+2*e"],
}

# the trapezoid written so that xi2^2 - xi1*xi2 holds
CORRECTED_ROWS_2 = ["u1>=0", "u2>=0", "u2<=b", "u1+u2<=a+b"]


def listed_family(k: int, reference=None) -> ParamPolytope:
    params = TOWER_PARAMS[:k]
    ref = reference or {p: Fraction(1) for p in params}
    if k == 1:
        return _verbatim(["u1>=0", "u1<=a"], 1, params, ref)
    return _verbatim(LISTED_ROWS[k], k, params, ref)


def _step_spec(k: int, base: ParamPolytope) -> TruncationSpec:
    name = TOWER_PARAMS[k - 1]
    if k == 1:
        return TruncationSpec(base, {}, [], s_name=name)
    if k == 2:
        return TruncationSpec(base, {"a": 1}, [], s_name=name)
    if k == 3:
        face = (_facet(base, (0, -1)), _facet(base, (1, 1)))
        return TruncationSpec(base, {"b": 1}, [face], s_name=name, d_f_hint="∂a*∂b")
    if k == 4:
        return TruncationSpec(base, {"b": 1}, [], s_name=name)
    n14 = _facet(base, (1, 0, 0, 1))
    n234 = _facet(base, (0, 1, 1, 1))
    n1234 = _facet(base, (1, 1, 1, 1))
    z3 = _facet(base, (0, 0, -1, 0))
    z4 = _facet(base, (0, 0, 0, -1))
    faces = [(n14, z4), (n234, z3), (n234, z4), (n1234, z3), (n1234, z4)]
    return TruncationSpec(base, {"c": 1, "d": 1}, faces, s_name=name, d_f_hint="∂c^2+∂d^2")


def compare_routes(listed: ParamPolytope, built: ParamPolytope) -> dict:
    """Normal fans at the common reference and volume polynomials."""
    ref = built.reference
    listed = listed.with_reference(ref)
    Pa, Pb = listed.at(), built.at()
    fan_ok = Pa.normal_fan() == Pb.normal_fan()
    va, vb = listed.volume_polynomial(), built.volume_polynomial()
    out = {"fan_equal": fan_ok, "volume_equal": va == vb, "listed_volume": va.to_text(), "pushpull_volume": vb.to_text()}
    if not fan_ok:
        sep = Pb.separating_inequality(Pa) or Pa.separating_inequality(Pb)
        out["witness"] = str(sep)
    return out


def irredundancy_report(fam: ParamPolytope) -> dict:
    P = fam.at()
    red = P.redundant_inequalities()
    return {"listed": len(fam.normals), "irredundant": len(fam.normals) - len(red),
            "redundant": [fam.labels[i] for i in red],
            "upper_bounds": sum(1 for a in fam.normals if any(x > 0 for x in a))}


def build_tower_12132(reference: Mapping | None = None, fail_fast: bool = False) -> list[TowerStep]:
    """The five push-pull steps over a point, each cross-checked against the listed inequalities."""
    ref = {p: rat(v) for p, v in (reference or {p: 2 for p in TOWER_PARAMS}).items()}
    base = ParamPolytope([], [], (), {}, 0)
    steps = []
    for k in range(1, 6):
        spec = _step_spec(k, base)
        td = theorem_data(spec)
        rep = verify_theorem_main(spec, fail_fast=fail_fast, data=td)
        fam = td.family.with_reference({p: ref[p] for p in TOWER_PARAMS[:k]})
        ring = KhpRing(fam.volume_polynomial())
        rels = xi_relations(k)
        params = TOWER_PARAMS[:k]
        checks = {
            "theorem": rep.passed,
            "ode": check_ode(spec, td),
            "hilbert_binomial": ring.hilbert == [factorial(k) // (factorial(i) * factorial(k - i)) for i in range(k + 1)],
        }
        failing = [r.to_text() for r in rels if not ring.is_relation(translate(r, params))]
        checks["relations_annihilate"] = not failing
        checks["failing_relations"] = failing
        notes = []
        if k == 2:
            verb = listed_family(2, fam.reference)
            corr = _verbatim(CORRECTED_ROWS_2, 2, params, fam.reference)
            checks["route_corrected"] = compare_routes(corr, fam)
            checks["route_verbatim"] = compare_routes(verb, fam)
            vr = KhpRing(verb.volume_polynomial())
            checks["verbatim_relations_annihilate"] = all(vr.is_relation(translate(r, params)) for r in rels)
            if not checks["route_verbatim"]["fan_equal"] or not checks["route_verbatim"]["volume_equal"]:
                notes.append("listed trapezoid 0<=u1<=a, 0<=u2, u1+u2<=a+b disagrees with the push-pull step; "
                             "0<=u2<=b, u1+u2<=a+b is used")
        elif k >= 3:
            checks["route"] = compare_routes(listed_family(k), fam)
        if k == 5:
            derived = xi_poly(DERIVED_XI5)
            checks["derived_xi5_relation"] = {"relation": derived.to_text(),
                                              "annihilates": ring.is_relation(translate(derived, params))}
            checks["irredundancy"] = irredundancy_report(listed_family(5, fam.reference))
        steps.append(TowerStep(TOWER_WORD[:k], fam, ring, rels, rep, checks, notes))
        base = fam.with_reference({p: fam.reference[p] for p in params})
        if fail_fast and not step_passed(steps[-1]):
            break
    return steps


def step_passed(step: TowerStep) -> bool:
    c = step.checks
    ok = c["theorem"] and c["ode"] and c["hilbert_binomial"] and c["relations_annihilate"]
    for key in ("route", "route_corrected"):
        if key in c:
            ok = ok and c[key]["fan_equal"] and c[key]["volume_equal"]
    return bool(ok)


# Minkowski decomposition ----------------------------------------------------

def random_rational_points(n: int, count: int, seed: int = 0, lo: int = 1, hi: int = 5) -> list[tuple]:
    """Seeded positive rationals p/q with p in [lo, hi*q] and q in {1, 2, 3}."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pts.append(tuple(Fraction(rng.randint(lo, hi * q), q) for q in (rng.choice((1, 2, 3)) for _ in range(n))))
    return pts


def _embed(P: Polytope, coords: Sequence[int], dim: int) -> list[tuple]:
    out = []
    for v in P.vertices:
        w = [Fraction(0)] * dim
        for x, c in zip(v, coords):
            w[c] = x
        out.append(tuple(w))
    return out


def minkowski_fflv(point: Sequence) -> Polytope:
    """P1(0,a) + P2(0,b,b+c) + P3(0,d,d+e,d+e), with u6 dropped (it is forced to 0)."""
    a, b, c, d, e = (rat(x) for x in point)
    P1 = fflv_concrete([0, a])
    P2 = fflv_concrete([0, b, b + c])
    P3 = fflv_concrete([0, d, d + e, d + e])
    if any(v[5] != 0 for v in P3.vertices):
        raise AssertionError("u6 is not forced to zero")
    V1 = _embed(P1, [0], 5)
    V2 = _embed(P2, [0, 1, 2], 5)
    V3 = [tuple(v[:5]) for v in P3.vertices]
    S = minkowski_sum(Polytope.from_points(V1), Polytope.from_points(V2))
    return minkowski_sum(S, Polytope.from_points(V3))


@dataclass
class MinkowskiResult:
    point: tuple
    equal: bool
    witness: str | None = None

    def to_json(self):
        return {"point": [str(x) for x in self.point], "equal": self.equal, "witness": self.witness}


def check_minkowski_at(point: Sequence, family: ParamPolytope | None = None) -> MinkowskiResult:
    family = family or listed_family(5)
    point = tuple(rat(x) for x in point)
    M = minkowski_fflv(point)
    D = family.at(dict(zip(TOWER_PARAMS, point)))
    if M.same_as(D):
        return MinkowskiResult(point, True)
    sep = M.separating_inequality(D) or D.separating_inequality(M)
    return MinkowskiResult(point, False, str(sep))


def check_minkowski_decomposition(samples: int = 3, seed: int = 0, family: ParamPolytope | None = None,
                                  extra: Sequence = ((1, 1, 1, 1, 1), (2, 1, 3, 1, 2), (1, 0, 0, 0, 0))):
    """Exact comparison at seeded points plus fixed ones; returns (all_equal, results)."""
    pts = list(extra) + random_rational_points(5, samples, seed)
    res = [check_minkowski_at(p, family) for p in pts]
    return all(r.equal for r in res), res


# self-intersection ----------------------------------------------------------

def divisor_coefficients(params: Sequence[str] = TOWER_PARAMS) -> list[MPoly]:
    """d-coefficients of a*xi1 + (b+c)*xi2 + c*xi3 + (d+e)*xi4 + e*xi5, as polynomials in a..e."""
    params = tuple(params)
    xi_coeffs = [parse_poly(t, params) for t in ("a", "b+c", "c", "d+e", "e")]
    out = [MPoly.const(params, 0) for _ in params]
    for x, coef in zip(XI, xi_coeffs):
        image = parse_poly(DICTIONARY[x], params)
        for k, p in enumerate(params):
            w = image.terms.get(tuple(int(i == k) for i in range(len(params))), 0)
            if w:
                out[k] = out[k] + coef * w
    return out


def check_prop_self_intersection(vol: MPoly | None = None) -> dict:
    """Compare vol(Delta_5) with the top power of the divisor under both normalizations."""
    if vol is None:
        vol = listed_family(5).volume_polynomial()
    R = KhpRing(vol)
    coeffs = divisor_coefficients(R.vars)
    rhs = R.power_pairing(coeffs, R.degree)
    n = R.degree
    same = rhs == vol
    scaled = rhs == vol * factorial(n)
    at_ones = {p: 1 for p in R.vars}
    return {
        "lhs": vol.to_text(),
        "rhs": rhs.to_text(),
        "identity": same,
        "factorial": scaled,
        "normalization": "identity" if same else (f"{n}!" if scaled else None),
        "passed": same != scaled,
        "lhs_at_ones": str(vol.evaluate(at_ones)),
        "rhs_at_ones": str(rhs.evaluate(at_ones)),
        "lhs_a_only": vol.partial_evaluate({p: 0 for p in R.vars[1:]}).to_text(),
    }
