"""Codimension-two truncations, push-pull families and their ring checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from typing import Mapping, Sequence

from .exact_core import MPoly, apply_operator, monomials, parse_poly, rat, LinMap, solve_affine
from .hull import primitive
from .khp_ring import KhpRing
from .polytope import ParamPolytope, Polytope, PolytopeError, affine_dim


class TruncationError(ValueError):
    pass


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass
class TruncationSpec:
    """Data of a codimension-two truncation Q of P-hat, relative to a family.

    ``family`` is the family of polytopes analogous to P, parametrized by
    lattice coordinates, with its reference point at P.  ``shift`` gives
    P-hat - P in those coordinates.  Each face is a pair of facet indices of
    the family; ``cut_normals`` default to the sum of the two facet normals
    and ``depths`` (the drop from Psi_i(P-hat) to Psi_i(Q)) default to 1.
    """

    family: ParamPolytope
    shift: dict
    faces: list = field(default_factory=list)
    cut_normals: list | None = None
    depths: list | None = None
    s_name: str = "s"
    d_f_hint: str | None = None
    ample_shift: dict | None = None

    def __post_init__(self):
        self.shift = {k: rat(v) for k, v in self.shift.items()}
        unknown = set(self.shift) - set(self.family.params)
        if unknown:
            raise TruncationError(f"shift refers to unknown parameters {sorted(unknown)}")
        self.faces = [tuple(f) for f in self.faces]
        if self.cut_normals is None:
            self.cut_normals = [tuple(a + b for a, b in zip(self.family.normals[i], self.family.normals[j]))
                                for i, j in self.faces]
        self.cut_normals = [tuple(rat(x) for x in c) for c in self.cut_normals]
        if self.depths is None:
            self.depths = [Fraction(1)] * len(self.faces)
        self.depths = [rat(d) for d in self.depths]
        if not (len(self.faces) == len(self.cut_normals) == len(self.depths)):
            raise TruncationError("faces, cut normals and depths differ in length")
        if any(d <= 0 for d in self.depths):
            raise TruncationError("cut depths must be positive")
        if self.s_name in self.family.params:
            raise TruncationError(f"{self.s_name!r} already names a family parameter")
        if self.ample_shift:
            ref = dict(self.family.reference)
            for k, v in self.ample_shift.items():
                ref[k] = ref[k] + rat(v)
            self.family = self.family.with_reference(ref)

    @property
    def params(self) -> tuple:
        return self.family.params

    @property
    def p_reference(self) -> dict:
        return dict(self.family.reference)

    @property
    def hat_reference(self) -> dict:
        return {p: v + self.shift.get(p, 0) for p, v in self.family.reference.items()}

    def shift_vector(self) -> list[Fraction]:
        return [self.shift.get(p, Fraction(0)) for p in self.params]

    @cached_property
    def hat(self) -> Polytope:
        return self.family.at(self.hat_reference)

    def face_vertices(self, k: int) -> list[tuple]:
        i, j = self.faces[k]
        H = self.hat
        return [v for v, s in zip(H.vertices, H.active_sets) if i in s and j in s]

    @cached_property
    def cut_levels(self) -> list[MPoly]:
        """Psi_i(P-hat) as affine forms: the cut normal on a vertex of F_i."""
        chart = self.family.vertex_chart(self.hat_reference)
        out = []
        for k, (i, j) in enumerate(self.faces):
            coords = next((c for s, c in chart.vertices if i in s and j in s), None)
            if coords is None:
                raise TruncationError(f"facets {self.faces[k]} do not meet")
            out.append(reduce(lambda acc, t: acc + t, (c * a for c, a in zip(coords, self.cut_normals[k])),
                              MPoly.const(self.params, 0)))
        return out

    def validate(self) -> None:
        """Check the face, maximality and closeness conditions at P-hat."""
        H = self.hat
        H.check()
        n = self.family.dim
        verts = H.vertices
        on_faces = set()
        for k, (i, j) in enumerate(self.faces):
            F = self.face_vertices(k)
            if affine_dim(F) != n - 2:
                raise TruncationError(f"facets {self.faces[k]} do not meet in a codimension two face")
            psi = self.cut_normals[k]
            top = _dot(psi, F[0])
            for v in verts:
                val = _dot(psi, v)
                if (v in F) != (val == top) or val > top:
                    raise TruncationError(f"cut normal {psi} is not maximized exactly on face {self.faces[k]}")
            on_faces.update(F)
        for k in range(len(self.faces)):
            psi = self.cut_normals[k]
            level = _dot(psi, self.face_vertices(k)[0]) - self.depths[k]
            for v in verts:
                if v not in on_faces and _dot(psi, v) >= level:
                    raise TruncationError(f"cut {k} removes or touches vertex {tuple(map(str, v))}; not close enough")

    def to_json(self) -> dict:
        return {
            "base": self.family.to_json(),
            "shift": {k: str(v) for k, v in self.shift.items()},
            "faces": [list(f) for f in self.faces],
            "cut_normals": [[str(x) for x in c] for c in self.cut_normals],
            "depths": [str(d) for d in self.depths],
            "s_name": self.s_name,
            "d_f_hint": self.d_f_hint,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncationSpec":
        fam = ParamPolytope.from_json(data["base"])
        return cls(fam, dict(data.get("shift", {})), [tuple(f) for f in data.get("faces", [])],
                   [[Fraction(x) for x in c] for c in data["cut_normals"]] if data.get("cut_normals") else None,
                   [Fraction(x) for x in data["depths"]] if data.get("depths") else None,
                   data.get("s_name", "s"), data.get("d_f_hint"), data.get("ample_shift"))


@dataclass
class QPolynomialData:
    vol_F: MPoly
    g: dict
    q: MPoly


def build_truncation(spec: TruncationSpec) -> ParamPolytope:
    """Family of Q: the family of P-hat cut by psi_i <= Psi_i - depth_i (reference at P-hat)."""
    spec.validate()
    if not spec.faces:
        return spec.family.with_reference(spec.hat_reference)
    offs = [lvl - d for lvl, d in zip(spec.cut_levels, spec.depths)]
    labels = [f"cut{k}" for k in range(len(spec.faces))]
    Q = spec.family.add_inequalities(spec.cut_normals, offs, labels).with_reference(spec.hat_reference)
    Qc = Q.at()
    m = len(spec.family.normals)
    missing = [k for k in range(len(spec.faces)) if m + k not in Qc.facet_map]
    if missing:
        raise TruncationError(f"cuts {missing} do not produce new facets")
    return Q


def truncation_family(spec: TruncationSpec) -> ParamPolytope:
    """Q(s): the cut depth scaled by s, with parameters (s, *family params)."""
    s = spec.s_name
    params = (s,) + spec.params
    normals = list(spec.family.normals)
    offsets = [o.extend(params) for o in spec.family.offsets]
    S = MPoly.var(params, s)
    for psi, lvl, d in zip(spec.cut_normals, spec.cut_levels, spec.depths):
        normals.append(psi)
        offsets.append(lvl.extend(params) - S * d)
    ref = dict(spec.hat_reference)
    ref[s] = Fraction(1)
    labels = spec.family.labels + [f"cut{k}" for k in range(len(spec.faces))]
    return ParamPolytope(normals, offsets, params, ref, spec.family.dim, labels)


def extract_q_data(spec: TruncationSpec) -> QPolynomialData:
    """Split vol(P-hat) - vol(Q(s)) into vol_F * s^2/2 + sum g_j s^j."""
    s = spec.s_name
    params = (s,) + spec.params
    vol_hat = spec.family.volume_polynomial(spec.hat_reference).extend(params)
    if spec.faces:
        spec.validate()
        vol_q = truncation_family(spec).volume_polynomial()
    else:
        vol_q = vol_hat
    q = vol_hat - vol_q
    for k in (0, 1):
        c = q.coefficient_in(s, k)
        if not c.is_zero():
            raise TruncationError(f"cut-off volume has a nonzero s^{k} coefficient {c}")
    vol_F = (q.coefficient_in(s, 2) * 2)
    g = {j: q.coefficient_in(s, j) for j in range(3, spec.family.dim + 1)}
    extra = q.degree_in(s)
    if extra > max(spec.family.dim, 2):
        raise TruncationError(f"cut-off volume has degree {extra} in {s}")
    shrink = lambda p: MPoly(spec.params, {e[1:]: c for e, c in p.terms.items()})
    return QPolynomialData(shrink(vol_F), {j: shrink(p) for j, p in g.items()}, q)


def face_coefficient(spec: TruncationSpec, qdata: QPolynomialData | None = None) -> Fraction:
    """a_1 = vol_F / vol(F), for a single face, with vol(F) measured in a coordinate projection."""
    if len(spec.faces) != 1:
        raise TruncationError("per-face coefficients are only extracted for one face")
    qdata = qdata or extract_q_data(spec)
    F = spec.face_vertices(0)
    n = spec.family.dim
    if n == 2:
        fvol = Fraction(1)
    else:
        p0 = F[0]
        from .exact_core import rref
        diffs = [[a - b for a, b in zip(v, p0)] for v in F[1:]]
        _, piv = rref(diffs, n)
        fvol = Polytope.from_points([tuple(v[c] for c in piv) for v in F]).volume()
    return qdata.vol_F.evaluate(spec.hat_reference) / fvol


def cutoff_volume(spec: TruncationSpec, at: Mapping | None = None, s=1) -> Fraction:
    """Volume of the union of the cut-off pieces, by inclusion-exclusion."""
    at = spec.hat_reference if at is None else {k: rat(v) for k, v in at.items()}
    s = rat(s)
    H = spec.family.at(at)
    levels = [lvl.evaluate(at) - s * d for lvl, d in zip(spec.cut_levels, spec.depths)]
    total = Fraction(0)
    k = len(spec.faces)
    for r in range(1, k + 1):
        for S in combinations(range(k), r):
            A = list(H.A) + [tuple(-x for x in spec.cut_normals[i]) for i in S]
            b = list(H.b) + [-levels[i] for i in S]
            piece = Polytope(A, b, H.dim)
            total += (-1) ** (r + 1) * piece.volume()
    return total


def pushpull_family(family: ParamPolytope, Q: Polytope, s_name: str = "s") -> ParamPolytope:
    """Family Delta(s, P') = conv(P' x {s} u (P' + s(Q - P)) x {0}).

    ``family`` has its reference at P; ``Q`` is a concrete polytope whose
    normal fan refines that of P.  Parameters are the family's plus ``s``.
    """
    P = family.at()
    n = family.dim
    params = family.params + (s_name,)
    S = MPoly.var(params, s_name)
    normals, offsets, labels = [], [], []
    seen = set()
    dirs = [primitive(Q.A[i]) for i in sorted(Q.facet_map)] + [primitive(family.normals[i]) for i in sorted(P.facet_map)]
    for h in dirs:
        if h in seen:
            continue
        seen.add(h)
        hq = max(_dot(h, v) for v in Q.vertices)
        hp = max(_dot(h, v) for v in P.vertices)
        delta = hq - hp
        support = family.support_function(h).extend(params)
        normals.append(tuple(Fraction(x) for x in h) + (delta,))
        offsets.append(support + S * delta)
        labels.append("side" + str(tuple(h)))
    normals.append((Fraction(0),) * n + (Fraction(-1),))
    offsets.append(MPoly.const(params, 0))
    labels.append("bottom")
    normals.append((Fraction(0),) * n + (Fraction(1),))
    offsets.append(S)
    labels.append("top")
    ref = dict(family.reference)
    ref[s_name] = Fraction(1)
    fam = ParamPolytope(normals, offsets, params, ref, n + 1, labels)
    return fam.irredundant()


def build_pushpull_family(spec: TruncationSpec) -> ParamPolytope:
    Q = build_truncation(spec).at()
    return pushpull_family(spec.family, Q, spec.s_name)


def shift_operator(spec: TruncationSpec) -> MPoly:
    """c_1 = d_{P-hat} - d_P as an operator in the family parameters."""
    return MPoly.linear(spec.params, spec.shift)


def _lift(op: MPoly, variables) -> MPoly:
    return op.extend(variables) if op.vars != tuple(variables) else op


def check_star_star(spec: TruncationSpec, qdata: QPolynomialData, c1, c2) -> bool:
    """(d_s^2 - c1 d_s + c2) q(s, P' + s c1) == vol_F(P' + s c1)."""
    c1 = getattr(c1, "rep", c1)
    c2 = getattr(c2, "rep", c2)
    if not spec.faces:
        return True
    return _star_star_residual(spec, qdata, c1, c2).is_zero()


def _shifted(spec, p: MPoly, variables) -> MPoly:
    s = spec.s_name
    S = MPoly.var(variables, s)
    shift = {v: MPoly.var(variables, v) + S * c for v, c in spec.shift.items()}
    return _lift(p, variables).substitute(shift, variables)


def _star_star_parts(spec, qdata, c1):
    variables = qdata.q.vars
    s = spec.s_name
    G = _shifted(spec, qdata.q, variables)
    c1v = _lift(c1, variables)
    fixed = G.diff(s, 2) - apply_operator(c1v, G).diff(s)
    rhs = _shifted(spec, qdata.vol_F, variables)
    return G, fixed, rhs


def _star_star_residual(spec, qdata, c1, c2) -> MPoly:
    G, fixed, rhs = _star_star_parts(spec, qdata, c1)
    return fixed + apply_operator(_lift(c2, G.vars), G) - rhs


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: str | None = None

    def to_json(self):
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks], "data": self.data}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)


@dataclass
class TheoremData:
    vol_P: MPoly
    ring_P: KhpRing
    qdata: QPolynomialData
    c1: MPoly
    c2: MPoly | None
    c2_source: str
    d_f_solution: tuple | None
    d_j: dict
    family: ParamPolytope
    vol_delta: MPoly


def _choose_c2(spec, R, qdata, c1):
    """Pick D_F: hint, then the particular solution, then a joint solve with (**)."""
    sol = R.solve_for_operator(qdata.vol_F, 2)
    if sol is None:
        return None, "none", None
    part, ker = sol
    candidates = []
    if spec.d_f_hint:
        hint = parse_poly(spec.d_f_hint, R.vars)
        if apply_operator(hint, R.vol) == qdata.vol_F:
            candidates.append((hint, "hint"))
    candidates.append((part, "particular"))
    for cand, src in candidates:
        if check_star_star(spec, qdata, c1, cand):
            return cand, src, sol
    # D = part + sum t_k ker_k; (**) is affine in D
    G, fixed, rhs = _star_star_parts(spec, qdata, c1)
    base = fixed + apply_operator(_lift(part, G.vars), G) - rhs
    cols = [apply_operator(_lift(k, G.vars), G) for k in ker]
    keys = sorted(set(base.terms).union(*(c.terms for c in cols)) if cols else set(base.terms))
    M = LinMap([[c.terms.get(key, Fraction(0)) for c in cols] for key in keys], cols=len(cols))
    res = solve_affine(M, [-base.terms.get(key, Fraction(0)) for key in keys]) if keys else ([], [])
    if res is None:
        return part, "particular (condition fails for every candidate)", sol
    t, _ = res
    D = part
    for tk, k in zip(t, ker):
        D = D + k * tk
    return D, "joint solve", sol


def theorem_data(spec: TruncationSpec) -> TheoremData:
    vol_P = spec.family.volume_polynomial()
    R = KhpRing(vol_P)
    qdata = extract_q_data(spec)
    c1 = shift_operator(spec)
    c2, src, sol = _choose_c2(spec, R, qdata, c1)
    d_j = {}
    for j, g in qdata.g.items():
        r = R.solve_for_operator(g, j)
        d_j[j] = None if r is None else r[0]
    fam = build_pushpull_family(spec)
    vol_delta = fam.volume_polynomial()
    return TheoremData(vol_P, R, qdata, c1, c2, src, sol, d_j, fam, vol_delta)


def bundle_relation(spec: TruncationSpec, c1: MPoly, c2: MPoly, variables) -> MPoly:
    """d_s^2 - c1 d_s + c2 as an operator in ``variables``."""
    S = MPoly.var(variables, spec.s_name)
    return S * S - _lift(c1, variables) * S + _lift(c2, variables)


def verify_theorem_main(spec: TruncationSpec, fail_fast: bool = False, data: TheoremData | None = None) -> VerificationReport:
    """Machine check of the projective-bundle presentation of R_Delta."""
    rep = VerificationReport()
    td = data or theorem_data(spec)
    R = td.ring_P
    pref = "∂"

    def add(check):
        rep.checks.append(check)
        return fail_fast and not check.passed

    exists = td.c2 is not None and all(v is not None for v in td.d_j.values())
    missing = [f"D_{j}" for j, v in td.d_j.items() if v is None] + ([] if td.c2 is not None else ["D_F"])
    if add(Check("operators_exist", exists,
                 "D_F and D_j solving D(vol_P) = vol_F, g_j",
                 None if exists else ", ".join(missing))):
        return _finish(rep, td, spec)
    ok = check_star_star(spec, td.qdata, td.c1, td.c2)
    wit = None if ok else _star_star_residual(spec, td.qdata, td.c1, td.c2).to_text()
    if add(Check("star_star", ok, f"condition (**) with c2 from {td.c2_source}", wit)):
        return _finish(rep, td, spec)
    rel = bundle_relation(spec, td.c1, td.c2, td.vol_delta.vars)
    img = apply_operator(rel, td.vol_delta)
    if add(Check("bundle_relation", img.is_zero(), rel.to_text(pref) + " annihilates vol_Delta",
                 None if img.is_zero() else img.to_text())):
        return _finish(rep, td, spec)
    bad = None
    for d in range(1, R.degree + 2):
        gens = R.annihilator.get(d) if d <= R.degree else [MPoly(R.vars, {m: 1}) for m in monomials(len(R.vars), d)]
        for D in gens:
            if not apply_operator(_lift(D, td.vol_delta.vars), td.vol_delta).is_zero():
                bad = D.to_text(pref)
                break
        if bad:
            break
    if add(Check("relations_lift", bad is None, "every relation of R_P annihilates vol_Delta", bad)):
        return _finish(rep, td, spec)
    R_delta = KhpRing(td.vol_delta)
    expected = [a + b for a, b in zip(R.hilbert + [0], [0] + R.hilbert)]
    ok = R_delta.hilbert == expected
    add(Check("hilbert_doubling", ok, f"h(R_Delta) = {R_delta.hilbert}, (1+t) h(R_P) = {expected}",
              None if ok else str(R_delta.hilbert)))
    rep.data["hilbert_delta"] = R_delta.hilbert
    return _finish(rep, td, spec)


def _finish(rep, td, spec):
    pref = "∂"
    rep.data.update({
        "vol_P": td.vol_P.to_text(),
        "vol_F": td.qdata.vol_F.to_text(),
        "q": td.qdata.q.to_text(),
        "vol_Delta": td.vol_delta.to_text(),
        "c1": td.c1.to_text(pref),
        "c2": td.c2.to_text(pref) if td.c2 is not None else None,
        "c2_source": td.c2_source,
        "d_j": {str(j): (v.to_text(pref) if v is not None else None) for j, v in td.d_j.items()},
        "hilbert_P": td.ring_P.hilbert,
        "relation": bundle_relation(spec, td.c1, td.c2, td.vol_delta.vars).to_text(pref) if td.c2 is not None else None,
        "reference": {k: str(v) for k, v in spec.family.reference.items()},
        "ample_shift": {k: str(v) for k, v in (spec.ample_shift or {}).items()},
    })
    return rep


def check_ode(spec: TruncationSpec, data: TheoremData | None = None) -> bool:
    """F'' - c1 F' + D_F F == 0 for F = vol_Delta(s, x)."""
    td = data or theorem_data(spec)
    if td.c2 is None:
        return False
    F = td.vol_delta
    s = spec.s_name
    Fp = F.diff(s)
    res = F.diff(s, 2) - apply_operator(_lift(td.c1, F.vars), Fp) + apply_operator(_lift(td.c2, F.vars), F)
    return res.is_zero()
