"""Exact polytopes and parametric families of analogous polytopes.

A :class:`Polytope` is a concrete H-representation ``A x <= b`` over Q.  A
:class:`ParamPolytope` keeps the normals fixed and lets the offsets be affine
forms in named parameters; its members at nearby parameter values share one
normal fan, and their volume is a polynomial in the parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Mapping, Sequence

from .exact_core import MPoly, det, inverse, poly_det, rank, rat, solve_square
from .hull import _dd_extreme_rays, hull_inequalities, primitive


class PolytopeError(ValueError):
    pass


class DegenerateChartError(PolytopeError):
    """The combinatorial type is not constant around the reference point."""


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def affine_dim(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    if not diffs:
        return 0
    return rank(diffs, len(p0))


class Polytope:
    """Concrete polytope ``{x : A x <= b}``."""

    def __init__(self, normals: Sequence[Sequence], offsets: Sequence, dim: int | None = None):
        self.A = [tuple(rat(x) for x in a) for a in normals]
        self.b = [rat(x) for x in offsets]
        if len(self.A) != len(self.b):
            raise ValueError("normals and offsets differ in length")
        if dim is None:
            if not self.A:
                raise ValueError("dimension required for a polytope without inequalities")
            dim = len(self.A[0])
        self.dim = dim
        if any(len(a) != dim for a in self.A):
            raise ValueError("normal length does not match dimension")

    @classmethod
    def from_points(cls, points: Sequence[Sequence]) -> "Polytope":
        pts = [tuple(rat(x) for x in p) for p in points]
        if not pts:
            raise PolytopeError("empty point set")
        dim = len(pts[0])
        if dim == 0:
            return cls([], [], dim=0)
        ineqs = hull_inequalities(pts)
        return cls([a for a, _ in ineqs], [b for _, b in ineqs], dim=dim)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, inequalities={len(self.A)})"

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        x = [rat(v) for v in x]
        if strict:
            return all(_dot(a, x) < b for a, b in zip(self.A, self.b))
        return all(_dot(a, x) <= b for a, b in zip(self.A, self.b))

    def translate(self, t: Sequence) -> "Polytope":
        t = [rat(v) for v in t]
        return Polytope(self.A, [b + _dot(a, t) for a, b in zip(self.A, self.b)], self.dim)

    def scale(self, k) -> "Polytope":
        k = rat(k)
        if k <= 0:
            raise ValueError("scale factor must be positive")
        return Polytope(self.A, [b * k for b in self.b], self.dim)

    # vertices --------------------------------------------------------------

    @cached_property
    def _incidence(self):
        """List of (vertex, active set) found by exhaustive facet subsets."""
        n = self.dim
        found: dict = {}
        if n == 0:
            if all(b >= 0 for b in self.b):
                found[()] = frozenset(i for i, b in enumerate(self.b) if b == 0)
            return sorted(found.items())
        for S in combinations(range(len(self.A)), n):
            x = solve_square([self.A[i] for i in S], [self.b[i] for i in S])
            if x is None:
                continue
            x = tuple(x)
            if x in found:
                continue
            if self.contains(x):
                found[x] = frozenset(i for i, (a, b) in enumerate(zip(self.A, self.b)) if _dot(a, x) == b)
        return sorted(found.items())

    @property
    def vertices(self) -> list[tuple[Fraction, ...]]:
        return [v for v, _ in self._incidence]

    @property
    def active_sets(self) -> list[frozenset]:
        return [s for _, s in self._incidence]

    def is_empty(self) -> bool:
        return not self._incidence

    def is_bounded(self) -> bool:
        if self.dim == 0:
            return True
        if rank([list(a) for a in self.A], self.dim) < self.dim:
            return False
        rows = []
        for a in self.A:
            den = reduce(lcm, (x.denominator for x in a), 1)
            rows.append(tuple(int(x * den) for x in a))
        return not _dd_extreme_rays(rows, self.dim)

    def check(self) -> None:
        """Raise unless the polytope is nonempty and bounded."""
        if not self.is_bounded():
            raise PolytopeError("polytope is unbounded")
        if self.is_empty():
            raise PolytopeError("polytope is empty")

    @cached_property
    def affine_dimension(self) -> int:
        return affine_dim(self.vertices)

    def is_full_dimensional(self) -> bool:
        return self.affine_dimension == self.dim

    # facets and faces ----------------------------------------------------

    @cached_property
    def facet_map(self) -> dict[int, frozenset]:
        """Irredundant inequality index -> set of vertex indices on it.

        Duplicate inequalities defining the same facet keep the first index.
        """
        verts = self.vertices
        out: dict = {}
        seen = set()
        target = self.affine_dimension - 1
        for i in range(len(self.A)):
            contact = frozenset(k for k, s in enumerate(self.active_sets) if i in s)
            if not contact or contact in seen:
                continue
            if affine_dim([verts[k] for k in contact]) == target and len(contact) < len(verts):
                out[i] = contact
                seen.add(contact)
        return out

    def redundant_inequalities(self) -> list[int]:
        return [i for i in range(len(self.A)) if i not in self.facet_map]

    def irredundant(self) -> "Polytope":
        idx = sorted(self.facet_map)
        return Polytope([self.A[i] for i in idx], [self.b[i] for i in idx], self.dim)

    @cached_property
    def faces(self) -> dict[frozenset, int]:
        """All nonempty faces (as vertex index sets) with their dimensions."""
        verts = self.vertices
        top = frozenset(range(len(verts)))
        facets = list(self.facet_map.values())
        faces = {top: self.affine_dimension}
        stack = [top]
        while stack:
            f = stack.pop()
            for g in facets:
                h = f & g
                if h and h not in faces:
                    faces[h] = affine_dim([verts[k] for k in sorted(h)])
                    stack.append(h)
        return faces

    def f_vector(self) -> list[int]:
        counts = [0] * (self.affine_dimension + 1)
        for d in self.faces.values():
            counts[d] += 1
        return counts

    def face_facets(self, face: frozenset) -> list[frozenset]:
        d = self.faces[face]
        out = set()
        for g in self.facet_map.values():
            h = face & g
            if h and h != face and self.faces.get(h) == d - 1:
                out.add(h)
        return sorted(out, key=sorted)

    def codim2_faces(self) -> list[dict]:
        """Faces of codimension two with the facets (inequality indices) through them."""
        n = self.affine_dimension
        out = []
        for face, d in self.faces.items():
            if d != n - 2:
                continue
            through = sorted(i for i, g in self.facet_map.items() if face <= g)
            out.append({
                "facets": tuple(through),
                "simple": len(through) == 2,
                "vertices": [self.vertices[k] for k in sorted(face)],
            })
        return sorted(out, key=lambda f: f["facets"])

    # triangulation and volume --------------------------------------------

    def triangulation(self) -> list[tuple[int, ...]]:
        """Pulling triangulation, determined by the face lattice alone."""
        if not self.is_full_dimensional():
            raise PolytopeError("triangulation needs a full-dimensional polytope")
        memo: dict = {}

        def tri(face):
            if face in memo:
                return memo[face]
            if self.faces[face] == 0:
                res = [(next(iter(face)),)]
            else:
                apex = min(face)
                res = []
                for g in self.face_facets(face):
                    if apex in g:
                        continue
                    res.extend(s + (apex,) for s in tri(g))
            memo[face] = res
            return res

        return tri(frozenset(range(len(self.vertices))))

    def volume(self, return_flag: bool = False):
        """Exact Euclidean volume; degenerate or empty polytopes give 0."""
        if self.is_empty() or not self.is_full_dimensional():
            return (Fraction(0), True) if return_flag else Fraction(0)
        verts = self.vertices
        total = Fraction(0)
        for s in self.triangulation():
            p0 = verts[s[0]]
            M = [[a - b for a, b in zip(verts[k], p0)] for k in s[1:]]
            total += abs(det(M))
        vol = total / factorial(self.dim)
        return (vol, False) if return_flag else vol

    # fans and comparisons --------------------------------------------------

    def normal_fan(self) -> "NormalFan":
        if not self.is_full_dimensional():
            raise PolytopeError("normal fan needs a full-dimensional polytope")
        ray_of = {i: primitive(self.A[i]) for i in self.facet_map}
        rays = tuple(sorted(set(ray_of.values())))
        index = {r: k for k, r in enumerate(rays)}
        cones = set()
        for face in self.faces:
            cones.add(frozenset(index[ray_of[i]] for i, g in self.facet_map.items() if face <= g))
        return NormalFan(rays, tuple(sorted(cones, key=lambda c: (len(c), sorted(c)))))

    def canonical_facets(self) -> frozenset:
        """Facets as (primitive normal, offset) pairs, independent of input scaling."""
        out = set()
        for i in self.facet_map:
            a = self.A[i]
            p = primitive(a)
            k = next(x for x in a if x) / next(x for x in p if x)
            out.add((p, self.b[i] / k))
        return frozenset(out)

    def same_as(self, other: "Polytope") -> bool:
        return self.dim == other.dim and set(self.vertices) == set(other.vertices)

    def separating_inequality(self, other: "Polytope"):
        """A facet of one polytope violated by a vertex of the other, or None."""
        for P, Q, tag in ((self, other, "left"), (other, self, "right")):
            for i in P.facet_map:
                for v in Q.vertices:
                    if _dot(P.A[i], v) > P.b[i]:
                        return {"facet_of": tag, "normal": [str(x) for x in P.A[i]],
                                "offset": str(P.b[i]), "violating_vertex": [str(x) for x in v]}
        return None


@dataclass(frozen=True)
class NormalFan:
    rays: tuple
    cones: tuple

    def labeled(self) -> frozenset:
        return frozenset(frozenset(self.rays[i] for i in c) for c in self.cones)

    def __eq__(self, other):
        if not isinstance(other, NormalFan):
            return NotImplemented
        return set(self.rays) == set(other.rays) and self.labeled() == other.labeled()

    def __hash__(self):
        return hash(self.labeled())

    def maximal_cones(self) -> list[frozenset]:
        """Inclusion-maximal cones, one per vertex of the polytope."""
        return [c for c in self.cones if not any(c < d for d in self.cones)]

    def transformed(self, perm: Sequence[int]) -> "NormalFan":
        """Relabel coordinates: new coordinate k is old coordinate perm[k]."""
        new_rays = [tuple(r[p] for p in perm) for r in self.rays]
        order = sorted(range(len(new_rays)), key=lambda i: new_rays[i])
        pos = {old: new for new, old in enumerate(order)}
        cones = tuple(sorted((frozenset(pos[i] for i in c) for c in self.cones),
                             key=lambda c: (len(c), sorted(c))))
        return NormalFan(tuple(new_rays[i] for i in order), cones)


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    if P.dim != Q.dim:
        raise PolytopeError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    pts = {tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices}
    return Polytope.from_points(sorted(pts))


def cayley_sum(P: Polytope, Q: Polytope) -> Polytope:
    """conv((P x {1}) u (Q x {0})), new coordinate last."""
    if P.dim != Q.dim:
        raise PolytopeError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    pts = [tuple(p) + (Fraction(1),) for p in P.vertices] + [tuple(q) + (Fraction(0),) for q in Q.vertices]
    return Polytope.from_points(pts)


def cayley_slice(C: Polytope, t) -> Polytope:
    """The slice of a polytope in R^{n+1} at last coordinate ``t``, as a polytope in R^n."""
    t = rat(t)
    n = C.dim - 1
    A = [a[:n] for a in C.A]
    b = [bb - a[n] * t for a, bb in zip(C.A, C.b)]
    keep = [(a, bb) for a, bb in zip(A, b) if any(a) or bb < 0]
    if any(not any(a) for a, _ in keep):
        raise PolytopeError("slice is empty")
    return Polytope([a for a, _ in keep], [bb for _, bb in keep], n)


def minkowski_combination(P: Polytope, Q: Polytope, s, t) -> Polytope:
    """s P + t Q for nonnegative s, t (vertex sums)."""
    s, t = rat(s), rat(t)
    pts = {tuple(s * a + t * b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices}
    return Polytope.from_points(sorted(pts))


# ---------------------------------------------------------------------------
# parametric families


@dataclass
class VertexChart:
    reference: dict
    vertices: list  # (active frozenset, tuple of affine MPoly coordinates)

    def evaluate(self, point: Mapping) -> list[tuple[Fraction, ...]]:
        return [tuple(c.evaluate(point) for c in coords) for _, coords in self.vertices]

    @property
    def simple(self) -> bool:
        n = len(self.vertices[0][1]) if self.vertices else 0
        return all(len(s) == n for s, _ in self.vertices)

    def degenerate_vertices(self) -> list[frozenset]:
        n = len(self.vertices[0][1]) if self.vertices else 0
        return [s for s, _ in self.vertices if len(s) > n]


class ParamPolytope:
    """Family ``{x : <normal_i, x> <= offset_i(params)}`` with affine offsets."""

    def __init__(self, normals: Sequence[Sequence], offsets: Sequence, params: Sequence[str],
                 reference: Mapping | None = None, dim: int | None = None, labels: Sequence[str] | None = None):
        self.params = tuple(params)
        self.normals = [tuple(rat(x) for x in a) for a in normals]
        offs = []
        for o in offsets:
            if isinstance(o, MPoly):
                o = o.extend(self.params) if o.vars != self.params else o
            else:
                o = MPoly.const(self.params, rat(o))
            if o.degree() > 1:
                raise ValueError(f"offset {o} is not affine")
            offs.append(o)
        self.offsets = offs
        if dim is None:
            if not self.normals:
                raise ValueError("dimension required")
            dim = len(self.normals[0])
        self.dim = dim
        self.reference = {k: rat(v) for k, v in (reference or {}).items()}
        self.labels = list(labels) if labels else [f"h{i}" for i in range(len(self.normals))]

    def __repr__(self):
        return f"ParamPolytope(dim={self.dim}, params={self.params}, inequalities={len(self.normals)})"

    def _point(self, at):
        at = self.reference if at is None else {k: rat(v) for k, v in at.items()}
        missing = [p for p in self.params if p not in at]
        if missing:
            raise ValueError(f"missing parameter values: {missing}")
        return at

    def at(self, point: Mapping | None = None) -> Polytope:
        point = self._point(point)
        return Polytope(self.normals, [o.evaluate(point) for o in self.offsets], self.dim)

    def with_reference(self, reference: Mapping) -> "ParamPolytope":
        return ParamPolytope(self.normals, self.offsets, self.params, reference, self.dim, self.labels)

    def add_inequalities(self, normals, offsets, labels=None) -> "ParamPolytope":
        labels = list(labels) if labels else [f"h{len(self.normals) + i}" for i in range(len(normals))]
        return ParamPolytope(self.normals + [tuple(map(rat, a)) for a in normals], self.offsets + list(offsets),
                             self.params, self.reference, self.dim, self.labels + labels)

    def reparametrize(self, images: Mapping[str, MPoly], new_params: Sequence[str],
                      reference: Mapping | None = None) -> "ParamPolytope":
        """Substitute affine forms in ``new_params`` for the parameters."""
        new_params = tuple(new_params)
        offs = [o.substitute(images, new_params) for o in self.offsets]
        return ParamPolytope(self.normals, offs, new_params, reference, self.dim, self.labels)

    def irredundant(self, at: Mapping | None = None) -> "ParamPolytope":
        P = self.at(at)
        idx = sorted(P.facet_map)
        return ParamPolytope([self.normals[i] for i in idx], [self.offsets[i] for i in idx], self.params,
                             self.reference, self.dim, [self.labels[i] for i in idx])

    def vertex_chart(self, at: Mapping | None = None) -> VertexChart:
        """Vertices at ``at`` with coordinates back-solved as affine forms.

        Every inequality active at a vertex must stay active along the family,
        otherwise the combinatorial type changes near ``at`` and
        :class:`DegenerateChartError` is raised.
        """
        point = self._point(at)
        P = self.at(point)
        P.check()
        n = self.dim
        chart = []
        for v, active in P._incidence:
            act = sorted(active)
            S = None
            for sub in combinations(act, n):
                if rank([list(self.normals[i]) for i in sub], n) == n:
                    S = sub
                    break
            if n == 0:
                coords = ()
            else:
                inv = inverse([self.normals[i] for i in S])
                coords = tuple(
                    reduce(lambda acc, t: acc + t, (self.offsets[S[k]] * inv[r][k] for k in range(n)),
                           MPoly.const(self.params, 0))
                    for r in range(n))
            for i in act:
                lhs = reduce(lambda acc, t: acc + t, (c * a for c, a in zip(coords, self.normals[i])),
                             MPoly.const(self.params, 0))
                if lhs != self.offsets[i]:
                    raise DegenerateChartError(
                        f"vertex {tuple(map(str, v))} leaves facet {self.labels[i]} when parameters move")
            chart.append((active, coords))
        return VertexChart(dict(point), chart)

    def volume_polynomial(self, at: Mapping | None = None) -> MPoly:
        """Volume as a polynomial in the parameters, valid around ``at``."""
        point = self._point(at)
        P = self.at(point)
        chart = self.vertex_chart(point)
        if not P.is_full_dimensional():
            raise DegenerateChartError("reference polytope is not full-dimensional")
        n = self.dim
        total = MPoly.const(self.params, 0)
        coords = [c for _, c in chart.vertices]
        for s in P.triangulation():
            p0 = coords[s[0]]
            M = [[a - b for a, b in zip(coords[k], p0)] for k in s[1:]]
            d = poly_det(M, self.params)
            sign = d.evaluate(point)
            if sign == 0:
                raise DegenerateChartError("flat simplex in reference triangulation")
            total = total + d if sign > 0 else total - d
        return total / factorial(n)

    def volume(self, at: Mapping | None = None) -> Fraction:
        return self.at(at).volume()

    def normal_fan(self, at: Mapping | None = None) -> NormalFan:
        return self.at(at).normal_fan()

    def codim2_faces(self, at: Mapping | None = None) -> list[dict]:
        return self.at(at).codim2_faces()

    def support_function(self, direction: Sequence, at: Mapping | None = None) -> MPoly:
        """max <direction, x> over the family member, as an affine form near ``at``."""
        point = self._point(at)
        chart = self.vertex_chart(point)
        direction = [rat(x) for x in direction]
        best, best_val = None, None
        for _, coords in chart.vertices:
            val = sum((c.evaluate(point) * d for c, d in zip(coords, direction)), Fraction(0))
            if best_val is None or val > best_val:
                best, best_val = coords, val
        return reduce(lambda acc, t: acc + t, (c * d for c, d in zip(best, direction)),
                      MPoly.const(self.params, 0))

    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        ineqs = []
        for a, o, lab in zip(self.normals, self.offsets, self.labels):
            off = {"const": str(o.evaluate({p: 0 for p in self.params}))}
            for p in self.params:
                c = o.diff(p).constant_value() if o.depends_on(p) else Fraction(0)
                if c:
                    off[p] = str(c)
            ineqs.append({"normal": [str(x) for x in a], "offset": off, "label": lab})
        return {"dim": self.dim, "params": list(self.params), "ineqs": ineqs,
                "reference": {k: str(v) for k, v in self.reference.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "ParamPolytope":
        params = tuple(data.get("params", []))
        normals, offsets, labels = [], [], []
        for i, ineq in enumerate(data["ineqs"]):
            normals.append([Fraction(x) for x in ineq["normal"]])
            off = dict(ineq.get("offset", {}))
            const = Fraction(off.pop("const", "0"))
            unknown = set(off) - set(params)
            if unknown:
                raise ValueError(f"offset refers to unknown parameters {sorted(unknown)}")
            offsets.append(MPoly.linear(params, {k: Fraction(v) for k, v in off.items()}, const))
            labels.append(ineq.get("label", f"h{i}"))
        ref = {k: Fraction(v) for k, v in data.get("reference", {}).items()}
        return cls(normals, offsets, params, ref, data["dim"], labels)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def concrete(P: Polytope) -> ParamPolytope:
    """View a concrete polytope as a family without parameters."""
    return ParamPolytope(P.A, P.b, (), {}, P.dim)


def enumerate_vertices(P: ParamPolytope, at: Mapping | None = None) -> VertexChart:
    return P.vertex_chart(at)


def volume_polynomial(P: ParamPolytope, reference: Mapping | None = None) -> MPoly:
    return P.volume_polynomial(reference)


def normal_fan(P, at: Mapping | None = None) -> NormalFan:
    if isinstance(P, ParamPolytope):
        return P.normal_fan(at)
    return P.normal_fan()


def codim2_faces(P, at: Mapping | None = None) -> list[dict]:
    if isinstance(P, ParamPolytope):
        return P.codim2_faces(at)
    return P.codim2_faces()


def volume(P, at: Mapping | None = None, return_flag: bool = False):
    if isinstance(P, ParamPolytope):
        P = P.at(at)
    return P.volume(return_flag=return_flag)
