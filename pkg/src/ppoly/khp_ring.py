"""Khovanskii-Pukhlikov rings Q[d_1..d_l] / Ann(vol) via inverse systems.

A class is stored as an operator (a polynomial whose variables stand for
partial derivatives) together with its fingerprint, the result of applying
the operator to the volume polynomial.  Two operators define the same class
exactly when their fingerprints agree, so no Groebner basis is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exact_core import LinMap, MPoly, apply_operator, kernel, monomials, rank, solve_affine


def _vec_to_poly(variables, monos, vec) -> MPoly:
    return MPoly(variables, {m: c for m, c in zip(monos, vec) if c})


class KhpRing:
    """Graded Artinian Gorenstein quotient attached to a homogeneous polynomial."""

    def __init__(self, vol: MPoly, variables: Sequence[str] | None = None):
        if vol.is_zero():
            raise ValueError("volume polynomial must be nonzero")
        if variables is not None and tuple(variables) != vol.vars:
            vol = vol.extend(variables)
        if not vol.is_homogeneous():
            raise ValueError(f"volume polynomial {vol} is not homogeneous")
        self.vol = vol
        self.vars = vol.vars
        self.degree = vol.degree()
        self._maps: dict = {}
        self.hilbert = []
        self.annihilator = {}
        self.graded_basis = {}
        for d in range(self.degree + 1):
            monos, M = self.evaluation_map(d)
            ker = kernel(M)
            self.annihilator[d] = [_vec_to_poly(self.vars, monos, v) for v in ker]
            self.hilbert.append(M.cols - len(ker))
            self.graded_basis[d] = self._greedy_basis(monos, M)
        self._check_gorenstein()

    def evaluation_map(self, d: int):
        """Degree-d operator monomials and the matrix of D -> D(vol)."""
        if d in self._maps:
            return self._maps[d]
        monos = monomials(len(self.vars), d)
        targets = monomials(len(self.vars), self.degree - d) if d <= self.degree else []
        cols = []
        for m in monos:
            img = apply_operator(MPoly(self.vars, {m: 1}), self.vol)
            cols.append([img.terms.get(t, Fraction(0)) for t in targets])
        rows = [[cols[j][i] for j in range(len(monos))] for i in range(len(targets))]
        M = LinMap(rows, cols=len(monos))
        self._maps[d] = (monos, M)
        return self._maps[d]

    def _greedy_basis(self, monos, M) -> list[MPoly]:
        chosen, cols = [], []
        for j, m in enumerate(monos):
            cand = cols + [[row[j] for row in M.entries]]
            if rank(cand, M.rows) == len(cand):
                cols = cand
                chosen.append(MPoly(self.vars, {m: 1}))
        return chosen

    def _check_gorenstein(self):
        h = self.hilbert
        if h[0] != 1 or h[-1] != 1:
            raise AssertionError(f"socle condition fails: Hilbert function {h}")
        if h != h[::-1]:
            raise AssertionError(f"Hilbert function {h} is not symmetric")

    @property
    def total_dimension(self) -> int:
        return sum(self.hilbert)

    def hilbert_polynomial(self) -> MPoly:
        return MPoly(("t",), {(d,): c for d, c in enumerate(self.hilbert)})

    # elements --------------------------------------------------------------

    def op(self, text_or_poly) -> MPoly:
        """Operator from text such as ``"∂a^2 - ∂a*∂b"`` or an MPoly."""
        if isinstance(text_or_poly, MPoly):
            if text_or_poly.vars != self.vars:
                if len(text_or_poly.vars) != len(self.vars):
                    raise ValueError("operator arity mismatch")
                return MPoly(self.vars, text_or_poly.terms)
            return text_or_poly
        from .exact_core import parse_poly
        return parse_poly(str(text_or_poly), self.vars)

    def element(self, rep) -> "RingClass":
        return RingClass(self, self.op(rep))

    def one(self) -> "RingClass":
        return self.element(MPoly.const(self.vars, 1))

    def zero(self) -> "RingClass":
        return self.element(MPoly.const(self.vars, 0))

    def generator(self, name: str) -> "RingClass":
        return self.element(MPoly.var(self.vars, name))

    def class_of_polytope(self, coords: Sequence) -> "RingClass":
        """Degree-one class sum x_i * d_i of a (virtual) polytope with coordinates x."""
        if len(coords) != len(self.vars):
            raise ValueError(f"expected {len(self.vars)} coordinates, got {len(coords)}")
        rep = MPoly.linear(self.vars, {v: c for v, c in zip(self.vars, coords)})
        return self.element(rep)

    def is_relation(self, D) -> bool:
        return apply_operator(self.op(D), self.vol).is_zero()

    def socle_pairing(self, x) -> Fraction:
        rep = x.rep if isinstance(x, RingClass) else self.op(x)
        if not rep.is_zero() and (not rep.is_homogeneous() or rep.degree() != self.degree):
            raise ValueError(f"socle pairing needs a homogeneous class of degree {self.degree}")
        return apply_operator(rep, self.vol).constant_value() if not rep.is_zero() else Fraction(0)

    def power_pairing(self, coeffs: Sequence[MPoly], power: int | None = None) -> MPoly:
        """Socle value of (sum coeffs[i] d_i)^n with polynomial coefficients.

        Coefficients may live in any polynomial ring; the result is the
        multinomial expansion sum n!/alpha! * coeff^alpha * socle(d^alpha).
        """
        n = self.degree if power is None else power
        if len(coeffs) != len(self.vars):
            raise ValueError("coefficient count mismatch")
        cvars = coeffs[0].vars
        total = MPoly.const(cvars, 0)
        for alpha in monomials(len(self.vars), n):
            sigma = apply_operator(MPoly(self.vars, {alpha: 1}), self.vol).constant_value()
            if not sigma:
                continue
            mult = factorial(n)
            term = MPoly.const(cvars, 1)
            for c, k in zip(coeffs, alpha):
                mult //= factorial(k)
                if k:
                    term = term * c ** k
            total = total + term * (sigma * mult)
        return total

    def solve_for_operator(self, target: MPoly, degree: int):
        """All degree-d operators D with D(vol) = target.

        Returns ``(particular, kernel_basis)`` as operator polynomials, or
        ``None`` when no such operator exists.
        """
        target = target.extend(self.vars) if target.vars != self.vars else target
        if not target.is_zero() and (not target.is_homogeneous() or target.degree() != self.degree - degree):
            return None
        monos = monomials(len(self.vars), degree)
        if degree > self.degree:
            if not target.is_zero():
                return None
            return MPoly.const(self.vars, 0), [MPoly(self.vars, {m: 1}) for m in monos]
        monos, M = self.evaluation_map(degree)
        targets = monomials(len(self.vars), self.degree - degree)
        extra = set(target.terms) - set(targets)
        if extra:
            return None
        rhs = [target.terms.get(t, Fraction(0)) for t in targets]
        sol = solve_affine(M, rhs)
        if sol is None:
            return None
        part, ker = sol
        return _vec_to_poly(self.vars, monos, part), [_vec_to_poly(self.vars, monos, v) for v in ker]

    # presentation ----------------------------------------------------------

    def minimal_generators(self) -> dict[int, list[MPoly]]:
        """Annihilator generators not generated by lower degrees, per degree."""
        out = {}
        prev: list[MPoly] = []
        for d in range(1, self.degree + 2):
            monos = monomials(len(self.vars), d)
            if d <= self.degree:
                ann = self.annihilator[d]
            else:
                ann = [MPoly(self.vars, {m: 1}) for m in monos]
            products = []
            for g in prev:
                for v in self.vars:
                    products.append(g * MPoly.var(self.vars, v))
            span = [[p.terms.get(m, Fraction(0)) for m in monos] for p in products]
            r = rank(span, len(monos)) if span else 0
            new = []
            for g in ann:
                cand = span + [[g.terms.get(m, Fraction(0)) for m in monos]]
                r2 = rank(cand, len(monos))
                if r2 > r:
                    span, r = cand, r2
                    new.append(g)
            if new:
                out[d] = new
            prev = ann
        return out

    def presentation(self, prefix: str = "∂") -> str:
        gens = ", ".join(g.to_text(prefix) for d in sorted(self.minimal_generators())
                         for g in self.minimal_generators()[d])
        names = ",".join(prefix + v for v in self.vars)
        return f"Z[{names}]/({gens})"

    def report(self) -> dict:
        gens = self.minimal_generators()
        return {
            "vars": list(self.vars),
            "volume": self.vol.to_text(),
            "hilbert": list(self.hilbert),
            "total_dimension": self.total_dimension,
            "annihilator_generators": {str(d): [g.to_text("∂") for g in gs] for d, gs in sorted(gens.items())},
            "basis": {str(d): [m.to_text("∂") for m in b] for d, b in sorted(self.graded_basis.items())},
            "presentation": self.presentation(),
            "integral_socle": all(self.socle_pairing(MPoly(self.vars, {m: 1})).denominator == 1
                                  for m in monomials(len(self.vars), self.degree)),
        }


@dataclass(frozen=True, eq=False)
class RingClass:
    ring: KhpRing
    rep: MPoly
    canonical: MPoly = field(init=False)

    def __post_init__(self):
        if len(self.rep.vars) != len(self.ring.vars):
            raise ValueError("operator arity mismatch")
        object.__setattr__(self, "canonical", apply_operator(self.rep, self.ring.vol))

    def _same_ring(self, other: "RingClass"):
        if not isinstance(other, RingClass) or other.ring is not self.ring:
            raise ValueError("classes belong to different rings")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.element(MPoly.const(self.ring.vars, other))
        self._same_ring(other)
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __add__(self, other):
        self._same_ring(other)
        return RingClass(self.ring, self.rep + other.rep)

    def __sub__(self, other):
        self._same_ring(other)
        return RingClass(self.ring, self.rep - other.rep)

    def __neg__(self):
        return RingClass(self.ring, -self.rep)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingClass(self.ring, self.rep * other)
        self._same_ring(other)
        return RingClass(self.ring, self.rep * other.rep)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return RingClass(self.ring, self.rep ** k)

    def is_zero(self) -> bool:
        return self.canonical.is_zero()

    def degree(self) -> int:
        """Degree of a homogeneous nonzero class (-1 for zero)."""
        if self.is_zero():
            return -1
        return self.ring.degree - self.canonical.degree()

    def __repr__(self):
        return f"RingClass({self.rep.to_text('∂')})"


def build_ring(vol: MPoly, variables: Sequence[str] | None = None) -> KhpRing:
    return KhpRing(vol, variables)


def class_of_polytope(R: KhpRing, coords: Sequence) -> RingClass:
    return R.class_of_polytope(coords)


def multiply(x: RingClass, y: RingClass) -> RingClass:
    return x * y


def is_relation(R: KhpRing, D) -> bool:
    return R.is_relation(D)


def socle_pairing(R: KhpRing, x) -> Fraction:
    return R.socle_pairing(x)


def solve_for_operator(R: KhpRing, target: MPoly, degree: int):
    return R.solve_for_operator(target, degree)
