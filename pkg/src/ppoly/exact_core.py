"""Exact rationals, sparse multivariate polynomials and linear algebra over Q."""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Mapping, Sequence

Rat = Fraction


def rat(x) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact computations")
    return Fraction(x)


class MPoly:
    """Sparse polynomial with Fraction coefficients in a fixed list of variables.

    Terms are stored as ``{exponent tuple: coefficient}`` with zero
    coefficients pruned.  Instances are treated as immutable.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        n = len(self.vars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"exponent {exps} does not match variables {self.vars}")
            c = rat(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def const(cls, variables, c=0) -> "MPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "MPoly":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise KeyError(f"unknown variable {name!r}")
        return cls(variables, {exps: 1})

    @classmethod
    def linear(cls, variables, coeffs: Mapping[str, object], const=0) -> "MPoly":
        """Affine form ``const + sum coeffs[v] * v``."""
        variables = tuple(variables)
        n = len(variables)
        terms = {(0,) * n: rat(const)}
        for name, c in coeffs.items():
            if name not in variables:
                raise KeyError(f"unknown variable {name!r}")
            i = variables.index(name)
            e = tuple(1 if k == i else 0 for k in range(n))
            terms[e] = terms.get(e, 0) + rat(c)
        return cls(variables, terms)

    # basic protocol -------------------------------------------------------

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        return MPoly.const(self.vars, rat(other))

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MPoly.const(self.vars, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = rat(other)
            return MPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = rat(other)
        return self * (1 / other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # inspection -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending lexicographic exponent order."""
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "MPoly":
        return MPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def depends_on(self, name: str) -> bool:
        i = self.vars.index(name)
        return any(e[i] for e in self.terms)

    def coefficient_in(self, name: str, k: int) -> "MPoly":
        """Coefficient of ``name**k``, as a polynomial in the same variables."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return MPoly(self.vars, out)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    # calculus and substitution -------------------------------------------

    def diff(self, name: str, order: int = 1) -> "MPoly":
        if name not in self.vars:
            raise KeyError(f"unknown variable {name!r}")
        if order < 0:
            raise ValueError("negative derivative order")
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] < order:
                continue
            k = e[i]
            f = factorial(k) // factorial(k - order)
            out[e[:i] + (k - order,) + e[i + 1:]] = c * f
        return MPoly(self.vars, out)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        vals = [rat(point[v]) for v in self.vars]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def partial_evaluate(self, point: Mapping[str, object]) -> "MPoly":
        """Substitute numbers for some variables, keeping the variable list."""
        idx = [(i, rat(point[v])) for i, v in enumerate(self.vars) if v in point]
        out: dict = {}
        for e, c in self.terms.items():
            e = list(e)
            for i, x in idx:
                c *= x ** e[i]
                e[i] = 0
            e = tuple(e)
            out[e] = out.get(e, 0) + c
        return MPoly(self.vars, out)

    def substitute(self, images: Mapping[str, "MPoly"], new_vars: Sequence[str]) -> "MPoly":
        """Compose: replace each variable by a polynomial in ``new_vars``.

        Variables missing from ``images`` must also exist in ``new_vars`` and
        are carried over unchanged.
        """
        new_vars = tuple(new_vars)
        subs = []
        for v in self.vars:
            if v in images:
                img = images[v]
                if img.vars != new_vars:
                    img = img.extend(new_vars)
                subs.append(img)
            else:
                subs.append(MPoly.var(new_vars, v))
        out = MPoly.const(new_vars, 0)
        cache: dict = {}
        for e, c in self.terms.items():
            t = MPoly.const(new_vars, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = subs[i] ** k
                    t = t * cache[key]
            out = out + t
        return out

    def extend(self, new_vars: Sequence[str]) -> "MPoly":
        """Re-express in a variable list that contains all used variables."""
        new_vars = tuple(new_vars)
        pos = []
        for i, v in enumerate(self.vars):
            if v in new_vars:
                pos.append(new_vars.index(v))
            else:
                pos.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for i, k in enumerate(e):
                if k:
                    if pos[i] is None:
                        raise ValueError(f"variable {self.vars[i]!r} missing from {new_vars}")
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return MPoly(new_vars, out)

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        return MPoly([mapping.get(v, v) for v in self.vars], self.terms)

    # text ---------------------------------------------------------------

    def to_text(self, prefix: str = "") -> str:
        """Render as ``c * a^i * b^j + ...`` (descending lex order)."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for v, k in zip(self.vars, e):
                if k == 1:
                    factors.append(f"{prefix}{v}")
                elif k > 1:
                    factors.append(f"{prefix}{v}^{k}")
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                term = body if mag == 1 else f"{mag}*{body}"
            else:
                term = str(mag)
            parts.append(("-" if c < 0 else "+", term))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MPoly({self.vars}, {self.to_text()!r})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [{"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MPoly":
        return cls(data["vars"], {tuple(t["exps"]): Fraction(t["coeff"]) for t in data["terms"]})


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_poly(text: str, variables: Sequence[str]) -> MPoly:
    """Parse the text format produced by :meth:`MPoly.to_text`.

    Accepts ``*`` between factors, ``^`` or ``**`` for powers, fractions
    ``p/q`` as coefficients, and an optional ``∂`` prefix on variable names.
    """
    variables = tuple(variables)
    text = text.replace("**", "^").replace("∂", "").replace(" ", "")
    if text in ("", "0"):
        return MPoly.const(variables, 0)
    out = MPoly.const(variables, 0)
    pos = 0
    for m in re.finditer(r"([+-]?)([^+-]+)", text):
        if m.start() != pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(sign)
        exps = [0] * len(variables)
        for factor in m.group(2).split("*"):
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in variables:
                raise ValueError(f"unknown variable {name!r} in {text!r}")
            exps[variables.index(name)] += int(power) if power else 1
        out = out + MPoly(variables, {tuple(exps): coeff})
    if pos != len(text):
        raise ValueError(f"cannot parse polynomial {text!r}")
    return out


def monomials(nvars: int, degree: int) -> list[tuple]:
    """Exponent vectors of total ``degree``, in descending lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def poly_diff(p: MPoly, var: str, order: int = 1) -> MPoly:
    return p.diff(var, order)


def apply_operator(D: MPoly, p: MPoly) -> MPoly:
    """Apply the constant-coefficient differential operator ``D`` to ``p``.

    The i-th variable of ``D`` stands for the partial derivative with respect
    to the i-th variable of ``p``; names need not agree, arity must.
    """
    if len(D.vars) != len(p.vars):
        raise ValueError(f"operator arity {len(D.vars)} does not match polynomial arity {len(p.vars)}")
    out: dict = {}
    for de, dc in D.terms.items():
        for e, c in p.terms.items():
            if any(k < j for k, j in zip(e, de)):
                continue
            f = dc * c
            for k, j in zip(e, de):
                if j:
                    f *= factorial(k) // factorial(k - j)
            ne = tuple(k - j for k, j in zip(e, de))
            out[ne] = out.get(ne, 0) + f
    return MPoly(p.vars, out)


# ---------------------------------------------------------------------------
# linear algebra


class LinMap:
    """Dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[object]], cols: int | None = None):
        self.entries = [[rat(x) for x in row] for row in entries]
        self.rows = len(self.entries)
        if cols is None:
            if not self.entries:
                raise ValueError("column count required for an empty matrix")
            cols = len(self.entries[0])
        self.cols = cols
        if any(len(r) != cols for r in self.entries):
            raise ValueError("ragged matrix")

    def __matmul__(self, v: Sequence[Fraction]) -> list[Fraction]:
        return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.entries]

    def rref(self):
        return rref(self.entries, self.cols)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> list[list[Fraction]]:
        return kernel(self)


def rref(rows: Sequence[Sequence[Fraction]], cols: int):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def kernel(M: LinMap) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column (in column order)."""
    red, pivots = M.rref()
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_affine(M: LinMap, rhs: Sequence[object]):
    """Solve ``M x = rhs``.

    Returns ``(particular, kernel_basis)`` with free variables set to zero in
    the particular solution, or ``None`` if the system is inconsistent.
    """
    rhs = [rat(x) for x in rhs]
    if len(rhs) != M.rows:
        raise ValueError("right-hand side length mismatch")
    aug = [row + [b] for row, b in zip(M.entries, rhs)]
    red, pivots = rref(aug, M.cols + 1)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [Fraction(0)] * M.cols
    for row, p in zip(red, pivots):
        x[p] = row[-1]
    return x, kernel(M)


def solve_square(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, or None when singular."""
    n = len(A)
    m = [list(map(rat, row)) + [rat(x)] for row, x in zip(A, b)]
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c]), None)
        if pr is None:
            return None
        m[c], m[pr] = m[pr], m[c]
        piv = m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / piv
                m[i] = [a - f * bb for a, bb in zip(m[i], m[c])]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = m[i][n] - sum(m[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s / m[i][i]
    return x


def inverse(A: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    n = len(A)
    aug = [list(map(rat, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        return None
    return [row[n:] for row in red]


def det(A: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(A)
    m = [list(map(rat, row)) for row in A]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c]), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            sign = -sign
        piv = m[c][c]
        result *= piv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / piv
                m[i] = [a - f * bb for a, bb in zip(m[i], m[c])]
    return sign * result


def rank(rows: Sequence[Sequence[Fraction]], cols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, cols if cols is not None else len(rows[0]))[1])


def poly_det(M: Sequence[Sequence[MPoly]], variables: Sequence[str]) -> MPoly:
    """Determinant of a square matrix of polynomials by minor expansion."""
    n = len(M)
    if n == 0:
        return MPoly.const(variables, 1)
    memo: dict = {}

    def rec(row: int, mask: int) -> MPoly:
        # mask marks columns still available; rows row..n-1 remain
        if row == n:
            return MPoly.const(variables, 1)
        key = (row, mask)
        if key in memo:
            return memo[key]
        total = MPoly.const(variables, 0)
        sign = 1
        for c in range(n):
            if mask >> c & 1:
                entry = M[row][c]
                if entry:
                    sub = rec(row + 1, mask & ~(1 << c))
                    term = entry * sub
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[key] = total
        return total

    return rec(0, (1 << n) - 1)
