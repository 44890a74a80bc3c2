"""Exact facet enumeration of the convex hull of rational points.

Double description on the homogenized polar cone, in integer arithmetic.
Lower-dimensional point sets are handled by working in coordinates of their
affine hull and adding the affine equations back as inequality pairs.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .exact_core import kernel, LinMap, rref


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    v = [Fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _dd_extreme_rays(rows: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {z : r . z <= 0 for all rows r}."""
    # initial basis of dim independent rows
    order = []
    basis_rows: list = []
    for i, r in enumerate(rows):
        cand = basis_rows + [list(map(Fraction, r))]
        if len(rref(cand, dim)[1]) == len(cand):
            basis_rows = cand
            order.append(i)
            if len(order) == dim:
                break
    if len(order) < dim:
        raise ValueError("cone is not pointed")
    # rays of {B z <= 0}: columns of -B^{-1}
    aug = [row + [Fraction(int(i == j)) for j in range(dim)] for i, row in enumerate(basis_rows)]
    red, _ = rref(aug, 2 * dim)
    inv = [row[dim:] for row in red]
    rays = []
    for j in range(dim):
        col = [-inv[i][j] for i in range(dim)]
        z = primitive(col)
        tight = frozenset(order[k] for k in range(dim) if k != j)
        rays.append((z, tight))

    seen = set(order)
    for i, r in enumerate(rows):
        if i in seen:
            continue
        seen.add(i)
        pos, neg, zero = [], [], []
        for z, t in rays:
            s = sum(a * b for a, b in zip(r, z))
            if s > 0:
                pos.append((z, t, s))
            elif s < 0:
                neg.append((z, t, s))
            else:
                zero.append((z, t | {i}))
        if not pos:
            continue
        new = [(z, t) for z, t, _ in neg] + zero
        all_tight = [t for _, t in rays]
        for zp, tp, sp in pos:
            for zn, tn, sn in neg:
                common = tp & tn
                if len(common) < dim - 2:
                    continue
                if any(common <= t for t in all_tight if t is not tp and t is not tn):
                    continue
                z = primitive([sp * b - sn * a for a, b in zip(zp, zn)])
                new.append((z, common | {i}))
        rays = new
    return [z for z, _ in rays]


def _affine_hull(points: list[list[Fraction]]):
    """Return (base point, pivot coordinates, equations a.x = b of the affine hull)."""
    n = len(points[0])
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    if diffs:
        red, piv = rref(diffs, n)
    else:
        red, piv = [], []
    # equations: normals orthogonal to all differences
    eqs = []
    if len(piv) < n:
        basis = kernel(LinMap(red, n)) if red else [
            [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for a in basis:
            a = primitive(a)
            eqs.append((a, sum(x * y for x, y in zip(a, p0))))
    return piv, eqs


def hull_inequalities(points: Sequence[Sequence]) -> list[tuple[tuple[int, ...], Fraction]]:
    """Irredundant inequalities ``a . x <= b`` describing conv(points).

    Normals are primitive integer vectors.  For lower-dimensional input the
    affine hull equations appear as pairs ``a.x <= b`` and ``-a.x <= -b``.
    """
    pts = sorted({tuple(Fraction(x) for x in p) for p in points})
    if not pts:
        raise ValueError("empty point set")
    n = len(pts[0])
    pts_l = [list(p) for p in pts]
    piv, eqs = _affine_hull(pts_l)
    out = []
    for a, b in eqs:
        out.append((a, Fraction(b)))
        out.append((tuple(-x for x in a), -Fraction(b)))
    k = len(piv)
    if k == 0:
        return out
    proj = sorted({tuple(p[c] for c in piv) for p in pts})
    if k == 1:
        lo, hi = min(proj)[0], max(proj)[0]
        e = [0] * n
        e[piv[0]] = 1
        out.append((tuple(e), hi))
        out.append((tuple(-x for x in e), -lo))
        return out
    rows = []
    for p in proj:
        den = reduce(lcm, (x.denominator for x in p), 1)
        rows.append(tuple(int(x * den) for x in p) + (-den,))
    for z in _dd_extreme_rays(rows, k + 1):
        h = z[:k]
        if not any(h):
            continue
        normal = [0] * n
        for c, x in zip(piv, h):
            normal[c] = x
        g = reduce(gcd, normal, 0)
        normal = tuple(x // g for x in normal)
        out.append((normal, Fraction(z[k], g)))
    return out
