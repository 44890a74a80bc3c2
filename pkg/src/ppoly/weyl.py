"""Reflections, Grossberg-Karshon cubes and their dominant vertices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_core import MPoly, det, rat
from .polytope import ParamPolytope, Polytope, cayley_sum


@dataclass(frozen=True)
class BetaSequence:
    vectors: tuple
    gram: tuple

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(tuple(rat(x) for x in v) for v in self.vectors))
        object.__setattr__(self, "gram", tuple(tuple(rat(x) for x in r) for r in self.gram))
        n = len(self.gram)
        if any(len(r) != n for r in self.gram):
            raise ValueError("Gram matrix is not square")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix is not symmetric")
        for k in range(1, n + 1):
            if det([r[:k] for r in self.gram[:k]]) <= 0:
                raise ValueError("Gram matrix is not positive definite")
        for v in self.vectors:
            if len(v) != n:
                raise ValueError("vector length does not match the Gram matrix")
            if not any(v):
                raise ValueError("zero vector in beta sequence")

    def __len__(self):
        return len(self.vectors)

    @property
    def ambient(self) -> int:
        return len(self.gram)

    def inner(self, u, v) -> Fraction:
        return sum((u[i] * self.gram[i][j] * v[j] for i in range(len(u)) for j in range(len(v))
                    if u[i] and v[j]), Fraction(0))

    def pairing(self, alpha, beta) -> Fraction:
        """(alpha, beta) = 2 <alpha, beta> / <beta, beta>."""
        return 2 * self.inner(alpha, beta) / self.inner(beta, beta)

    def reflect_by(self, beta, alpha) -> tuple:
        c = self.pairing(alpha, beta)
        return tuple(a - c * b for a, b in zip(alpha, beta))

    def reflect(self, i: int, alpha) -> tuple:
        return self.reflect_by(self.vectors[i], tuple(rat(x) for x in alpha))

    def tail(self) -> "BetaSequence":
        """The sequence with the first vector removed."""
        return BetaSequence(self.vectors[1:], self.gram)


def type_a(rank: int) -> tuple[tuple, tuple]:
    """Simple roots e_i - e_{i+1} of A_rank in R^{rank+1} with the standard inner product."""
    n = rank + 1
    roots = []
    for i in range(rank):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        roots.append(tuple(v))
    gram = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return tuple(roots), gram


def rho_a(rank: int) -> tuple:
    return tuple(rank - i for i in range(rank + 1))


def betas_from_word(word: Sequence[int], roots: Sequence, gram) -> BetaSequence:
    """(beta_1..beta_l) = (alpha_{i_l}, ..., alpha_{i_1}); letters are 1-based."""
    return BetaSequence(tuple(roots[i - 1] for i in reversed(word)), gram)


def reflect(betas: BetaSequence, i: int, alpha) -> tuple:
    return betas.reflect(i, alpha)


@dataclass
class GKCube:
    betas: BetaSequence
    lam: tuple
    virtual: bool
    degenerate: bool

    @property
    def length(self) -> int:
        return len(self.betas)

    def chain_coefficients(self) -> list[list[Fraction]]:
        """Row k holds (beta_m, beta_k) for m < k, the coefficients of f_{k-1}."""
        b = self.betas
        return [[b.pairing(b.vectors[m], b.vectors[k]) for m in range(k)] for k in range(len(b))]

    def tops(self) -> list[Fraction]:
        return [self.betas.pairing(self.lam, v) for v in self.betas.vectors]

    def family(self) -> ParamPolytope:
        """The cube as a family in the weight coordinates lam_1..lam_r."""
        ell = self.length
        r = self.betas.ambient
        params = tuple(f"lam{i + 1}" for i in range(r))
        normals, offsets, labels = [], [], []
        chain = self.chain_coefficients()
        for k in range(ell):
            low = [0] * ell
            low[k] = -1
            normals.append(low)
            offsets.append(MPoly.const(params, 0))
            labels.append(f"x{k + 1}>=0")
            up = [0] * ell
            for m, c in enumerate(chain[k]):
                up[m] = c
            up[k] = 1
            normals.append(up)
            coeffs = [self.betas.pairing([int(i == j) for j in range(r)], self.betas.vectors[k]) for i in range(r)]
            offsets.append(MPoly.linear(params, {p: c for p, c in zip(params, coeffs)}))
            labels.append(f"x{k + 1}<=top")
        ref = {p: x for p, x in zip(params, self.lam)}
        return ParamPolytope(normals, offsets, params, ref, ell, labels)

    def polytope(self) -> Polytope:
        if self.virtual:
            raise ValueError("twisted cube is not a true polytope")
        return self.family().at()

    def chained_vertices(self) -> list[tuple]:
        """Vertices built coordinate by coordinate: (v, 0) and (v, top(v))."""
        verts = [()]
        chain = self.chain_coefficients()
        tops = self.tops()
        for k in range(self.length):
            nxt = []
            for v in verts:
                ub = tops[k] - sum((c * x for c, x in zip(chain[k], v)), Fraction(0))
                nxt.append(v + (Fraction(0),))
                if ub != 0:
                    nxt.append(v + (ub,))
            verts = nxt
        return sorted(set(verts))


def gk_cube(betas: BetaSequence, lam: Sequence) -> GKCube:
    lam = tuple(rat(x) for x in lam)
    if len(lam) != betas.ambient:
        raise ValueError("weight length does not match the ambient space")
    cube = GKCube(betas, lam, False, False)
    chain = cube.chain_coefficients()
    tops = cube.tops()
    verts = [()]
    virtual = degenerate = False
    for k in range(len(betas)):
        nxt = []
        for v in verts:
            ub = tops[k] - sum((c * x for c, x in zip(chain[k], v)), Fraction(0))
            if ub < 0:
                virtual = True
            elif ub == 0:
                degenerate = True
            nxt.extend([v + (Fraction(0),), v + (max(ub, Fraction(0)),)])
        verts = nxt
    cube.virtual = virtual
    cube.degenerate = degenerate
    return cube


def reflection_chain(betas: BetaSequence) -> list[tuple]:
    """s_{b1} ... s_{b_{j-1}} (b_j) for j = 1..l."""
    out = []
    for j, b in enumerate(betas.vectors):
        v = b
        for i in range(j - 1, -1, -1):
            v = betas.reflect(i, v)
        out.append(v)
    return out


def dominant_vertex(betas: BetaSequence, lam: Sequence) -> tuple:
    lam = tuple(rat(x) for x in lam)
    return tuple(betas.pairing(lam, v) for v in reflection_chain(betas))


def chevalley_pieri(betas: BetaSequence, lam: Sequence) -> tuple:
    """Coefficients of the class of P_I(lam) in the basis of the coordinate facets x_j = 0."""
    return dominant_vertex(betas, lam)


def facet_family(cube: GKCube) -> ParamPolytope:
    """The cube with one free support number per facet: zero_k for x_k >= 0, top_k for the upper bound."""
    fam = cube.family()
    ell = cube.length
    params = tuple(f"{kind}{k + 1}" for k in range(ell) for kind in ("zero", "top"))
    offsets = [MPoly.var(params, p) for p in params]
    ref = {}
    for p, o in zip(params, fam.offsets):
        ref[p] = o.evaluate(fam.reference)
    return ParamPolytope(fam.normals, offsets, params, ref, ell, fam.labels)


def chevalley_pieri_relation(cube: GKCube) -> MPoly:
    """sum (lam, beta_j) d_top_j - sum p_j d_zero_j, which should annihilate the volume."""
    fam = facet_family(cube)
    tops = cube.tops()
    p = dominant_vertex(cube.betas, cube.lam)
    coeffs = {}
    for j in range(cube.length):
        coeffs[f"top{j + 1}"] = tops[j]
        coeffs[f"zero{j + 1}"] = -p[j]
    return MPoly.linear(fam.params, coeffs)


def check_chevalley_pieri(cube: GKCube) -> bool:
    from .exact_core import apply_operator
    if cube.virtual or cube.degenerate:
        raise ValueError("needs a simple true cube")
    vol = facet_family(cube).volume_polynomial()
    return apply_operator(chevalley_pieri_relation(cube), vol).is_zero()


def is_generic(betas: BetaSequence, lam: Sequence) -> bool:
    return all(dominant_vertex(betas, lam))


def lemma_precondition(betas: BetaSequence, lam: Sequence) -> bool:
    """True tail cubes at lam and lam - beta_1, and a true full cube (so (lam, beta_1) > 0)."""
    if len(betas) < 1:
        return False
    lam = tuple(rat(x) for x in lam)
    if betas.pairing(lam, betas.vectors[0]) <= 0:
        return False
    full = gk_cube(betas, lam)
    if full.virtual or full.degenerate:
        return False
    if len(betas) == 1:
        return True
    tail = betas.tail()
    shifted = tuple(a - b for a, b in zip(lam, betas.vectors[0]))
    for mu in (lam, shifted):
        c = gk_cube(tail, mu)
        if c.virtual or c.degenerate:
            return False
    return True


def verify_lemma_demazure(betas: BetaSequence, lam: Sequence) -> bool:
    """Normal fan of P_I(lam) equals that of the Cayley sum of the tail cubes."""
    lam = tuple(rat(x) for x in lam)
    if not lemma_precondition(betas, lam):
        raise ValueError("lemma needs true cubes: the tails at lam and lam - beta_1, and the full cube")
    P = gk_cube(betas, lam).polytope()
    if len(betas) == 1:
        C = Polytope([(1,), (-1,)], [1, 0])
    else:
        tail = betas.tail()
        shifted = tuple(a - b for a, b in zip(lam, betas.vectors[0]))
        top = gk_cube(tail, shifted).polytope()
        bottom = gk_cube(tail, lam).polytope()
        C = cayley_sum(top, bottom)
    # Cayley height (last coordinate) becomes x_1
    ell = len(betas)
    perm = [ell - 1] + list(range(ell - 1))
    return P.normal_fan() == C.normal_fan().transformed(perm)
