"""Command-line front end: ``ppoly <subcommand> ...``.

Exit status is 0 when every check passes, 1 on a verification failure and 2
on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path


from .khp_ring import KhpRing
from .polytope import ParamPolytope, Polytope, PolytopeError, concrete
from .pushpull import TruncationSpec, TruncationError, verify_theorem_main, check_ode

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        tmp = Path(output).with_suffix(Path(output).suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, output)
    else:
        sys.stdout.write(text)


def _read_json(path: str | None):
    try:
        text = Path(path).read_text(encoding="utf-8") if path and path != "-" else sys.stdin.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad number list {text!r}") from exc


def load_family(data) -> ParamPolytope:
    """Polytope JSON: an H-family, ``{"points": [...]}``, or any document with a ``polytope`` key."""
    try:
        if isinstance(data, dict) and "polytope" in data:
            data = data["polytope"]
        if isinstance(data, dict) and "points" in data:
            return concrete(Polytope.from_points([[Fraction(x) for x in p] for p in data["points"]]))
        return ParamPolytope.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot read polytope: {exc}") from exc


def _canonical(fam: ParamPolytope) -> dict:
    P = fam.at()
    P.check()
    irr = fam.irredundant()
    out = irr.to_json()
    out["vertices"] = [[str(x) for x in v] for v in sorted(P.vertices)]
    out["f_vector"] = P.f_vector()
    out["volume"] = str(P.volume())
    return out


# subcommands ---------------------------------------------------------------

def cmd_build(args) -> int:
    fam = load_family(_read_json(args.input))
    _emit(_dump(_canonical(fam)), args.output)
    return EXIT_OK


def cmd_volume(args) -> int:
    fam = load_family(_read_json(args.input))
    if fam.params:
        text = fam.volume_polynomial().to_text()
    else:
        text = str(fam.at().volume())
    _emit(text + "\n", args.output)
    return EXIT_OK


def cmd_ring(args) -> int:
    fam = load_family(_read_json(args.input))
    R = KhpRing(fam.volume_polynomial())
    rep = R.report()
    if args.max_degree is not None:
        rep["annihilator_generators"] = {d: g for d, g in rep["annihilator_generators"].items()
                                         if int(d) <= args.max_degree}
    rep["polytope"] = fam.to_json()
    _emit(_dump(rep), args.output)
    return EXIT_OK


def cmd_pushpull_verify(args) -> int:
    data = _read_json(args.input)
    try:
        spec = TruncationSpec.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read truncation spec: {exc}") from exc
    rep = verify_theorem_main(spec, fail_fast=args.fail_fast)
    out = rep.to_json()
    if rep.passed:
        out["ode"] = check_ode(spec)
    out["polytope"] = spec.family.to_json()
    _emit(_dump(out), args.output)
    return EXIT_OK if rep.passed and out.get("ode", False) else EXIT_FAIL


def cmd_gk(args) -> int:
    from . import weyl
    import random

    roots, gram = weyl.type_a(args.rank)
    try:
        word = [int(x) for x in args.word.split(",")]
    except ValueError as exc:
        raise InputError(f"bad word {args.word!r}") from exc
    if any(not 1 <= w <= args.rank for w in word):
        raise InputError(f"letters must lie in 1..{args.rank}")
    betas = weyl.betas_from_word(word, roots, gram)
    if args.lam:
        lams = [tuple(_fractions(args.lam))]
    else:
        rng = random.Random(args.seed)
        lams = []
        for _ in range(args.samples):
            parts = sorted((rng.randint(0, 6) for _ in range(args.rank)), reverse=True)
            lams.append(tuple(Fraction(x) for x in parts + [0]))
    if any(len(l) != args.rank + 1 for l in lams):
        raise InputError(f"weights need {args.rank + 1} coordinates")
    results, ok = [], True
    for lam in lams:
        cube = weyl.gk_cube(betas, lam)
        p = weyl.dominant_vertex(betas, lam)
        entry = {"lambda": [str(x) for x in lam], "virtual": cube.virtual, "degenerate": cube.degenerate,
                 "dominant_vertex": [str(x) for x in p]}
        if not cube.virtual:
            verts = cube.polytope().vertices
            entry["vertices"] = [[str(x) for x in v] for v in sorted(verts)]
            entry["dominant_in_vertices"] = p in verts
            ok = ok and entry["dominant_in_vertices"]
            entry["polytope"] = cube.family().to_json()
        pre = weyl.lemma_precondition(betas, lam)
        entry["lemma_precondition"] = pre
        if pre:
            entry["lemma_holds"] = weyl.verify_lemma_demazure(betas, lam)
            ok = ok and entry["lemma_holds"]
        results.append(entry)
    out = {"rank": args.rank, "word": word, "betas": [[str(x) for x in b] for b in betas.vectors],
           "seed": args.seed, "results": results, "passed": ok}
    _emit(_dump(out), args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fflv(args) -> int:
    from .bott_samelson import fflv_concrete
    lam = _fractions(args.lambdas)
    if len(lam) < 2:
        raise InputError("need at least two weights")
    try:
        P = fflv_concrete(lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = _canonical(concrete(P))
    out["lambdas"] = [str(x) for x in lam]
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_tower(args) -> int:
    from .bott_samelson import (build_tower_12132, step_passed, check_minkowski_decomposition,
                                check_prop_self_intersection)
    steps = build_tower_12132(fail_fast=args.fail_fast)
    out = {"seed": args.seed, "steps": [s.to_json() for s in steps]}
    ok = all(step_passed(s) for s in steps)
    if len(steps) == 5 and not (args.fail_fast and not ok):
        mok, res = check_minkowski_decomposition(args.samples, args.seed, steps[-1].polytope_family)
        out["minkowski"] = {"passed": mok, "points": [r.to_json() for r in res]}
        prop = check_prop_self_intersection(steps[-1].ring.vol)
        out["self_intersection"] = prop
        out["polytope"] = steps[-1].polytope_family.to_json()
        ok = ok and mok and prop["passed"]
    out["passed"] = ok
    _emit(_dump(out), args.output)
    return EXIT_OK if ok else EXIT_FAIL


# figures --------------------------------------------------------------------

def _polygon_order(pts):
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))


def svg_polygon(P: Polytope, scale: int = 60, pad: int = 20) -> str:
    pts = _polygon_order(P.vertices)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    w = float(max(xs) - min(xs)) * scale + 2 * pad
    h = float(max(ys) - min(ys)) * scale + 2 * pad
    coords = " ".join(f"{float(x - min(xs)) * scale + pad:g},{h - (float(y - min(ys)) * scale + pad):g}" for x, y in pts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:g}" height="{h:g}">\n'
            f'  <polygon points="{coords}" fill="#d8e4f0" stroke="black" stroke-width="2"/>\n</svg>\n')


def off_polytope(P: Polytope) -> str:
    """OFF text for a full-dimensional 3-polytope, facets ordered counterclockwise from outside."""
    verts = P.vertices
    idx = {v: i for i, v in enumerate(verts)}
    faces = []
    for i, vs in sorted(P.facet_map.items()):
        fv = [verts[k] for k in sorted(vs)]
        n = [float(x) for x in P.A[i]]
        c = [sum(float(v[k]) for v in fv) / len(fv) for k in range(3)]
        # basis of the facet plane
        u = [float(fv[0][k]) - c[k] for k in range(3)]
        w = [n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]]

        def ang(v):
            d = [float(v[k]) - c[k] for k in range(3)]
            return math.atan2(sum(a * b for a, b in zip(d, w)), sum(a * b for a, b in zip(d, u)))

        faces.append([idx[v] for v in sorted(fv, key=ang)])
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(f"{float(x):g}" for x in v) for v in verts]
    lines += [f"{len(f)} " + " ".join(map(str, f)) for f in faces]
    return "\n".join(lines) + "\n"


def figure_polytopes() -> dict[str, Polytope]:
    tri = Polytope.from_points([(0, 0), (1, 0), (0, 1)])
    seg = Polytope.from_points([(0, 0), (0, 1)])
    from .polytope import minkowski_sum, cayley_sum
    q1 = minkowski_sum(tri, seg)
    trap = Polytope.from_points([(0, 0), (2, 0), (0, 1), (1, 1)])
    q2 = minkowski_sum(trap, seg)
    return {
        "triangle_P": tri, "triangle_Q": q1, "triangle_Delta": cayley_sum(tri, q1),
        "trapezoid_P": trap, "trapezoid_Q": q2, "trapezoid_Delta": cayley_sum(trap, q2),
    }


def cmd_figures(args) -> int:
    outdir = Path(args.output or "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, P in figure_polytopes().items():
        if P.dim == 2:
            path = outdir / f"{name}.svg"
            path.write_text(svg_polygon(P), encoding="utf-8")
        else:
            path = outdir / f"{name}.off"
            path.write_text(off_polytope(P), encoding="utf-8")
        written.append(path.name)
    sys.stdout.write(_dump({"written": sorted(written), "directory": str(outdir)}))
    return EXIT_OK


COMMANDS = {
    "build": (cmd_build, "canonicalize a polytope JSON"),
    "volume": (cmd_volume, "print the volume polynomial"),
    "ring": (cmd_ring, "Khovanskii-Pukhlikov ring presentation and Hilbert function"),
    "pushpull-verify": (cmd_pushpull_verify, "check the projective-bundle presentation for a truncation"),
    "gk": (cmd_gk, "Grossberg-Karshon cubes and the Cayley decomposition"),
    "fflv": (cmd_fflv, "FFLV polytope for given weights"),
    "tower": (cmd_tower, "the five-step push-pull tower for the word (1,2,1,3,2)"),
    "figures": (cmd_figures, "SVG/OFF pictures of the two push-pull examples"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ppoly", description="Exact push-pull polytopes and their rings.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--output", "-o")
        if name in ("build", "volume", "ring", "pushpull-verify"):
            p.add_argument("--input", "-i", required=True)
        if name == "ring":
            p.add_argument("--max-degree", type=int)
        if name in ("pushpull-verify", "tower"):
            p.add_argument("--fail-fast", action="store_true")
        if name in ("tower", "gk"):
            p.add_argument("--samples", type=int, default=3 if name == "tower" else 20)
            p.add_argument("--seed", type=int, default=0)
        if name == "gk":
            p.add_argument("--rank", type=int, default=2)
            p.add_argument("--word", required=True)
            p.add_argument("--lam")
        if name == "fflv":
            p.add_argument("--lambdas", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        return func(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except (PolytopeError, TruncationError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
