"""Command-line front end.

Exit codes: 0 when every verdict passes, 1 when a verification fails, 2 on
input errors (bad scene, unknown names, malformed ranges).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .chowring import (
    C,
    CONIFOLD,
    E,
    H,
    L,
    DivisorClass,
    adjunction_value,
    canonical_class,
    curve_genus,
    intersect,
    solve_divisor,
    todd_class,
    total_chern_class,
)
from .cohom import line_bundle_cohomology, rhom_dims
from .errors import SodError
from .ktheory import euler_characteristic, euler_pairing, kclass_of_line_bundle
from .scene import Scene, example54_scene, read_scene
from .sod import (
    check_compatibility,
    check_disjointness,
    gram_matrix,
    hilbert_polynomial,
    induce_sod,
    is_upper_unitriangular,
    mutate,
    positivity_check,
    verify_exceptional,
)

TABLE_LIMIT = 12


class Output:
    """Collects human-readable lines and the machine-readable report body."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet
        self.report: dict = {}

    def say(self, line: str = "") -> None:
        if not self.quiet:
            print(line)

    def write_json(self, path: str | None) -> None:
        if path:
            Path(path).write_text(render_json(self.report), encoding="utf-8")


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _fmt_matrix(rows) -> list[str]:
    width = max((len(str(x)) for r in rows for x in r), default=1)
    return ["  [" + " ".join(str(x).rjust(width) for x in r) + "]" for r in rows]


# -- example54 -----------------------------------------------------------------


def run_example54(out: Output) -> bool:
    scene = example54_scene()
    g = scene.geometry
    ok: dict[str, bool] = {}

    out.say("Conifold xy - zw = 0, small resolution Y = P(O(-1) + O(-1) + O) over P^1")
    k = canonical_class(g)
    chi_o = todd_class(g).component(g.dimension).degree()
    euler_top = total_chern_class(g).component(g.dimension).degree()
    out.report["geometry"] = {
        "twists": list(g.twists),
        "dimension": g.dimension,
        "canonical_class": k.to_json(),
        "chi_O_Y": str(chi_o),
        "topological_euler": str(euler_top),
    }
    out.say(f"  K_Y = {g.format_divisor(k)}, chi(O_Y) = deg td_3 = {chi_o}, deg c_3 = {euler_top}")
    ok["chi_O_Y"] = chi_o == 1

    table = {f"{dn}.{cn}": intersect(d, c, g) for dn, d in (("E", E), ("H", H)) for cn, c in (("C", C), ("L", L))}
    table["K.C"] = intersect(k, C, g)
    table["K.L"] = intersect(k, L, g)
    out.report["intersections"] = table
    out.say("Intersection table")
    out.say(f"  E.C = {table['E.C']}  H.C = {table['H.C']}  E.L = {table['E.L']}  H.L = {table['H.L']}")
    out.say(f"  K_Y.C = {table['K.C']}  K_Y.L = {table['K.L']}")
    ok["intersections"] = [table[x] for x in ("E.C", "H.C", "E.L", "H.L", "K.C")] == [0, 1, 1, 0, 0]

    # K_{D1}.C = 2g - 2 - C^2_{D1} = -1, K_Y.C = 0 and adjunction give D1.C = -1
    d1_c = -1 - table["K.C"]
    d1 = solve_divisor([(C, d1_c), (L, 1)], g)
    adj = adjunction_value(d1, C, g)
    genus = curve_genus(d1, C, g)
    out.report["d1"] = {
        "constraints": {"C": d1_c, "L": 1},
        "divisor": d1.to_json(),
        "adjunction_K_D1.C": adj,
        "genus_C": str(genus),
    }
    out.say(f"D1 = {g.format_divisor(d1)}   (D1.C = {d1_c}, D1.L = 1; (K_Y + D1).C = {adj}, g(C) = {genus})")
    ok["d1"] = d1 == DivisorClass(1, -1) and adj == -1 and genus == 0

    coll = scene.collection("projective_bundle")
    verdict = verify_exceptional(coll)
    gram = gram_matrix(coll)
    out.report["collection"] = {
        "objects": coll.names,
        "gram": gram,
        "ext_table": verdict.details["ext_table"],
        "verdict": verdict.label,
    }
    out.say(f"Projective bundle collection <{', '.join(coll.names)}>: {verdict.label} (Ext level)")
    for line in _fmt_matrix(gram):
        out.say(line)
    ok["exceptional"] = bool(verdict) and is_upper_unitriangular(gram)

    ext = rhom_dims(DivisorClass(-2, 1), DivisorClass(-1, -1), g)
    out.report["extension"] = {"src": "O(-2E+H)", "dst": "O(-E-H)", "ext_dims": ext.to_json()}
    out.say(f"Ext^*(O(-2E+H), O(-E-H)) = {ext.to_json()}  (one-dimensional Ext^1: rank-2 bundle calE)")
    ok["extension"] = ext.to_json() == [0, 1, 0, 0]

    step = scene.mutations[0]
    mutated = scene.collection(step["result"])
    new = mutated[step["index"]]
    cal_e = scene.objects["calE"]
    back = mutate(mutated, step["index"], "right")
    mgram = gram_matrix(mutated)
    mutation_ok = (
        new.kclass.ch == -cal_e.kclass.ch
        and all(a.kclass.ch == b.kclass.ch for a, b in zip(back, coll))
        and gram_matrix(back) == gram
        and is_upper_unitriangular(mgram)
    )
    out.report["mutation"] = {
        "index": step["index"],
        "direction": step["direction"],
        "objects": mutated.names,
        "new_class": str(new.kclass),
        "equals_calE_shift_minus_1": new.kclass.ch == -cal_e.kclass.ch,
        "gram": mgram,
        "right_after_left_is_identity": back.names == coll.names,
    }
    out.say(f"Left mutation at {step['index']}: <{', '.join(mutated.names)}>")
    out.say(f"  [{new.name}] = {new.kclass} = [calE[-1]]")
    ok["mutation"] = mutation_ok

    witness = scene.sod.witnesses["C"]
    total = None
    for name, m in witness:
        term = scene.objects[name].kclass * m
        total = term if total is None else total + term
    target = scene.contraction.generator("C", g)
    out.report["koszul"] = {
        "witness": [[n, m] for n, m in witness],
        "ch": total.ch.to_json(),
        "matches_O_C(-1)": total.ch == target.ch,
        "chi": euler_characteristic(target),
    }
    out.say(f"Koszul: ch({total}) = {total.ch} = ch(O_C(-1)); chi(O_C(-1)) = {euler_characteristic(target)}")
    ok["koszul"] = total.ch == target.ch and euler_characteristic(target) == 0

    p_h, p_e = hilbert_polynomial(target, H), hilbert_polynomial(target, E)
    pos = positivity_check(E + H, scene.contraction, g)
    out.report["hilbert"] = {"H": p_h.to_json(), "E": p_e.to_json(), "positivity_E+H": pos.to_json()}
    out.say(f"Hilbert polynomials of O_C(-1): P_H = {p_h}, P_E = {p_e}; E + H curve-positive: {pos.label}")
    ok["hilbert"] = str(p_h) == "n" and str(p_e) == "0" and bool(pos)

    compat = check_compatibility(scene.sod, scene.contraction)
    disjoint = check_disjointness(scene.sod, scene.contraction)
    out.report["compatibility"] = compat.to_json()
    out.report["disjointness"] = disjoint.to_json()
    out.say(f"Compatibility: {compat.label}   Disjointness: {disjoint.label}")
    ok["compatibility"] = bool(compat)
    ok["disjointness"] = bool(disjoint)

    try:
        induced = induce_sod(scene.sod, scene.contraction)
    except SodError as exc:
        out.report["induced"] = {"error": exc.code}
        out.say(f"Induced decomposition: FAILED ({exc})")
        ok["induced"] = False
    else:
        out.report["induced"] = induced.to_json()
        out.say("Induced decomposition D^b(X) = <A1, A2, A3, A4>:")
        for line in str(induced).splitlines():
            out.say(f"  {line}")
        ok["induced"] = len(induced.blocks) == 4 and induced.blocks[-1][1] == ("O_X",)

    out.report["checks"] = {k: ("PASS" if v else "FAIL") for k, v in ok.items()}
    status = all(ok.values())
    out.report["status"] = "PASS" if status else "FAIL"
    out.say(f"Overall: {out.report['status']}")
    return status


def cmd_example54(args) -> int:
    out = Output(args.quiet)
    status = run_example54(out)
    out.write_json(args.json)
    return 0 if status else 1


# -- verify / mutate -----------------------------------------------------------


def _scene(args) -> Scene:
    if not args.scene:
        return example54_scene()
    return read_scene(args.scene)


def cmd_verify(args) -> int:
    scene = _scene(args)
    coll = scene.collection(args.collection)
    verdict = verify_exceptional(coll)
    out = Output(args.quiet)
    out.report = {"collection": args.collection, "objects": coll.names, **verdict.to_json()}
    out.say(f"{args.collection}: {verdict.label} ({verdict.details['level']} level)")
    if not verdict:
        src, dst = verdict.details["witness"]
        out.say(f"  first obstruction: RHom({src}, {dst}) != 0 with {src} after {dst}")
    out.write_json(args.json)
    return 0 if verdict else 1


def cmd_mutate(args) -> int:
    scene = _scene(args)
    coll = scene.collection(args.collection)
    result = mutate(coll, args.index, args.direction)
    gram = gram_matrix(result)
    verdict = verify_exceptional(result)
    out = Output(args.quiet)
    out.report = {
        "collection": args.collection,
        "index": args.index,
        "direction": args.direction,
        "objects": result.names,
        "classes": [str(o.kclass) for o in result],
        "gram": gram,
        "verdict": verdict.label,
    }
    out.say(f"<{', '.join(result.names)}>")
    for line in _fmt_matrix(gram):
        out.say(line)
    out.say(f"exceptional: {verdict.label}")
    out.write_json(args.json)
    return 0 if verdict else 1


# -- table ---------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?$")


def parse_range(text: str) -> range:
    m = _RANGE.match(text)
    if not m:
        raise SodError("bad-range", f"malformed range {text!r}; expected LO..HI")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if lo > hi or abs(lo) > TABLE_LIMIT or abs(hi) > TABLE_LIMIT:
        raise SodError("bad-range", f"range {text!r} must satisfy -{TABLE_LIMIT} <= LO <= HI <= {TABLE_LIMIT}")
    return range(lo, hi + 1)


def cmd_table(args) -> int:
    a_range, b_range = parse_range(args.a), parse_range(args.b)
    g = CONIFOLD
    out = Output(args.quiet)
    rows, mismatches = [], []
    structure = kclass_of_line_bundle(DivisorClass(0, 0), g)
    out.say(f"{'a':>4} {'b':>4}  {'h^0':>6} {'h^1':>6} {'h^2':>6} {'h^3':>6}  {'chi':>6} {'HRR':>6}")
    for a in a_range:
        for b in b_range:
            d = DivisorClass(a, b)
            h = line_bundle_cohomology(d, g)
            hrr = euler_pairing(structure, kclass_of_line_bundle(d, g))
            chi = h.euler_characteristic()
            rows.append({"E": a, "H": b, "h": h.to_json(), "chi": chi, "hrr": hrr})
            if chi != hrr:
                mismatches.append([a, b])
            out.say(f"{a:>4} {b:>4}  " + " ".join(f"{x:>6}" for x in h) + f"  {chi:>6} {hrr:>6}")
    out.report = {"rows": rows, "mismatches": mismatches}
    out.write_json(args.json)
    if mismatches:
        print(f"HRR mismatch at {mismatches}", file=sys.stderr)
        return 1
    return 0


# -- compat / induce -----------------------------------------------------------


def _need_sod(scene: Scene) -> None:
    if scene.sod is None or scene.contraction is None:
        raise SodError("scene", "scene needs both 'sod' and 'contraction' sections")


def cmd_compat(args) -> int:
    scene = _scene(args)
    _need_sod(scene)
    compat = check_compatibility(scene.sod, scene.contraction)
    disjoint = check_disjointness(scene.sod, scene.contraction)
    out = Output(args.quiet)
    out.report = {"compatibility": compat.to_json(), "disjointness": disjoint.to_json()}
    for v in (compat, disjoint):
        extra = f" ({v.reason})" if v.reason else ""
        out.say(f"{v.check}: {v.label}{extra}")
    if compat.reason == "missing-witness":
        out.say(f"  unresolved curves: {', '.join(compat.details['unresolved'])}")
    if not disjoint:
        out.say("  adjacent curves in different blocks: " + ", ".join("-".join(p) for p in disjoint.details["offending"]))
    out.write_json(args.json)
    return 0 if compat and disjoint else 1


def cmd_induce(args) -> int:
    scene = _scene(args)
    _need_sod(scene)
    out = Output(args.quiet)
    try:
        report = induce_sod(scene.sod, scene.contraction)
    except SodError as exc:
        if exc.code != "preconditions-failed":
            raise
        failed = [v for v in exc.details["verdicts"] if not v]
        out.report = {"status": "FAIL", "verdicts": [v.to_json() for v in exc.details["verdicts"]]}
        for v in failed:
            out.say(f"{v.check}: FAIL ({v.reason})")
            if v.reason == "missing-witness":
                out.say(f"  unresolved curves: {', '.join(v.details['unresolved'])}")
            if v.check == "disjointness":
                out.say("  adjacent curves in different blocks: " + ", ".join("-".join(p) for p in v.details["offending"]))
        out.write_json(args.json)
        return 1
    out.report = {"status": "PASS", **report.to_json()}
    out.say(str(report))
    out.write_json(args.json)
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="scene JSON file (default: built-in conifold scene)")
    common.add_argument("--json", help="write the machine-readable report to this path")
    common.add_argument("--quiet", action="store_true", help="suppress the human-readable report")

    parser = argparse.ArgumentParser(prog="sodkit", description="Verify semiorthogonal decompositions induced along small resolutions.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("example54", parents=[common], help="run the built-in conifold example").set_defaults(func=cmd_example54)

    p = sub.add_parser("verify", parents=[common], help="Ext-level exceptionality of a collection")
    p.add_argument("--collection", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="cohomology table of O(aE + bH)")
    p.add_argument("--a", default="0..0", help="range LO..HI of E-coefficients")
    p.add_argument("--b", default="0..0", help="range LO..HI of H-coefficients")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("mutate", parents=[common], help="mutate an adjacent pair of a collection")
    p.add_argument("--collection", required=True)
    p.add_argument("--index", type=int, required=True, help="0-based position of the left object of the pair")
    p.add_argument("--direction", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_mutate)

    sub.add_parser("compat", parents=[common], help="compatibility and disjointness").set_defaults(func=cmd_compat)
    sub.add_parser("induce", parents=[common], help="induced decomposition on the singular variety").set_defaults(func=cmd_induce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except SodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
