"""Command line: ``artincube <command> ...``.

Every command prints a report made of ``key: value`` blocks.  The first
block describes the run; each further block records one check with its
outcome and an anchor naming the claim being checked.  The exit status is
0 iff every check passed, 1 if some check failed and 2 on usage, I/O or
parse errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from . import constructions as cs
from . import coxeter as cx
from . import minset as ms
from . import suite
from . import words as wd
from .cubes import (ComplexError, as_cube_complex, complex_from_text, complex_to_text,
                    is_locally_cat0, skeleton_dot)


class Report:
    def __init__(self, command: str):
        self.header: list[tuple[str, str]] = [("command", command), ("tool", f"artincube {__version__}")]
        self.checks: list[dict] = []

    def field(self, key: str, value) -> None:
        self.header.append((key, str(value)))

    def check(self, name: str, ok: bool, anchor: str, detail="") -> bool:
        self.checks.append({"check": name, "outcome": "PASS" if ok else "FAIL",
                            "anchor": anchor, "detail": str(detail)})
        return ok

    @property
    def ok(self) -> bool:
        return all(c["outcome"] == "PASS" for c in self.checks)

    def to_text(self) -> str:
        blocks = ["\n".join(f"{k}: {v}" for k, v in self.header)]
        for c in self.checks:
            blocks.append("\n".join(f"{k}: {v}" for k, v in c.items() if v != ""))
        blocks.append(f"result: {'PASS' if self.ok else 'FAIL'}")
        return "\n\n".join(blocks) + "\n"

    def to_json(self) -> str:
        return json.dumps({"header": dict(self.header), "checks": self.checks,
                           "result": "PASS" if self.ok else "FAIL"}, indent=2, sort_keys=True) + "\n"


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _matrix(path: str) -> cx.CoxeterMatrix:
    try:
        return cx.parse_coxeter(_read(path))
    except cx.ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _budget(args) -> int | None:
    return getattr(args, "budget", None)


def _isometry(text: str) -> ms.LatticeIsometry:
    try:
        return ms.parse_isometry(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _decomposition_text(dec: cx.Decomposition) -> str:
    parts = ["free {" + " ".join(dec.free_part) + "}"]
    parts += [f"odd {{{a} {b}}} m={m}" for a, b, m in dec.odd_pairs]
    parts += [f"star {c} <- {{{' '.join(leaves)}}}" for c, leaves in dec.stars]
    return "; ".join(parts)


# ----------------------------------------------------------------- commands

def cmd_classify(args, rep: Report):
    M = _matrix(args.file)
    v = cx.classify(M)
    rep.field("generators", " ".join(M.generators))
    rep.field("verdict", v.status.value)
    if v.obstruction is not None:
        rep.field("obstruction", v.obstruction)
    else:
        rep.field("decomposition", _decomposition_text(cx.decompose(M, v.ordering)))
    rep.field("caveat", v.caveat)
    found = cx.find_obstructions(M)
    rep.field("obstruction counts", ", ".join(f"{k.value}={len(found[k])}" for k in cx.ObstructionKind))
    rep.check("verdict agrees with local obstruction search", v.cubulated == (not any(found.values())),
              "local obstructions characterise the ordering conditions")
    if v.obstruction is not None:
        rep.check("witness satisfies its defining inequalities", v.obstruction.holds_in(M),
                  f"{v.obstruction.kind.value} obstruction")


def _gromov(rep: Report, X) -> None:
    chk = is_locally_cat0(X)
    detail = "" if chk else f"vertex {chk.vertex}: {chk.reason} {chk.witness}"
    rep.check("locally CAT(0)", bool(chk), "flag condition on every vertex link", detail)


def cmd_build(args, rep: Report):
    M = _matrix(args.file)
    rep.field("construction", args.construction)
    try:
        X = cs.build(M, args.construction)
    except cx.DecompositionFailure:
        v = cx.classify(M)
        rep.field("refused", f"matrix is not cubulable, obstruction {v.obstruction}")
        rep.check("construction applicable", False, "explicit cubulation needs the ordering conditions",
                  v.obstruction)
        return
    except cs.ConstructionError as exc:
        rep.check("construction applicable", False, "builder preconditions", exc)
        return
    C = as_cube_complex(X)
    rep.field("complex", C.name or args.construction)
    rep.field("cells", " ".join(f"dim{d}={n}" for d, n in sorted(C.counts().items())))
    rep.field("euler characteristic", C.euler_characteristic())
    _gromov(rep, X)
    r = cs.verify_pi1_is_artin(X, M)
    rep.check("fundamental group is the Artin group", r.ok, "presentation reduces to the Artin relators",
              r.witness)
    if args.output:
        _write(args.output, complex_to_text(X))
        rep.field("written", args.output)
    if args.presentation:
        _write(args.presentation, cs.presentation_of(X).to_text())
        rep.field("presentation written", args.presentation)
    if args.dot:
        _write(args.dot, skeleton_dot(X))
        rep.field("dot written", args.dot)


def cmd_verify(args, rep: Report):
    try:
        X = complex_from_text(_read(args.file))
    except ComplexError as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    rep.field("complex", X.name or args.file)
    rep.field("cells", " ".join(f"dim{d}={n}" for d, n in sorted(X.counts().items())))
    rep.field("connected", X.is_connected())
    if args.gromov:
        _gromov(rep, X)
    if args.presentation:
        rep.field("presentation", "; ".join(cs.presentation_of(X).to_text().strip().splitlines()))
    if args.dot:
        _write(args.dot, skeleton_dot(X))
        rep.field("dot written", args.dot)


def cmd_words(args, rep: Report):
    M = _matrix(args.matrix)
    budget = _budget(args)
    sub = args.words_command
    try:
        if sub in ("equal", "commute"):
            u, v = wd.parse_positive(args.u), wd.parse_positive(args.v)
            fn = wd.monoid_equal if sub == "equal" else wd.commutes_positive
            ans = fn(u, v, M, budget)
            rep.field("answer", ans.value)
            rep.check("decided within budget", ans is not wd.Answer.BUDGET_EXCEEDED,
                      "positive monoid word problem")
        elif sub == "center":
            out = wd.check_center_noncommutation(M, args.N, args.roles, budget)
            _cell_report(rep, out, "powers of central elements of two dihedral parabolics do not commute")
        elif sub == "product":
            A = [wd.parse_positive(w) for w in args.part_a] or None
            B = [wd.parse_positive(w) for w in args.part_b] or None
            out = wd.check_center_avoids_product(M, args.keep, A, B, args.N, args.P, args.Q, budget)
            _cell_report(rep, out, "central powers are not products of two part powers")
        elif sub == "projection":
            proj = wd.even_projection(M, args.keep)
            rep.field("valid", proj.valid)
            rep.field("offending", ", ".join(f"{a}{b}={p}" for a, b, p in proj.offending) or "none")
            rep.check("validity matches the relations test",
                      proj.valid == wd.projection_respects_relations(M, proj, budget),
                      "killing generators is a homomorphism iff no odd label crosses")
    except wd.WordError as exc:
        raise UsageError(str(exc)) from None
    except wd.HypothesisError as exc:
        rep.check("hypotheses", False, "harness preconditions", exc)


def _cell_report(rep: Report, out: wd.CellReport, anchor: str):
    for ans in wd.Answer:
        rep.field(f"cells {ans.value}", len(out.cells_with(ans)))
    equal = out.cells_with(wd.Answer.EQUAL)
    rep.check("no cell is Equal", not equal, anchor, equal[:5])


def cmd_presentation(args, rep: Report):
    rep.field("p", args.p)
    eq = wd.verify_bm_presentation(args.p)
    rep.field("answer", eq.value)
    rep.check("cyclic presentation collapses to the dihedral Artin relation",
              eq is wd.Equivalence.EQUIVALENT, "Tietze elimination")


def cmd_minset(args, rep: Report):
    g = _isometry(args.isometry)
    rep.field("isometry", g.to_text())
    sub = args.minset_command
    tl = ms.translation_length_1(g)
    rep.field("delta", tl.delta)
    rep.field("certificate", tl.certificate)
    if sub == "delta":
        rep.check("certificate attains delta", ms.displacement(g, tl.certificate) == tl.delta,
                  "closed form per permutation cycle")
        return
    if sub == "min1":
        W = ms.Window.around(tl.certificate, args.radius)
        S = ms.min1_set(g, W)
        rep.field("window", f"{W.lows}..{W.highs}")
        rep.field("size", len(S))
        if args.points:
            rep.field("points", " ".join(",".join(map(str, p)) for p in sorted(S)))
        rep.check("certificate lies in Min1", tl.certificate in S, "minimal displacement set")
        return
    if sub == "skewer":
        H = ms.CoordHyperplane(args.coord - 1, args.at)
        rep.field("hyperplane", f"x{args.coord} = {args.at} + 1/2")
        rep.field("answer", ms.skewers(g, H).value)
        return
    if sub == "axis":
        hb = ms.check_hyperbolic_on_subdivision(g, args.N)
        rep.field("answer", hb.kind)
        rep.field("subdivision delta", hb.delta)
        rep.field("witness", hb.witness)
        rep.check("decided on the subdivision", hb.kind != "Undecided",
                  "isometries of the subdivision are elliptic or have a combinatorial axis")
        return
    if sub == "harness":
        hb = ms.is_hyperbolic_on_lattice(g)
        rep.field("lattice", hb.kind)
        if not hb.hyperbolic:
            rep.check("hyperbolic on the lattice", False, "harness preconditions", hb.kind)
            return
        W = ms.harness_window(g) if args.radius is None else ms.Window.around(tl.certificate, args.radius)
        rep.field("window", f"{W.lows}..{W.highs}")
        try:
            reports = [(ms.check_skewering(g, W), "hyperplanes separating x from its image are skewered"),
                       (ms.check_orbit_count(g), "skewered hyperplane orbits number D! * delta"),
                       (ms.check_median_closure(g, W), "Min1 of the stable power is median closed")]
        except ms.WindowTooSmall as exc:
            raise UsageError(str(exc)) from None
        for r, anchor in reports:
            rep.check(r.name, r.ok, anchor, f"checked {r.checked}" + (f", {r.violations[:3]}" if r.violations else ""))


def cmd_selftest(args, rep: Report):
    full = args.scale == "full"
    rep.field("scale", args.scale)
    for res in suite.run_all(full, args.only):
        for c in res.checks:
            rep.check(f"{res.key}: {c.name}", c.ok, res.title, c.detail)
        if res.error:
            rep.check(f"{res.key}: completed", False, res.title, res.error)
        if args.timing:
            rep.field(f"seconds {res.key}", f"{res.seconds:.2f}")


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artincube", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"artincube {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="classify a Coxeter matrix file")
    c.add_argument("file")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("build", parents=[common], help="build and verify an explicit cubulation")
    b.add_argument("file")
    b.add_argument("--construction", default="auto",
                   choices=["auto", "bm", "xa", "xb", "star", "salvetti", "general"])
    b.add_argument("-o", "--output", help="write the complex in the text format")
    b.add_argument("--presentation", help="write the fundamental group presentation")
    b.add_argument("--dot", help="write the 1-skeleton as DOT")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", parents=[common], help="check a complex file")
    v.add_argument("file")
    v.add_argument("--gromov", action="store_true", help="run the link condition")
    v.add_argument("--presentation", action="store_true", help="print a spanning-tree presentation")
    v.add_argument("--dot", help="write the 1-skeleton as DOT")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("words", help="positive monoid computations")
    w.set_defaults(func=cmd_words)
    wsub = w.add_subparsers(dest="words_command", required=True)
    wcommon = argparse.ArgumentParser(add_help=False, parents=[common])
    wcommon.add_argument("--matrix", required=True, help="Coxeter matrix file")
    wcommon.add_argument("--budget", type=int, default=None,
                         help=f"BFS state budget (default from ${wd.BUDGET_ENV} or {wd.DEFAULT_BUDGET})")
    for name, helptext in (("equal", "decide u = v"), ("commute", "decide uv = vu")):
        s = wsub.add_parser(name, parents=[wcommon], help=helptext)
        s.add_argument("u", help="space separated generators")
        s.add_argument("v")
    s = wsub.add_parser("center", parents=[wcommon], help="central powers of two parabolics never commute")
    s.add_argument("-N", type=int, default=1)
    s.add_argument("--roles", nargs=3, metavar=("A", "B", "C"))
    s = wsub.add_parser("product", parents=[wcommon], help="central powers avoid u^p v^q")
    s.add_argument("--keep", nargs=2, metavar=("A", "B"))
    s.add_argument("--part-a", nargs="*", default=[])
    s.add_argument("--part-b", nargs="*", default=[])
    s.add_argument("-N", type=int, default=2)
    s.add_argument("-P", type=int, default=8)
    s.add_argument("-Q", type=int, default=8)
    s = wsub.add_parser("projection", parents=[wcommon], help="kill all generators but the kept ones")
    s.add_argument("--keep", nargs="+", required=True)

    pr = sub.add_parser("presentation", parents=[common], help="collapse the cyclic presentation for p")
    pr.add_argument("p", type=int)
    pr.set_defaults(func=cmd_presentation)

    m = sub.add_parser("minset", help="lattice isometries: delta, Min1, skewering")
    m.set_defaults(func=cmd_minset)
    msub = m.add_subparsers(dest="minset_command", required=True)
    iso_help = "e.g. 'D=2; sigma=(2,1); signs=(+,+); t=(1,1)'"
    s = msub.add_parser("delta", parents=[common], help="translation length with certificate")
    s.add_argument("isometry", help=iso_help)
    s = msub.add_parser("min1", parents=[common], help="Min1 set in a window around the certificate")
    s.add_argument("isometry", help=iso_help)
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--points", action="store_true")
    s = msub.add_parser("skewer", parents=[common], help="classify one coordinate hyperplane")
    s.add_argument("isometry", help=iso_help)
    s.add_argument("--coord", type=int, required=True, help="1-based coordinate")
    s.add_argument("--at", type=int, required=True, help="hyperplane x = at + 1/2")
    s = msub.add_parser("axis", parents=[common], help="elliptic or axis on the cubical subdivision")
    s.add_argument("isometry", help=iso_help)
    s.add_argument("-N", type=int, default=6)
    s = msub.add_parser("harness", parents=[common], help="skewering, orbit count and median closure")
    s.add_argument("isometry", help=iso_help)
    s.add_argument("--radius", type=int, default=None)

    t = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    t.add_argument("--scale", choices=["quick", "full"], default="quick")
    t.add_argument("--only", nargs="+", choices=[k for k, _, _ in suite.CRITERIA])
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", None) is None and os.environ.get(wd.BUDGET_ENV):
        args.budget = wd.default_budget()
    rep = Report(" ".join(["artincube", *(sys.argv[1:] if argv is None else argv)]))
    start = time.perf_counter()
    try:
        args.func(args, rep)
    except UsageError as exc:
        print(f"artincube: error: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        rep.field("seconds", f"{time.perf_counter() - start:.2f}")
    sys.stdout.write(rep.to_json() if args.json else rep.to_text())
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
