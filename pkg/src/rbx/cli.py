"""``rbx`` command-line front end.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import bialgebra, cohomology, deformation, homotopy, structures
from .fileformat import (REGISTRY_NAMES, ParseError, Structure, parse_deformation, deformation_cochains, dumps,
                         example, load)
from .foundation import Matrix, fmt


class UsageError(Exception):
    pass


def _plain(x: Any) -> Any:
    """JSON-ready copy with exact rationals as strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else str(list(k)): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Matrix):
        return [[fmt(v) for v in row] for row in x.to_rows()]
    if isinstance(x, float):
        raise TypeError("floating-point value in a report")
    return str(x)


def _resolve(path: str) -> Structure:
    """Load a structure file; a registry name is accepted when no such file exists."""
    if not os.path.exists(path):
        try:
            return example(path)
        except KeyError:
            raise UsageError(f"no such file or registry entry: {path}") from None
    return load(path)


class Run:
    def __init__(self, argv: Sequence[str]):
        self.report: Dict[str, Any] = {"command": list(argv), "verdicts": {}, "witnesses": {}, "tables": {}}

    def verdict(self, name: str, rep) -> bool:
        ok = bool(rep.ok if hasattr(rep, "ok") else rep)
        self.report["verdicts"][name] = ok
        w = getattr(rep, "witness", None)
        if not ok and w is not None:
            self.report["witnesses"][name] = w
        return ok

    def table(self, name: str, rows: Any):
        self.report["tables"][name] = rows


# ---------------------------------------------------------------------------
# commands


def _verify(run: Run, what: str, s: Structure):
    if what == "lie":
        run.verdict("jacobi", structures.verify_lie(s.need_alg()))
    elif what == "rep":
        run.verdict("lie", structures.verify_lie(s.need_alg()))
        run.verdict("representation", structures.verify_rep(s.representation()))
    elif what == "rbo":
        run.verdict("lie", structures.verify_lie(s.need_alg()))
        run.verdict("rota_baxter", structures.verify_rbo(s.rbo()))
    elif what == "rrb":
        op = s.relative()
        run.verdict("lie", structures.verify_lie(op.alg))
        run.verdict("representation", structures.verify_rep(op.rep))
        run.verdict("relative_rota_baxter", structures.verify_relative_rbo(op))
    elif what == "cybe":
        run.verdict("lie", structures.verify_lie(s.need_alg()))
        run.verdict("cybe", bialgebra.cybe_check(s.need_alg(), s.need_r()))
    elif what == "linf":
        g = s.graded
        if g is None:
            alg = homotopy.desuspend_lie(s.need_alg())
            run.verdict("linfty", homotopy.verify_linfty(alg))
            if s.rep is not None:
                run.verdict("representation", homotopy.verify_linfty_rep(homotopy.desuspend_rep(s.rep)))
            return
        if g.linfty is not None:
            run.verdict("linfty", homotopy.verify_linfty(g.linfty))
        if g.rep is not None:
            run.verdict("representation", homotopy.verify_linfty_rep(g.rep))
        if g.prelie is not None:
            ok = run.verdict("prelie_mc", homotopy.verify_prelie(g.prelie))
            if ok:
                run.verdict("subadjacent", homotopy.verify_linfty(homotopy.subadjacent(g.prelie)))
        if not run.report["verdicts"]:
            raise UsageError("the graded block has nothing to verify")
    elif what == "hrbo":
        g = s.graded
        op = g.op if g is not None and g.op is not None else None
        if op is None:
            op = homotopy.desuspend_rbo(s.relative())
        run.verdict("representation", homotopy.verify_linfty_rep(op.rep))
        rep = homotopy.verify_homotopy_rbo(op)
        run.verdict("operator", rep)
        run.table("operator_by_weight", rep.checks)
        if rep.ok:
            run.verdict("twist", homotopy.twist_report(op))
    else:
        raise UsageError(f"unknown verify target {what!r}")


def _complex_target(kind: str, s: Structure):
    if kind == "ce":
        return s.need_alg()
    if kind == "lierep":
        return s.representation()
    if kind in ("oop", "rrb"):
        return s.relative()
    if kind == "rb":
        return s.rbo()
    if kind == "tlb":
        return bialgebra.TriangularBialgebra(s.need_alg(), s.need_r())
    raise UsageError(f"unknown complex {kind!r}")


def _cohomology(run: Run, kind: str, s: Structure, degree: Optional[int], max_degree: Optional[int]):
    if degree is None and max_degree is None:
        raise UsageError("give --degree N or --max-degree N")
    cx = cohomology.build_complex(kind, _complex_target(kind, s))
    degrees = [degree] if max_degree is None else list(range(0, max_degree + 1))
    if degree is not None and degree not in degrees:
        degrees.append(degree)
    rows = []
    for n in sorted(set(degrees)):
        if n < 0:
            raise UsageError("degrees are non-negative")
        rows.append(cx.cohomology(n).to_dict())
    run.table("cohomology", rows)
    d2 = all(cx.check_d_squared(n) for n in sorted(set(degrees)))
    run.verdict("d_squared_zero", d2)


def _les(run: Run, kind: str, s: Structure, max_degree: int):
    if kind == "tlb":
        target = bialgebra.TriangularBialgebra(s.need_alg(), s.need_r())
    elif kind == "rrb":
        target = s.relative()
    elif kind == "rb":
        target = s.rbo()
    else:
        raise UsageError(f"no long exact sequence for {kind!r}")
    rep = cohomology.les_check(kind, target, max_degree)
    run.table("bettis", rep.bettis)
    run.table("nodes", rep.nodes)
    run.verdict("exact", rep.ok)


def _deformation_of(s: Structure, path: str) -> deformation.InfinitesimalDeformation:
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, f"{path}: line {e.lineno}:{e.colno}") from None
    else:
        raise UsageError(f"no such deformation file: {path}")
    if not isinstance(obj, dict) or "deformation" not in obj:
        raise ParseError("missing \"deformation\" block", f"{path}: $")
    d = parse_deformation(obj["deformation"], s)
    om, varrho, T = deformation_cochains(s, d)
    return deformation.InfinitesimalDeformation(s.relative(), om, varrho, T)


def _deform(run: Run, what: str, s: Structure, files: List[str]):
    if not files:
        raise UsageError("give at least one deformation file")
    defs = [_deformation_of(s, f) for f in files]
    if what == "check":
        for f, d in zip(files, defs):
            coc = deformation.is_two_cocycle(d)
            ax = deformation.deformation_axioms(d)
            if coc.ok != ax.ok:
                raise AssertionError("cocycle verdict disagrees with the first-order axioms")
            run.verdict(f"cocycle[{f}]", coc)
    elif what == "equiv":
        if len(defs) != 2:
            raise UsageError("equiv takes exactly two deformation files")
        for f, d in zip(files, defs):
            if not run.verdict(f"cocycle[{f}]", deformation.is_two_cocycle(d)):
                return
        w = deformation.equivalent(defs[0], defs[1])
        run.verdict("equivalent", w is not None)
        if w is not None:
            run.verdict("witness_verified", deformation.verify_equivalence(defs[0], defs[1], w))
            run.table("witness", {"N": w.N, "S": w.S})
    else:
        raise UsageError(f"unknown deform action {what!r}")


def _graded_entries(m: homotopy.GradedMap) -> List[Dict[str, Any]]:
    return [{"inputs": list(k[0]), "output": k[1], "coeff": v} for k, v in sorted(m.data.items())]


def _prelie(run: Run, what: str, s: Structure):
    g = s.graded
    if what == "from-rbo":
        if g is not None and g.op is not None:
            pre = homotopy.strict_rbo_to_prelie(g.op)
            run.verdict("prelie_mc", homotopy.verify_prelie(pre))
            run.table("products", _graded_entries(pre.r))
            return
        op = s.relative()
        ok = run.verdict("relative_rota_baxter", structures.verify_relative_rbo(op))
        if ok:
            table = structures.prelie_from_rbo(op)
            run.verdict("prelie", structures.prelie_associator_ok(table))
            run.table("products", _classical_products(table))
    elif what in ("subadjacent", "phi"):
        if g is not None and g.prelie is not None:
            ok = run.verdict("prelie_mc", homotopy.verify_prelie(g.prelie))
            if ok:
                sub = homotopy.phi(g.prelie.r)
                if what == "subadjacent":
                    run.verdict("linfty", homotopy.verify_linfty(homotopy.LinftyAlgebra(g.space, sub)))
                run.table("brackets", _graded_entries(sub))
            return
        op = s.relative()
        ok = run.verdict("relative_rota_baxter", structures.verify_relative_rbo(op))
        if ok:
            lie = structures.subadjacent_lie(structures.prelie_from_rbo(op))
            run.verdict("lie", structures.verify_lie(lie))
            run.table("brackets", {f"[{i},{j}]": {str(k): v for k, v in vec.items() if v}
                                   for (i, j), vec in sorted(lie.brackets().items()) if any(vec.values())})
    else:
        raise UsageError(f"unknown prelie action {what!r}")


def _classical_products(table) -> Dict[str, Dict[str, Fraction]]:
    out = {}
    for a, row in enumerate(table):
        for b, vec in enumerate(row):
            if any(vec):
                out[f"[{a},{b}]"] = {str(k): v for k, v in enumerate(vec) if v}
    return out


def _examples(run: Run, what: str, name: Optional[str]) -> Optional[str]:
    if what == "list":
        run.table("examples", [{"name": n, "description": example(n).description} for n in REGISTRY_NAMES])
        return None
    if what == "show":
        if not name:
            raise UsageError("examples show needs a NAME")
        try:
            return dumps(example(name))
        except KeyError:
            raise UsageError(f"unknown example {name!r}") from None
    raise UsageError(f"unknown examples action {what!r}")


# ---------------------------------------------------------------------------
# rendering


def render_table(report: Dict[str, Any]) -> str:
    lines = ["command: " + " ".join(report["command"])]
    for k, v in report["verdicts"].items():
        lines.append(f"{'PASS' if v else 'FAIL'}  {k}")
    for k, v in report["witnesses"].items():
        lines.append(f"witness {k}: {json.dumps(v)}")
    for name, rows in report["tables"].items():
        lines.append(f"[{name}]")
        if isinstance(rows, list) and rows and isinstance(rows[0], dict):
            cols = list(rows[0].keys())
            lines.append("  " + "  ".join(cols))
            for r in rows:
                lines.append("  " + "  ".join(json.dumps(r.get(c)) if not isinstance(r.get(c), str) else r.get(c)
                                              for c in cols))
        elif isinstance(rows, dict):
            for k, v in rows.items():
                lines.append(f"  {k}: {json.dumps(v)}")
        else:
            lines.append(f"  {json.dumps(rows)}")
    if "elapsed_ms" in report:
        lines.append(f"elapsed_ms: {report['elapsed_ms']}")
    if "error" in report:
        lines.append(f"error: {report['error']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rbx", description="Exact rational checks and cohomology for "
                                                         "Rota-Baxter structures on Lie algebras.")
    p.add_argument("--report", choices=["json", "table"], default="table")
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="verify a structure")
    v.add_argument("what", choices=["lie", "rep", "rbo", "rrb", "cybe", "linf", "hrbo"])
    v.add_argument("file")

    c = sub.add_parser("cohomology", help="cohomology of a complex")
    c.add_argument("kind", choices=list(cohomology.KINDS) if hasattr(cohomology, "KINDS")
                   else ["ce", "lierep", "oop", "rrb", "rb", "tlb"])
    c.add_argument("file")
    c.add_argument("--degree", type=int)
    c.add_argument("--max-degree", type=int)

    l = sub.add_parser("les", help="exactness of a long exact sequence")
    l.add_argument("kind", choices=["rrb", "rb", "tlb"])
    l.add_argument("file")
    l.add_argument("--max-degree", type=int, required=True)

    d = sub.add_parser("deform", help="infinitesimal deformations")
    d.add_argument("what", choices=["check", "equiv"])
    d.add_argument("file")
    d.add_argument("deformations", nargs="+")

    r = sub.add_parser("prelie", help="pre-Lie products")
    r.add_argument("what", choices=["from-rbo", "subadjacent", "phi"])
    r.add_argument("file")

    e = sub.add_parser("examples", help="built-in examples")
    e.add_argument("what", choices=["list", "show"])
    e.add_argument("name", nargs="?")

    for sp in (v, c, l, d, r, e):
        sp.add_argument("--report", choices=["json", "table"], default=argparse.SUPPRESS)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    run = Run(["rbx"] + argv)
    t0 = time.perf_counter()
    code = 0
    raw = None
    try:
        if args.cmd == "examples":
            raw = _examples(run, args.what, args.name)
        else:
            s = _resolve(args.file)
            if args.cmd == "verify":
                _verify(run, args.what, s)
            elif args.cmd == "cohomology":
                _cohomology(run, args.kind, s, args.degree, args.max_degree)
            elif args.cmd == "les":
                if args.max_degree < 0:
                    raise UsageError("--max-degree must be non-negative")
                _les(run, args.kind, s, args.max_degree)
            elif args.cmd == "deform":
                _deform(run, args.what, s, args.deformations)
            elif args.cmd == "prelie":
                _prelie(run, args.what, s)
        code = 0 if all(run.report["verdicts"].values()) else 1
    except (ParseError, UsageError, ValueError, TypeError, KeyError, OSError) as e:
        run.report["error"] = str(e)
        code = 2
    except Exception as e:  # noqa: BLE001 - the exit-code contract is total
        run.report["error"] = f"{type(e).__name__}: {e}"
        code = 2
    if raw is not None:
        out.write(raw)
        return code
    run.report["exit_code"] = code
    run.report["elapsed_ms"] = int((time.perf_counter() - t0) * 1000)
    plain = _plain(run.report)
    if args.report == "json":
        out.write(json.dumps(plain, indent=2, sort_keys=True) + "\n")
    else:
        out.write(render_table(plain))
    return code


if __name__ == "__main__":
    sys.exit(main())
