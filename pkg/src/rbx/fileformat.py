"""JSON structure files and the built-in example registry.

Rationals are strings ``"p/q"`` (integers may omit the denominator); bracket
tables use keys ``"[i,j]"`` with 0-based indices.  A file may carry any of:
``lie``, ``rep``, ``operator``, ``r``, ``graded`` and ``deformation`` blocks.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .bialgebra import Polyvector
from .foundation import Matrix, Q, fmt
from .homotopy import (SYMTENSOR, GradedMap, GradedSpace, HomotopyRBO, LinftyAlgebra, LinftyRep,
                       PreLieInfty, adjoint_rep)
from .nrcore import Cochain
from .structures import RBO, LieAlgebra, RelativeRBO, Representation

FORMAT_VERSION = 1
_PAIR = re.compile(r"^\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]$")


class ParseError(ValueError):
    """Malformed structure file; ``position`` is a JSON path or line:column."""

    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position


def _rat(x, pos: str):
    if isinstance(x, float):
        raise ParseError("floats are not allowed; write rationals as \"p/q\" strings", pos)
    try:
        return Q(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational: {x!r}", pos) from None


def _int(x, pos: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        try:
            if isinstance(x, str) and re.fullmatch(r"-?\d+", x.strip()):
                return int(x)
        except ValueError:
            pass
        raise ParseError(f"expected an integer, got {x!r}", pos)
    return x


def _matrix(rows, pos: str, shape: Optional[Tuple[int, int]] = None) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("a matrix is a list of rows", pos)
    vals = [[_rat(v, f"{pos}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
    ncols = len(vals[0]) if vals else (shape[1] if shape else 0)
    if any(len(r) != ncols for r in vals):
        raise ParseError("ragged matrix", pos)
    m = Matrix.from_rows(vals, ncols)
    if shape and (m.rows, m.cols) != shape:
        raise ParseError(f"expected a {shape[0]}x{shape[1]} matrix, got {m.rows}x{m.cols}", pos)
    return m


def _emit_matrix(m: Matrix) -> List[List[str]]:
    return [[fmt(v) for v in row] for row in m.to_rows()]


def _brackets(table, dim: int, pos: str) -> Dict[Tuple[int, int], Dict[int, Any]]:
    if not isinstance(table, dict):
        raise ParseError("brackets must be an object", pos)
    out = {}
    for key, vals in table.items():
        p = f"{pos}.{key}"
        m = _PAIR.match(key)
        if not m:
            raise ParseError("bracket keys look like \"[i,j]\"", p)
        i, j = int(m.group(1)), int(m.group(2))
        if not (0 <= i < dim and 0 <= j < dim):
            raise ParseError("index out of range", p)
        if not isinstance(vals, dict):
            raise ParseError("bracket values map output index to coefficient", p)
        vec = {}
        for k, v in vals.items():
            kk = _int(k, f"{p}.{k}")
            if not 0 <= kk < dim:
                raise ParseError("output index out of range", f"{p}.{k}")
            vec[kk] = _rat(v, f"{p}.{k}")
        out[i, j] = vec
    return out


def _emit_brackets(alg: LieAlgebra) -> Dict[str, Dict[str, str]]:
    out = {}
    for (i, j), vec in sorted(alg.brackets().items()):
        vals = {str(k): fmt(v) for k, v in sorted(vec.items()) if v}
        if vals:
            out[f"[{i},{j}]"] = vals
    return out


def _graded_space(obj, pos: str) -> GradedSpace:
    if not isinstance(obj, dict) or "dims" not in obj:
        raise ParseError("a graded space needs a \"dims\" object (degree -> dimension)", pos)
    dims = {}
    for d, n in obj["dims"].items():
        dd = _int(d, f"{pos}.dims.{d}")
        nn = _int(n, f"{pos}.dims.{d}")
        if nn < 0:
            raise ParseError("negative dimension", f"{pos}.dims.{d}")
        dims[dd] = nn
    sp = GradedSpace.from_dims(dims)
    labels = obj.get("labels")
    if labels is not None:
        if len(labels) != sp.dim:
            raise ParseError("one label per basis vector", f"{pos}.labels")
        sp = GradedSpace(sp.degrees, labels)
    return sp


def _emit_space(sp: GradedSpace) -> Dict[str, Any]:
    return {"dims": {str(d): n for d, n in sorted(sp.dims().items())}, "labels": list(sp.labels)}


def _map_entries(entries, pos: str, fields: Sequence[str]) -> List[Tuple]:
    if not isinstance(entries, list):
        raise ParseError("map tables are lists of entries", pos)
    out = []
    for n, e in enumerate(entries):
        p = f"{pos}[{n}]"
        if not isinstance(e, dict):
            raise ParseError("entries are objects", p)
        row = []
        for f in fields:
            if f not in e:
                raise ParseError(f"missing field {f!r}", p)
            v = e[f]
            if f == "coeff":
                row.append(_rat(v, f"{p}.coeff"))
            elif isinstance(v, list):
                row.append(tuple(_int(x, f"{p}.{f}") for x in v))
            else:
                row.append(_int(v, f"{p}.{f}"))
        out.append(tuple(row))
    return out


def _emit_map(data: Dict, keyfn) -> List[Dict[str, Any]]:
    return [dict(keyfn(k), coeff=fmt(v)) for k, v in sorted(data.items())]


@dataclass
class GradedBlock:
    space: GradedSpace
    linfty: Optional[LinftyAlgebra] = None
    rep: Optional[LinftyRep] = None
    op: Optional[HomotopyRBO] = None
    prelie: Optional[PreLieInfty] = None


@dataclass
class Deformation:
    """First-order terms: omega (bracket table), varrho (matrices) and T."""

    omega: Dict[Tuple[int, int], Dict[int, Any]]
    varrho: Optional[List[Matrix]]
    T: Matrix


@dataclass
class Structure:
    name: str = ""
    description: str = ""
    alg: Optional[LieAlgebra] = None
    rep: Optional[Representation] = None
    T: Optional[Matrix] = None
    r: Optional[Polyvector] = None
    graded: Optional[GradedBlock] = None
    deformation: Optional[Deformation] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def need_alg(self) -> LieAlgebra:
        if self.alg is None:
            raise ValueError("the file has no \"lie\" block")
        return self.alg

    def representation(self) -> Representation:
        if self.rep is not None:
            return self.rep
        return Representation.adjoint(self.need_alg())

    def relative(self) -> RelativeRBO:
        if self.T is None:
            raise ValueError("the file has no \"operator\" block")
        return RelativeRBO(self.representation(), self.T)

    def rbo(self) -> RBO:
        if self.T is None:
            raise ValueError("the file has no \"operator\" block")
        alg = self.need_alg()
        if self.rep is not None:
            adj = Representation.adjoint(alg)
            if self.rep.dim_v != alg.dim or any(a != b for a, b in zip(self.rep.rho, adj.rho)):
                raise ValueError("a Rota-Baxter operator needs the adjoint representation")
        return RBO(alg, self.T)

    def need_r(self) -> Polyvector:
        if self.r is None:
            raise ValueError("the file has no \"r\" block")
        return self.r

    def need_graded(self) -> GradedBlock:
        if self.graded is None:
            raise ValueError("the file has no \"graded\" block")
        return self.graded


def parse(obj: Dict[str, Any]) -> Structure:
    """Structure from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object", "$")
    ver = obj.get("format", FORMAT_VERSION)
    if ver != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {ver!r}", "$.format")
    if obj.get("field", "rational") != "rational":
        raise ParseError("only the rational field is supported", "$.field")
    s = Structure(name=str(obj.get("name", "")), description=str(obj.get("description", "")))
    try:
        if "lie" in obj:
            lie = obj["lie"]
            dim = _int(lie.get("dim"), "$.lie.dim")
            try:
                s.alg = LieAlgebra(dim, _brackets(lie.get("brackets", {}), dim, "$.lie.brackets"), name=s.name or None)
            except ValueError as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError(str(e), "$.lie.brackets") from None
            if "labels" in lie:
                s.meta["labels"] = list(lie["labels"])
        if "rep" in obj:
            rep = obj["rep"]
            alg = s.need_alg()
            kind = rep.get("kind", "matrices")
            if kind == "adjoint":
                s.rep = Representation.adjoint(alg)
            elif kind == "coadjoint":
                s.rep = Representation.coadjoint(alg)
            elif kind == "trivial":
                s.rep = Representation.trivial(alg, _int(rep.get("dim"), "$.rep.dim"))
            elif kind == "matrices":
                nv = _int(rep.get("dim"), "$.rep.dim")
                mats = rep.get("matrices")
                if not isinstance(mats, list) or len(mats) != alg.dim:
                    raise ParseError("one matrix per basis vector of g", "$.rep.matrices")
                s.rep = Representation(alg, nv, [_matrix(m, f"$.rep.matrices[{i}]", (nv, nv))
                                                 for i, m in enumerate(mats)])
            else:
                raise ParseError(f"unknown representation kind {kind!r}", "$.rep.kind")
        if "operator" in obj:
            alg = s.need_alg()
            nv = s.rep.dim_v if s.rep is not None else alg.dim
            s.T = _matrix(obj["operator"], "$.operator", (alg.dim, nv))
        if "r" in obj:
            alg = s.need_alg()
            terms = _map_entries(obj["r"], "$.r", ("indices", "coeff"))
            degs = {len(t[0]) for t in terms} or {2}
            if len(degs) != 1:
                raise ParseError("all r terms must have the same degree", "$.r")
            for n, (idx, _) in enumerate(terms):
                if any(not 0 <= i < alg.dim for i in idx):
                    raise ParseError("index out of range", f"$.r[{n}]")
            s.r = Polyvector.from_terms(alg.dim, degs.pop(), terms)
        if "graded" in obj:
            s.graded = _parse_graded(obj["graded"])
        if "deformation" in obj:
            s.deformation = parse_deformation(obj["deformation"], s)
    except ParseError:
        raise
    except ValueError as e:
        raise ParseError(str(e), "$") from None
    return s


def _parse_graded(g) -> GradedBlock:
    pos = "$.graded"
    if not isinstance(g, dict):
        raise ParseError("the graded block is an object", pos)
    sp = _graded_space(g.get("space"), f"{pos}.space")
    blk = GradedBlock(sp)
    try:
        if "brackets" in g:
            ents = _map_entries(g["brackets"], f"{pos}.brackets", ("inputs", "output", "coeff"))
            blk.linfty = LinftyAlgebra(sp, GradedMap.from_values(sp, ents))
        if "rep" in g:
            rp = g["rep"]
            vsp = _graded_space(rp.get("space"), f"{pos}.rep.space")
            ents = _map_entries(rp.get("action", []), f"{pos}.rep.action", ("g", "v", "output", "coeff"))
            alg = blk.linfty or LinftyAlgebra(sp)
            blk.rep = LinftyRep(alg, vsp, {(gs, v, o): c for gs, v, o, c in ents})
        if "operator" in g:
            if blk.rep is None:
                raise ParseError("an operator needs a representation block", f"{pos}.operator")
            ents = _map_entries(g["operator"], f"{pos}.operator", ("inputs", "output", "coeff"))
            acc: Dict[Tuple[Tuple[int, ...], int], Any] = {}
            for vs, o, c in ents:
                acc[vs, o] = acc.get((vs, o), 0) + c
            blk.op = HomotopyRBO(blk.rep, acc)
        if "prelie" in g:
            ents = _map_entries(g["prelie"], f"{pos}.prelie", ("inputs", "output", "coeff"))
            blk.prelie = PreLieInfty(sp, GradedMap.from_values(sp, ents, SYMTENSOR))
    except ParseError:
        raise
    except ValueError as e:
        raise ParseError(str(e), pos) from None
    return blk


def parse_deformation(d, s: Structure) -> Deformation:
    pos = "$.deformation"
    alg = s.need_alg()
    omega = _brackets(d.get("omega", {}), alg.dim, f"{pos}.omega")
    varrho = None
    nv = s.rep.dim_v if s.rep is not None else alg.dim
    if "varrho" in d:
        mats = d["varrho"]
        if not isinstance(mats, list) or len(mats) != alg.dim:
            raise ParseError("one matrix per basis vector of g", f"{pos}.varrho")
        varrho = [_matrix(m, f"{pos}.varrho[{i}]", (nv, nv)) for i, m in enumerate(mats)]
    T = _matrix(d.get("T", [[0] * nv for _ in range(alg.dim)]), f"{pos}.T", (alg.dim, nv))
    return Deformation(omega, varrho, T)


def loads(text: str) -> Structure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno}:{e.colno}") from None
    return parse(obj)


def load(path: str) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def emit(s: Structure) -> Dict[str, Any]:
    """Canonical JSON object for a structure."""
    out: Dict[str, Any] = {"format": FORMAT_VERSION, "field": "rational"}
    if s.name:
        out["name"] = s.name
    if s.description:
        out["description"] = s.description
    if s.alg is not None:
        lie: Dict[str, Any] = {"dim": s.alg.dim, "brackets": _emit_brackets(s.alg)}
        if "labels" in s.meta:
            lie["labels"] = list(s.meta["labels"])
        out["lie"] = lie
    if s.rep is not None:
        out["rep"] = {"kind": "matrices", "dim": s.rep.dim_v, "matrices": [_emit_matrix(m) for m in s.rep.rho]}
    if s.T is not None:
        out["operator"] = _emit_matrix(s.T)
    if s.r is not None:
        out["r"] = [{"indices": list(t), "coeff": fmt(v)} for t, v in sorted(s.r.coeffs.items())]
    if s.graded is not None:
        out["graded"] = _emit_graded(s.graded)
    if s.deformation is not None:
        d = s.deformation
        dd: Dict[str, Any] = {"omega": _emit_brackets(LieAlgebra(s.alg.dim, d.omega))}
        if d.varrho is not None:
            dd["varrho"] = [_emit_matrix(m) for m in d.varrho]
        dd["T"] = _emit_matrix(d.T)
        out["deformation"] = dd
    return out


def _emit_graded(b: GradedBlock) -> Dict[str, Any]:
    out: Dict[str, Any] = {"space": _emit_space(b.space)}
    if b.linfty is not None:
        out["brackets"] = _emit_map(b.linfty.l.data, lambda k: {"inputs": list(k[0]), "output": k[1]})
    if b.rep is not None:
        ng = b.rep.ng
        out["rep"] = {"space": _emit_space(b.rep.vspace),
                      "action": _emit_map(b.rep.rho.data, lambda k: {"g": list(k[0][:-1]), "v": k[0][-1] - ng,
                                                                     "output": k[1] - ng})}
    if b.op is not None:
        ng = b.op.rep.ng
        out["operator"] = _emit_map(b.op.T.data, lambda k: {"inputs": [i - ng for i in k[0]], "output": k[1]})
    if b.prelie is not None:
        out["prelie"] = _emit_map(b.prelie.r.data, lambda k: {"inputs": list(k[0]), "output": k[1]})
    return out


def dumps(s: Structure) -> str:
    return json.dumps(emit(s), indent=2, sort_keys=True) + "\n"


def deformation_cochains(s: Structure, d: Deformation) -> Tuple[Cochain, List[Matrix], Matrix]:
    """(omega1 as a cochain on g, varrho1, T1) with zero varrho when absent."""
    alg = s.need_alg()
    om = LieAlgebra(alg.dim, d.omega).mu()
    nv = s.rep.dim_v if s.rep is not None else alg.dim
    varrho = d.varrho if d.varrho is not None else [Matrix.zeros(nv, nv) for _ in range(alg.dim)]
    return om, varrho, d.T


# ---------------------------------------------------------------------------
# registry


def _aff1() -> LieAlgebra:
    return LieAlgebra(2, {(0, 1): {1: 1}}, name="aff1")


def _sl2() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, name="sl2")


def _heis3() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): {2: 1}}, name="heis3")


def _prelie_r3() -> GradedBlock:
    # r_1(z) = x, r_2(z; x) = r_2(x; z) = x, r_3(z, x; x) = x on degrees z:-1, x:0, y:1
    sp = GradedSpace([-1, 0, 1], ["z", "x", "y"])
    r = GradedMap(sp, {((0,), 1): 1, ((0, 1), 1): 1, ((1, 0), 1): 1, ((0, 1, 1), 1): 1}, SYMTENSOR)
    return GradedBlock(sp, prelie=PreLieInfty(sp, r))


def _dgla_2term() -> GradedBlock:
    # Quillen image of g = <a (deg 0), b (deg 1)> with d a = b, [a, b] = b
    sp = GradedSpace([-1, 0], ["a", "b"])
    l = GradedMap(sp, {((0,), 1): 1, ((0, 1), 1): 1})
    lin = LinftyAlgebra(sp, l)
    rep = adjoint_rep(lin)
    # T_1 = id, T_2(a, b) = a: a non-strict homotopy operator on the adjoint-type representation
    op = HomotopyRBO(rep, {((0,), 0): 1, ((1,), 1): 1, ((0, 1), 0): 1})
    return GradedBlock(sp, linfty=lin, rep=rep, op=op)


def _build(name: str) -> Structure:
    m = re.fullmatch(r"abelian-(\d+)", name)
    if m:
        n = int(m.group(1))
        if not 1 <= n <= 12:
            raise KeyError(name)
        return Structure(name=name, description=f"abelian Lie algebra of dimension {n}", alg=LieAlgebra.abelian(n))
    if name == "aff1":
        a = _aff1()
        return Structure(name=name, description="2-dimensional nonabelian Lie algebra, adjoint representation",
                         alg=a, rep=Representation.adjoint(a))
    if name == "aff1-T0":
        a = _aff1()
        return Structure(name=name, description="aff(1) with the Rota-Baxter operator e0 -> e0, e1 -> 0",
                         alg=a, rep=Representation.adjoint(a), T=Matrix.from_rows([[1, 0], [0, 0]]))
    if name == "aff1-nil":
        a = _aff1()
        return Structure(name=name, description="aff(1) with a nilpotent Rota-Baxter operator (d = -a, bc = -a^2)",
                         alg=a, rep=Representation.adjoint(a), T=Matrix.from_rows([[1, 1], [-1, -1]]))
    if name == "heis3":
        return Structure(name=name, description="3-dimensional Heisenberg algebra", alg=_heis3())
    if name == "sl2":
        a = _sl2()
        return Structure(name=name, description="sl(2) in the basis h, e, f", alg=a, rep=Representation.adjoint(a))
    if name == "sl2-r-he":
        a = _sl2()
        return Structure(name=name, description="sl(2) with the triangular r-matrix h ^ e",
                         alg=a, r=Polyvector.basis(3, 0, 1))
    if name == "dgla-2term":
        return Structure(name=name, description="2-term L-infinity algebra from a dg Lie algebra, adjoint-type representation, homotopy operator",
                         graded=_dgla_2term())
    if name == "prelie-r3":
        return Structure(name=name, description="3-term pre-Lie infinity algebra with nonzero ternary product",
                         graded=_prelie_r3())
    raise KeyError(name)


REGISTRY_NAMES = ["abelian-3", "aff1", "aff1-T0", "aff1-nil", "heis3", "sl2", "sl2-r-he", "dgla-2term", "prelie-r3"]


def examples_registry() -> List[Structure]:
    return [_build(n) for n in REGISTRY_NAMES]


def example(name: str) -> Structure:
    """A registry entry by name (``abelian-<n>`` for any small n)."""
    return _build(name)
