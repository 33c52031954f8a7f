"""Lie algebras, representations, (relative) Rota-Baxter operators and morphisms.

Every verifier checks the defining identity directly on basis elements and
also through the NR bracket, and insists both answers agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .foundation import ZERO, Matrix, Q
from .nrcore import Cochain, mu_cochain, nr_bracket, operator_cochain, rho_cochain

Vector = List[Fraction]


@dataclass
class Report:
    """Outcome of a verification; ``witness`` names a failing basis tuple."""

    ok: bool
    witness: Optional[Tuple] = None
    checks: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _vadd(a: Vector, b: Vector, c=1) -> Vector:
    return [x + c * y for x, y in zip(a, b)]


def _unit(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = Fraction(1)
    return v


class LieAlgebra:
    """Skew structure constants ``consts[i][j][k]``: [e_i, e_j] = sum_k consts[i][j][k] e_k."""

    def __init__(self, dim: int, brackets: Optional[Dict[Tuple[int, int], Dict[int, Any]]] = None,
                 name: Optional[str] = None):
        self.dim = dim
        self.name = name
        c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
        seen: Dict[Tuple[int, int], Vector] = {}
        for (i, j), vals in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"bracket index {(i, j)} out of range")
            vec = [ZERO] * dim
            for k, v in vals.items():
                if not 0 <= k < dim:
                    raise ValueError(f"output index {k} out of range")
                vec[k] += Q(v)
            if i == j:
                if any(vec):
                    raise ValueError(f"[e{i},e{i}] must vanish")
                continue
            a, b, s = (i, j, 1) if i < j else (j, i, -1)
            vec = [s * x for x in vec]
            if (a, b) in seen and seen[a, b] != vec:
                raise ValueError(f"inconsistent antisymmetric entries for {(a, b)}")
            seen[a, b] = vec
        for (a, b), vec in seen.items():
            c[a][b] = vec
            c[b][a] = [-x for x in vec]
        self.consts = c

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls(n, {}, name=f"abelian-{n}")

    def brackets(self) -> Dict[Tuple[int, int], Dict[int, Fraction]]:
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                vals = {k: v for k, v in enumerate(self.consts[i][j]) if v}
                if vals:
                    out[i, j] = vals
        return out

    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        out = [ZERO] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b or i == j:
                    continue
                ab = Q(a) * Q(b)
                for k, c in enumerate(self.consts[i][j]):
                    if c:
                        out[k] += ab * c
        return out

    def ad(self, i: int) -> Matrix:
        return Matrix(self.dim, self.dim,
                      {(k, j): self.consts[i][j][k] for j in range(self.dim) for k in range(self.dim)})

    def ad_vec(self, x: Sequence) -> Matrix:
        m = Matrix.zeros(self.dim, self.dim)
        for i, a in enumerate(x):
            if a:
                m = m + self.ad(i).scale(a)
        return m

    def mu(self, dim_v: int = 0) -> Cochain:
        return mu_cochain((self.dim, dim_v), self.consts)

    def __eq__(self, other) -> bool:
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.consts == other.consts

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, name={self.name!r})"


class Representation:
    """A linear action of ``base`` on a space of dimension ``dim_v``."""

    def __init__(self, base: LieAlgebra, dim_v: int, rho: Sequence[Matrix]):
        if len(rho) != base.dim:
            raise ValueError(f"need {base.dim} action matrices, got {len(rho)}")
        for m in rho:
            if (m.rows, m.cols) != (dim_v, dim_v):
                raise ValueError(f"action matrix must be {dim_v}x{dim_v}")
        self.base = base
        self.dim_v = dim_v
        self.rho = list(rho)

    @classmethod
    def adjoint(cls, alg: LieAlgebra) -> "Representation":
        return cls(alg, alg.dim, [alg.ad(i) for i in range(alg.dim)])

    @classmethod
    def coadjoint(cls, alg: LieAlgebra) -> "Representation":
        """rho(x) = -(ad x)^T on the dual space."""
        return cls(alg, alg.dim, [-(alg.ad(i).transpose()) for i in range(alg.dim)])

    @classmethod
    def trivial(cls, alg: LieAlgebra, dim_v: int) -> "Representation":
        return cls(alg, dim_v, [Matrix.zeros(dim_v, dim_v) for _ in range(alg.dim)])

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.base.dim, self.dim_v)

    def act(self, x: Sequence, v: Sequence) -> Vector:
        out = [ZERO] * self.dim_v
        for i, a in enumerate(x):
            if a:
                out = _vadd(out, self.rho[i] @ v, Q(a))
        return out

    def rho_of(self, x: Sequence) -> Matrix:
        m = Matrix.zeros(self.dim_v, self.dim_v)
        for i, a in enumerate(x):
            if a:
                m = m + self.rho[i].scale(a)
        return m

    def pi(self) -> Cochain:
        """mu + rho on g (+) V."""
        return self.base.mu(self.dim_v) + rho_cochain(self.dims, self.rho)

    def __repr__(self) -> str:
        return f"Representation(base={self.base!r}, dim_v={self.dim_v})"


class RelativeRBO:
    """A linear map T: V -> g together with its representation."""

    def __init__(self, rep: Representation, T: Matrix):
        if (T.rows, T.cols) != rep.dims:
            raise ValueError(f"operator must be {rep.dims[0]}x{rep.dims[1]}")
        self.rep = rep
        self.T = T

    @property
    def alg(self) -> LieAlgebra:
        return self.rep.base

    @property
    def dims(self) -> Tuple[int, int]:
        return self.rep.dims

    def cochain(self) -> Cochain:
        return operator_cochain(self.dims, self.T)

    def __repr__(self) -> str:
        return f"RelativeRBO({self.rep!r}, T={self.T.to_rows()})"


class RBO:
    """A Rota-Baxter operator of weight zero on a Lie algebra."""

    def __init__(self, alg: LieAlgebra, T: Matrix):
        if (T.rows, T.cols) != (alg.dim, alg.dim):
            raise ValueError("operator must be square")
        self.alg = alg
        self.T = T

    def as_relative(self) -> RelativeRBO:
        return RelativeRBO(Representation.adjoint(self.alg), self.T)


# ---------------------------------------------------------------------------
# verifiers


def jacobiator(alg: LieAlgebra, i: int, j: int, k: int) -> Vector:
    n = alg.dim
    ei, ej, ek = _unit(n, i), _unit(n, j), _unit(n, k)
    a = alg.bracket(alg.bracket(ei, ej), ek)
    b = alg.bracket(alg.bracket(ej, ek), ei)
    c = alg.bracket(alg.bracket(ek, ei), ej)
    return [x + y + z for x, y, z in zip(a, b, c)]


def verify_lie(alg: LieAlgebra) -> Report:
    """Jacobi identity, checked on basis triples and as [mu, mu]_NR = 0."""
    witness = None
    n = alg.dim
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if any(jacobiator(alg, i, j, k)):
                    witness = (i, j, k)
                    break
            if witness:
                break
        if witness:
            break
    mu = alg.mu()
    nr_ok = nr_bracket(mu, mu).is_zero()
    if nr_ok != (witness is None):
        raise AssertionError("basis Jacobi check disagrees with [mu,mu]_NR")
    return Report(nr_ok, witness, {"nr_bracket_zero": nr_ok})


def verify_rep(rep: Representation) -> Report:
    """rho([x,y]) = [rho(x), rho(y)], checked directly and as [pi, pi]_NR = 0."""
    alg = rep.base
    lie = verify_lie(alg)
    witness = None
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            lhs = rep.rho_of(alg.consts[i][j])
            rhs = rep.rho[i] @ rep.rho[j] - rep.rho[j] @ rep.rho[i]
            if lhs != rhs:
                witness = (i, j)
                break
        if witness:
            break
    pi = rep.pi()
    nr_ok = nr_bracket(pi, pi).is_zero()
    direct = lie.ok and witness is None
    if nr_ok != direct:
        raise AssertionError("matrix representation check disagrees with [pi,pi]_NR")
    return Report(nr_ok, witness if witness else lie.witness,
                  {"lie": lie.ok, "action": witness is None, "nr_bracket_zero": nr_ok})


def rbo_defect(op: RelativeRBO, a: int, b: int) -> Vector:
    """[Tu, Tv] - T(rho(Tu)v - rho(Tv)u) on basis vectors u = e_a, v = e_b."""
    rep, T = op.rep, op.T
    nv = rep.dim_v
    u, v = _unit(nv, a), _unit(nv, b)
    Tu, Tv = T @ u, T @ v
    lhs = op.alg.bracket(Tu, Tv)
    inner = _vadd(rep.act(Tu, v), rep.act(Tv, u), -1)
    return _vadd(lhs, T @ inner, -1)


def verify_relative_rbo(op: RelativeRBO) -> Report:
    """Operator identity on basis pairs, cross-checked with [[pi, T], T]_NR = 0."""
    witness = None
    nv = op.rep.dim_v
    for a in range(nv):
        for b in range(a + 1, nv):
            if any(rbo_defect(op, a, b)):
                witness = (a, b)
                break
        if witness:
            break
    Tc = op.cochain()
    mc = nr_bracket(nr_bracket(op.rep.pi(), Tc), Tc).is_zero()
    if mc != (witness is None):
        raise AssertionError("direct operator identity disagrees with the MC form")
    return Report(mc, witness, {"mc_form": mc})


def verify_rbo(op: RBO) -> Report:
    """[Tx, Ty] = T([Tx, y] + [x, Ty]) on basis pairs."""
    alg, T = op.alg, op.T
    n = alg.dim
    witness = None
    for a in range(n):
        for b in range(a + 1, n):
            x, y = _unit(n, a), _unit(n, b)
            Tx, Ty = T @ x, T @ y
            rhs = T @ _vadd(alg.bracket(Tx, y), alg.bracket(x, Ty))
            if alg.bracket(Tx, Ty) != rhs:
                witness = (a, b)
                break
        if witness:
            break
    return Report(witness is None, witness)


def mc_check(rep: Representation, T: Matrix) -> Report:
    """Maurer-Cartan equation for (s^{-1} pi, T): both components reported separately.

    The first component is 1/2 [pi, pi]_NR, the second 1/2 [[pi, T]_NR, T]_NR.
    Neither mu nor rho is assumed valid.
    """
    pi = rep.pi()
    Tc = operator_cochain(rep.dims, T)
    first = nr_bracket(pi, pi).scale(Fraction(1, 2))
    second = nr_bracket(nr_bracket(pi, Tc), Tc).scale(Fraction(1, 2))
    return Report(first.is_zero() and second.is_zero(), None,
                  {"lierep": first.is_zero(), "operator": second.is_zero(),
                   "lierep_defect": first, "operator_defect": second})


# ---------------------------------------------------------------------------
# induced pre-Lie structure


def prelie_from_rbo(op: RelativeRBO, check: bool = True) -> List[List[Vector]]:
    """Product table ``table[a][b] = e_a |> e_b = rho(T e_a) e_b``."""
    if check and not verify_relative_rbo(op):
        raise ValueError("operator does not satisfy the relative Rota-Baxter identity")
    nv = op.rep.dim_v
    table = []
    for a in range(nv):
        Ta = op.T @ _unit(nv, a)
        table.append([op.rep.act(Ta, _unit(nv, b)) for b in range(nv)])
    return table


def product(table: List[List[Vector]], u: Sequence, v: Sequence) -> Vector:
    n = len(table)
    out = [ZERO] * n
    for a, x in enumerate(u):
        if not x:
            continue
        for b, y in enumerate(v):
            if y:
                out = _vadd(out, table[a][b], Q(x) * Q(y))
    return out


def prelie_associator_ok(table: List[List[Vector]]) -> bool:
    """(x|>y)|>z - x|>(y|>z) is symmetric in x, y on all basis triples."""
    n = len(table)
    E = [_unit(n, i) for i in range(n)]

    def assoc(x, y, z):
        return _vadd(product(table, product(table, x, y), z), product(table, x, product(table, y, z)), -1)

    return all(assoc(E[i], E[j], E[k]) == assoc(E[j], E[i], E[k])
               for i in range(n) for j in range(n) for k in range(n))


def subadjacent_lie(table: List[List[Vector]]) -> LieAlgebra:
    """Commutator bracket u |> v - v |> u."""
    n = len(table)
    br = {}
    for a in range(n):
        for b in range(a + 1, n):
            vec = _vadd(table[a][b], table[b][a], -1)
            vals = {k: x for k, x in enumerate(vec) if x}
            if vals:
                br[a, b] = vals
    return LieAlgebra(n, br)


# ---------------------------------------------------------------------------
# morphisms


def verify_morphism(phi: Matrix, psi: Matrix, source: RelativeRBO, target: RelativeRBO) -> Report:
    """(phi, psi) from ``source`` to ``target``; reports each condition separately."""
    g1, g2 = source.alg, target.alg
    if (phi.rows, phi.cols) != (g2.dim, g1.dim) or (psi.rows, psi.cols) != (target.rep.dim_v, source.rep.dim_v):
        raise ValueError("morphism shapes do not match the structures")
    hom_w = op_w = act_w = None
    for i in range(g1.dim):
        for j in range(i + 1, g1.dim):
            x, y = _unit(g1.dim, i), _unit(g1.dim, j)
            if phi @ g1.bracket(x, y) != g2.bracket(phi @ x, phi @ y):
                hom_w = hom_w or (i, j)
    if target.T @ psi != phi @ source.T:
        diff = target.T @ psi - phi @ source.T
        op_w = min(j for (_, j) in diff.entries)
    for i in range(g1.dim):
        x = _unit(g1.dim, i)
        lhs = psi @ source.rep.rho[i]
        rhs = target.rep.rho_of(phi @ x) @ psi
        if lhs != rhs:
            act_w = act_w or (i,)
    checks = {"lie_hom": hom_w is None, "operator": op_w is None, "action": act_w is None}
    witness = hom_w or ((op_w,) if op_w is not None else None) or act_w
    return Report(all(checks.values()), witness, checks)
