"""Infinitesimal deformations over K[t]/(t^2).

The first-order axioms are checked by expanding the deformed structure with
dual numbers, independently of the NR-bracket differentials; the cocycle
tests go through the coboundary operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cohomology import big_d, complex_rb, complex_rrb, d_rb
from .foundation import ZERO, Matrix, Q
from .nrcore import Cochain
from .structures import RBO, Report, RelativeRBO


class Dual:
    """a + b t with t^2 = 0."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Q(a)
        self.b = Q(b)

    def __add__(self, o):
        o = _dual(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _dual(o)
        return Dual(self.a - o.a, self.b - o.b)

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __mul__(self, o):
        o = _dual(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, o):
        o = _dual(o)
        return self.a == o.a and self.b == o.b

    def __bool__(self):
        return bool(self.a or self.b)

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"


def _dual(x) -> Dual:
    return x if isinstance(x, Dual) else Dual(x, 0)


DVec = List[Dual]


def _dzero(n: int) -> DVec:
    return [Dual() for _ in range(n)]


def _dunit(n: int, i: int) -> DVec:
    v = _dzero(n)
    v[i] = Dual(1)
    return v


class _DualRRB:
    """Structure constants of (mu + t omega, rho + t varrho, T + t T1) as dual numbers."""

    def __init__(self, base: RelativeRBO, omega1: Cochain, varrho1: Sequence[Matrix], T1: Matrix):
        alg, rep = base.alg, base.rep
        ng, nv = base.dims
        self.ng, self.nv = ng, nv
        self.c = [[[Dual(alg.consts[i][j][k]) for k in range(ng)] for j in range(ng)] for i in range(ng)]
        for (t, o), v in omega1.data.items():
            i, j = t
            self.c[i][j][o] = self.c[i][j][o] + Dual(0, v)
            self.c[j][i][o] = self.c[j][i][o] - Dual(0, v)
        self.rho = [[[Dual(rep.rho[i][a, b], varrho1[i][a, b]) for b in range(nv)] for a in range(nv)]
                    for i in range(ng)]
        self.T = [[Dual(base.T[i, a], T1[i, a]) for a in range(nv)] for i in range(ng)]

    def br(self, x: DVec, y: DVec) -> DVec:
        out = _dzero(self.ng)
        for i in range(self.ng):
            for j in range(self.ng):
                xy = x[i] * y[j]
                for k in range(self.ng):
                    out[k] = out[k] + xy * self.c[i][j][k]
        return out

    def act(self, x: DVec, v: DVec) -> DVec:
        out = _dzero(self.nv)
        for i in range(self.ng):
            for a in range(self.nv):
                for b in range(self.nv):
                    out[a] = out[a] + x[i] * self.rho[i][a][b] * v[b]
        return out

    def op(self, v: DVec) -> DVec:
        return [sum((self.T[i][a] * v[a] for a in range(self.nv)), Dual()) for i in range(self.ng)]


def _first_order_zero(vec: DVec) -> bool:
    return all(d.b == 0 for d in vec)


@dataclass
class InfinitesimalDeformation:
    """(omega1, varrho1, T1) over a relative Rota-Baxter Lie algebra ``base``."""

    base: RelativeRBO
    omega1: Cochain
    varrho1: List[Matrix]
    T1: Matrix

    @classmethod
    def from_cochain(cls, base: RelativeRBO, c: Tuple[Cochain, Cochain]) -> "InfinitesimalDeformation":
        f, theta = c
        ng, nv = base.dims
        omega = Cochain((ng, 0), {k: v for k, v in f.data.items() if k[1] < ng})
        rho = [dict() for _ in range(ng)]
        for (t, o), v in f.data.items():
            if o >= ng:
                i, a = t
                rho[i][o - ng, a - ng] = v
        varrho = [Matrix(nv, nv, r) for r in rho]
        T1 = Matrix(ng, nv, {(o, t[0] - ng): v for (t, o), v in theta.data.items()})
        return cls(base, omega, varrho, T1)

    def to_cochain(self) -> Tuple[Cochain, Cochain]:
        ng, nv = self.base.dims
        dims = (ng, nv)
        data = dict(self.omega1.data)
        for i, m in enumerate(self.varrho1):
            for (b, a), v in m.entries.items():
                data[(i, ng + a), ng + b] = v
        theta = {((ng + a,), i): v for (i, a), v in self.T1.entries.items()}
        return (Cochain(dims, data), Cochain(dims, theta))

    @classmethod
    def zero(cls, base: RelativeRBO) -> "InfinitesimalDeformation":
        ng, nv = base.dims
        return cls(base, Cochain((ng, 0)), [Matrix.zeros(nv, nv) for _ in range(ng)], Matrix.zeros(ng, nv))


def deformation_axioms(d: InfinitesimalDeformation) -> Report:
    """Jacobi, representation and operator identities to first order in t."""
    S = _DualRRB(d.base, d.omega1, d.varrho1, d.T1)
    ng, nv = S.ng, S.nv
    E = [_dunit(ng, i) for i in range(ng)]
    U = [_dunit(nv, a) for a in range(nv)]
    wit = {}
    jac = True
    for i in range(ng):
        for j in range(i + 1, ng):
            for k in range(j + 1, ng):
                a = S.br(S.br(E[i], E[j]), E[k])
                b = S.br(S.br(E[j], E[k]), E[i])
                c = S.br(S.br(E[k], E[i]), E[j])
                if not _first_order_zero([x + y + z for x, y, z in zip(a, b, c)]):
                    jac = False
                    wit.setdefault("jacobi", (i, j, k))
    rep_ok = True
    for i in range(ng):
        for j in range(i + 1, ng):
            for a in range(nv):
                lhs = S.act(S.br(E[i], E[j]), U[a])
                rhs = [p - q for p, q in zip(S.act(E[i], S.act(E[j], U[a])), S.act(E[j], S.act(E[i], U[a])))]
                if not _first_order_zero([p - q for p, q in zip(lhs, rhs)]):
                    rep_ok = False
                    wit.setdefault("representation", (i, j, a))
    op_ok = True
    for a in range(nv):
        for b in range(a + 1, nv):
            Tu, Tv = S.op(U[a]), S.op(U[b])
            lhs = S.br(Tu, Tv)
            inner = [p - q for p, q in zip(S.act(Tu, U[b]), S.act(Tv, U[a]))]
            rhs = S.op(inner)
            if not _first_order_zero([p - q for p, q in zip(lhs, rhs)]):
                op_ok = False
                wit.setdefault("operator", (a, b))
    checks = {"jacobi": jac, "representation": rep_ok, "operator": op_ok}
    return Report(all(checks.values()), next(iter(wit.values()), None), checks)


def is_two_cocycle(d: InfinitesimalDeformation) -> Report:
    """D(omega1 + varrho1, T1) = 0; the defect is reported in ``checks['defect']``."""
    f, theta = d.to_cochain()
    df, dth = big_d(d.base, (f, theta), 2)
    ok = df.is_zero() and dth.is_zero()
    return Report(ok, None, {"defect": (df, dth)})


@dataclass
class Equivalence:
    """phi = id + tN, psi = id + tS."""

    N: Matrix
    S: Matrix


def _endo_from_vec(dims, vec, space) -> Tuple[Matrix, Matrix]:
    f, _ = space.from_vec(vec)
    ng, nv = dims
    N = Matrix(ng, ng, {(o, t[0]): v for (t, o), v in f.data.items() if o < ng})
    S = Matrix(nv, nv, {(o - ng, t[0] - ng): v for (t, o), v in f.data.items() if o >= ng})
    return N, S


def coboundary(base: RelativeRBO, N: Matrix, S: Matrix) -> InfinitesimalDeformation:
    """The deformation D(N, S)."""
    from .nrcore import endomorphism_cochain
    c = endomorphism_cochain(base.dims, N, S)
    return InfinitesimalDeformation.from_cochain(base, big_d(base, (c, Cochain(base.dims)), 1))


def difference(d1: InfinitesimalDeformation, d2: InfinitesimalDeformation) -> Tuple[Cochain, Cochain]:
    a, b = d1.to_cochain(), d2.to_cochain()
    return (b[0] - a[0], b[1] - a[1])


def equivalent(d1: InfinitesimalDeformation, d2: InfinitesimalDeformation) -> Optional[Equivalence]:
    """Solve D(N, S) = d2 - d1; the witness is checked by substitution."""
    from .foundation import solve
    base = d1.base
    cx = complex_rrb(base)
    target = cx.space(2).to_vec(difference(d1, d2))
    sol = solve(cx.matrix(1), target)
    if sol is None:
        return None
    N, S = _endo_from_vec(base.dims, sol, cx.space(1))
    if coboundary(base, N, S).to_cochain() != difference(d1, d2):
        raise AssertionError("equivalence witness fails substitution")
    return Equivalence(N, S)


def verify_equivalence(d1: InfinitesimalDeformation, d2: InfinitesimalDeformation, w: Equivalence) -> bool:
    """(id + tN, id + tS) is a morphism from the d2-structure to the d1-structure mod t^2."""
    A = _DualRRB(d1.base, d1.omega1, d1.varrho1, d1.T1)
    B = _DualRRB(d2.base, d2.omega1, d2.varrho1, d2.T1)
    ng, nv = A.ng, A.nv

    def phi(x: DVec) -> DVec:
        return [x[i] + sum((Dual(0, w.N[i, j]) * x[j] for j in range(ng)), Dual()) for i in range(ng)]

    def psi(v: DVec) -> DVec:
        return [v[a] + sum((Dual(0, w.S[a, b]) * v[b] for b in range(nv)), Dual()) for a in range(nv)]

    E = [_dunit(ng, i) for i in range(ng)]
    U = [_dunit(nv, a) for a in range(nv)]
    for i in range(ng):
        for j in range(ng):
            if phi(B.br(E[i], E[j])) != A.br(phi(E[i]), phi(E[j])):
                return False
        for a in range(nv):
            if psi(B.act(E[i], U[a])) != A.act(phi(E[i]), psi(U[a])):
                return False
    for a in range(nv):
        if A.op(psi(U[a])) != phi(B.op(U[a])):
            return False
    return True


@dataclass
class Classification:
    classes: List[List[int]]
    coordinates: List[List[Fraction]]
    witnesses: Dict[Tuple[int, int], Equivalence]
    betti2: int


def classify(base: RelativeRBO, cocycles: Sequence[InfinitesimalDeformation]) -> Classification:
    """Group 2-cocycles by their class in H^2; every member is linked to its class leader by a witness."""
    cx = complex_rrb(base)
    h2 = cx.cohomology(2)
    coords = []
    for d in cocycles:
        if not is_two_cocycle(d):
            raise ValueError("classify needs 2-cocycles")
        coords.append(cx.class_coordinates(2, cx.space(2).to_vec(d.to_cochain())))
    classes: List[List[int]] = []
    keys: List[List[Fraction]] = []
    for i, c in enumerate(coords):
        for k, key in enumerate(keys):
            if key == c:
                classes[k].append(i)
                break
        else:
            keys.append(c)
            classes.append([i])
    witnesses = {}
    for cls in classes:
        lead = cls[0]
        for j in cls[1:]:
            w = equivalent(cocycles[lead], cocycles[j])
            if w is None or not verify_equivalence(cocycles[lead], cocycles[j], w):
                raise AssertionError("same class but no verified equivalence")
            witnesses[lead, j] = w
    return Classification(classes, keys, witnesses, h2.betti)


# ---------------------------------------------------------------------------
# Rota-Baxter Lie algebras


def rb_deformation_axioms(rbo: RBO, omega1: Cochain, T1: Matrix) -> Report:
    """Jacobi for mu + t omega1 and the RB identity for T + t T1, to first order."""
    alg = rbo.alg
    ng = alg.dim
    rel = rbo.as_relative()
    varrho = []
    for i in range(ng):
        ents = {}
        for (t, o), v in omega1.data.items():
            a, b = t
            if a == i:
                ents[o, b] = ents.get((o, b), ZERO) + v
            if b == i:
                ents[o, a] = ents.get((o, a), ZERO) - v
        varrho.append(Matrix(ng, ng, ents))
    return deformation_axioms(InfinitesimalDeformation(rel, omega1, varrho, T1))


def rb_is_two_cocycle(rbo: RBO, omega1: Cochain, T1: Matrix) -> Report:
    dims = (rbo.alg.dim, 0)
    theta = Cochain(dims, {((a,), i): v for (i, a), v in T1.entries.items()})
    df, dth = d_rb(rbo, (omega1, theta), 2)
    return Report(df.is_zero() and dth.is_zero(), None, {"defect": (df, dth)})


def rb_equivalent(rbo: RBO, c1: Tuple[Cochain, Cochain], c2: Tuple[Cochain, Cochain]) -> Optional[Matrix]:
    """Solve D_RB(N) = c2 - c1 for N in gl(g)."""
    from .foundation import solve
    cx = complex_rb(rbo)
    sp = cx.space(2)
    target = [b - a for a, b in zip(sp.to_vec(c1), sp.to_vec(c2))]
    sol = solve(cx.matrix(1), target)
    if sol is None:
        return None
    f, _ = cx.space(1).from_vec(sol)
    return Matrix(rbo.alg.dim, rbo.alg.dim, {(o, t[0]): v for (t, o), v in f.data.items()})
