"""Cochain complexes of Lie algebras, LieRep pairs and (relative) Rota-Baxter operators.

Each coboundary operator is available in two forms: through NR brackets
(``method="bracket"``, the definition) and through the explicit multilinear
formula (``method="explicit"``).  ``method="both"`` computes the two and
raises if they differ.

Cochain degrees follow the cohomological convention: an ``n``-cochain of a
Lie algebra is a map of arity ``n``.  Pairs ``(f, theta)`` are tuples of
:class:`~rbx.nrcore.Cochain`; ``theta`` has arity ``n - 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .foundation import ZERO, Matrix, kernel_basis, rank, solve
from .nrcore import Cochain, nested_bracket, nr_bracket
from .structures import RBO, LieAlgebra, RelativeRBO, Representation

Vector = List[Fraction]


# ---------------------------------------------------------------------------
# cochain spaces


def hom_keys(dims: Tuple[int, int], g_in: int, v_in: int, into_g: bool) -> List[Tuple[Tuple[int, ...], int]]:
    """Basis keys of Hom(wedge^g_in g (x) wedge^v_in V, g or V), lexicographic."""
    ng, nv = dims
    if g_in < 0 or v_in < 0 or g_in + v_in == 0:
        return []
    outs = range(ng) if into_g else range(ng, ng + nv)
    keys = []
    for gs in itertools.combinations(range(ng), g_in):
        for vs in itertools.combinations(range(ng, ng + nv), v_in):
            for o in outs:
                keys.append((gs + vs, o))
    return keys


class Space:
    """Coordinates on a finite-dimensional cochain space."""

    dim: int

    def to_vec(self, obj) -> Vector:
        raise NotImplementedError

    def from_vec(self, vec: Sequence) -> Any:
        raise NotImplementedError

    def basis(self) -> List[Any]:
        out = []
        for i in range(self.dim):
            e = [ZERO] * self.dim
            e[i] = Fraction(1)
            out.append(self.from_vec(e))
        return out

    def zero(self):
        return self.from_vec([ZERO] * self.dim)


class CochainSpace(Space):
    """Span of a list of cochain basis keys."""

    def __init__(self, dims: Tuple[int, int], keys: Sequence):
        self.dims = dims
        self.keys = list(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.dim = len(self.keys)

    def to_vec(self, c: Cochain) -> Vector:
        vec = [ZERO] * self.dim
        for k, v in c.data.items():
            if k not in self.index:
                raise ValueError(f"cochain has a component {k} outside this space")
            vec[self.index[k]] = v
        return vec

    def from_vec(self, vec: Sequence) -> Cochain:
        return Cochain(self.dims, {k: v for k, v in zip(self.keys, vec) if v})


class PairSpace(Space):
    """Direct sum; elements are tuples ``(a, b)``."""

    def __init__(self, first: Space, second: Space):
        self.first, self.second = first, second
        self.dim = first.dim + second.dim

    def to_vec(self, obj) -> Vector:
        a, b = obj
        return self.first.to_vec(a) + self.second.to_vec(b)

    def from_vec(self, vec: Sequence):
        return (self.first.from_vec(vec[:self.first.dim]), self.second.from_vec(vec[self.first.dim:]))


class VectorSpace(Space):
    """Plain coordinate vectors (used for the degree-zero CE term)."""

    def __init__(self, dim: int):
        self.dim = dim

    def to_vec(self, obj) -> Vector:
        return list(obj)

    def from_vec(self, vec: Sequence) -> Vector:
        return list(vec)


def ce_space(dims: Tuple[int, int], n: int) -> CochainSpace:
    """Hom(wedge^n g, g)."""
    return CochainSpace(dims, hom_keys(dims, n, 0, True))


def rep_space(dims: Tuple[int, int], n: int) -> CochainSpace:
    """Hom(wedge^n g, g) (+) Hom(wedge^{n-1} g (x) V, V); zero for n <= 0."""
    if n <= 0:
        return CochainSpace(dims, [])
    return CochainSpace(dims, hom_keys(dims, n, 0, True) + hom_keys(dims, n - 1, 1, False))


def op_space(dims: Tuple[int, int], n: int) -> CochainSpace:
    """Hom(wedge^{n-1} V, g) for n >= 2, zero otherwise."""
    if n < 2:
        return CochainSpace(dims, [])
    return CochainSpace(dims, hom_keys(dims, 0, n - 1, True))


# ---------------------------------------------------------------------------
# complexes and cohomology


@dataclass
class CohomologyReport:
    degree: int
    dim_cochains: int
    dim_cocycles: int
    dim_coboundaries: int
    betti: int
    representatives: List[Any] = field(default_factory=list)
    rep_vectors: List[Vector] = field(default_factory=list)

    def to_dict(self) -> Dict[str, int]:
        return {"degree": self.degree, "dim_cochains": self.dim_cochains, "dim_cocycles": self.dim_cocycles,
                "dim_coboundaries": self.dim_coboundaries, "betti": self.betti}


class CochainComplex:
    """A complex given by ``space(n)`` and ``d(n, x)``; matrices are cached."""

    def __init__(self, name: str, space: Callable[[int], Space], d: Callable[[int, Any], Any]):
        self.name = name
        self._space = space
        self._d = d
        self._spaces: Dict[int, Space] = {}
        self._mats: Dict[int, Matrix] = {}
        self._reports: Dict[int, CohomologyReport] = {}

    def space(self, n: int) -> Space:
        if n not in self._spaces:
            self._spaces[n] = self._space(n) if n >= 0 else VectorSpace(0)
        return self._spaces[n]

    def d(self, n: int, x):
        if self.space(n).dim == 0:
            return self.space(n + 1).zero()
        return self._d(n, x)

    def matrix(self, n: int) -> Matrix:
        """Matrix of d: C^n -> C^{n+1} (columns = images of basis vectors)."""
        if n not in self._mats:
            src, dst = self.space(n), self.space(n + 1)
            cols = []
            if dst.dim:
                for b in src.basis():
                    cols.append(dst.to_vec(self._d(n, b)))
            else:
                cols = [[] for _ in range(src.dim)]
            self._mats[n] = Matrix.from_columns(dst.dim, cols) if src.dim else Matrix(dst.dim, 0)
        return self._mats[n]

    def cohomology(self, n: int) -> CohomologyReport:
        if n in self._reports:
            return self._reports[n]
        sp = self.space(n)
        dn = self.matrix(n)
        z = kernel_basis(dn) if sp.dim else []
        dprev = self.matrix(n - 1) if n >= 1 else Matrix(sp.dim, 0)
        bdim = rank(dprev)
        image = [dprev.column(j) for j in range(dprev.cols)]
        reps: List[Vector] = []
        current = image[:]
        cur_rank = bdim
        for v in z:
            r = rank(Matrix.from_columns(sp.dim, current + [v]))
            if r > cur_rank:
                reps.append(v)
                current.append(v)
                cur_rank = r
        rep = CohomologyReport(n, sp.dim, len(z), bdim, len(z) - bdim,
                               [sp.from_vec(v) for v in reps], reps)
        if rep.betti != len(reps):
            raise AssertionError("representative count disagrees with betti number")
        self._reports[n] = rep
        return rep

    def class_coordinates(self, n: int, vec: Sequence) -> Vector:
        """Coordinates of a cocycle's class in the representative basis of H^n."""
        rep = self.cohomology(n)
        sp = self.space(n)
        if any(self.matrix(n) @ list(vec)):
            raise ValueError("not a cocycle")
        dprev = self.matrix(n - 1) if n >= 1 else Matrix(sp.dim, 0)
        cols = rep.rep_vectors + [dprev.column(j) for j in range(dprev.cols)]
        if not cols:
            return []
        sol = solve(Matrix.from_columns(sp.dim, cols), list(vec))
        if sol is None:
            raise AssertionError("cocycle not in span of representatives and coboundaries")
        return sol[:len(rep.rep_vectors)]

    def is_coboundary(self, n: int, vec: Sequence) -> bool:
        return not any(self.class_coordinates(n, vec))

    def check_d_squared(self, n: int) -> bool:
        a, b = self.matrix(n), self.matrix(n + 1)
        return (b @ a).is_zero()


# ---------------------------------------------------------------------------
# small evaluation helpers


def _embed(n_total: int, offset: int, vec: Sequence) -> Vector:
    out = [ZERO] * n_total
    for i, c in enumerate(vec):
        out[offset + i] = c
    return out


def _unit(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = Fraction(1)
    return v


def _add(a: Vector, b: Vector, c=1) -> Vector:
    return [x + c * y for x, y in zip(a, b)]


def _tabulate(dims: Tuple[int, int], keys: Sequence, fn: Callable[[Tuple[int, ...]], Vector]) -> Cochain:
    """Build a cochain from ``fn(tuple) -> W-vector`` on the tuples of ``keys``."""
    outs: Dict[Tuple[int, ...], List[int]] = {}
    for t, o in keys:
        outs.setdefault(t, []).append(o)
    data = {}
    for t, os in outs.items():
        val = fn(t)
        for o in os:
            if val[o]:
                data[t, o] = val[o]
        for o, v in enumerate(val):
            if v and o not in os:
                raise AssertionError(f"explicit formula produced a component {(t, o)} outside the target space")
    return Cochain(dims, data)


class _Ctx:
    """Evaluation context on W = g (+) V for the explicit formulas."""

    def __init__(self, rep: Representation, T: Optional[Matrix] = None):
        self.rep = rep
        self.alg = rep.base
        self.ng, self.nv = rep.dims
        self.N = self.ng + self.nv
        self.T = T

    def g(self, x: Sequence) -> Vector:
        return _embed(self.N, 0, x)

    def v(self, u: Sequence) -> Vector:
        return _embed(self.N, self.ng, u)

    def gpart(self, w: Sequence) -> Vector:
        return list(w[:self.ng])

    def vpart(self, w: Sequence) -> Vector:
        return list(w[self.ng:])

    def split(self, t: Tuple[int, ...]):
        xs = [_unit(self.ng, i) for i in t if i < self.ng]
        vs = [_unit(self.nv, i - self.ng) for i in t if i >= self.ng]
        return xs, vs

    def Tv(self, u: Sequence) -> Vector:
        return self.T @ list(u)


def _check_method(method: str):
    if method not in ("bracket", "explicit", "both"):
        raise ValueError(f"unknown method {method!r}")


def _pick(method: str, bracket_fn, explicit_fn, what: str):
    _check_method(method)
    if method == "bracket":
        return bracket_fn()
    if method == "explicit":
        return explicit_fn()
    a, b = bracket_fn(), explicit_fn()
    if a != b:
        raise AssertionError(f"{what}: bracket form and explicit formula disagree")
    return a


def _arity(c: Cochain, default: int) -> int:
    ar = c.arities()
    if len(ar) > 1:
        raise ValueError("cochain is not homogeneous")
    return next(iter(ar)) if ar else default


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg


def d_ce(alg: LieAlgebra, f: Cochain, n: Optional[int] = None, method: str = "bracket", dim_v: int = 0) -> Cochain:
    """d_CE f = (-1)^{n-1} [mu, f]_NR for f in Hom(wedge^n g, g), n >= 1."""
    n = _arity(f, n) if n is None else n
    if n is None or n < 1:
        raise ValueError("d_CE is defined on n-cochains with n >= 1")
    dims = f.dims

    def br():
        val = nr_bracket(alg.mu(dims[1]), f)
        return val if (n - 1) % 2 == 0 else -val

    def ex():
        ctx = _Ctx(Representation.trivial(alg, dims[1]))

        def fn(t):
            xs, _ = ctx.split(t)
            out = [ZERO] * alg.dim
            for i in range(n + 1):
                rest = xs[:i] + xs[i + 1:]
                val = ctx.gpart(f.evaluate([ctx.g(x) for x in rest]))
                out = _add(out, alg.bracket(xs[i], val), (-1) ** i)
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    rest = [xs[k] for k in range(n + 1) if k not in (i, j)]
                    val = ctx.gpart(f.evaluate([ctx.g(alg.bracket(xs[i], xs[j]))] + [ctx.g(x) for x in rest]))
                    out = _add(out, val, (-1) ** (i + j))
            return _embed(ctx.N, 0, out)

        return _tabulate(dims, hom_keys(dims, n + 1, 0, True), fn)

    return _pick(method, br, ex, "d_CE")


def d_ce_zero(alg: LieAlgebra, x: Sequence, dim_v: int = 0) -> Cochain:
    """Degree-zero CE differential: x |-> (y |-> [y, x])."""
    dims = (alg.dim, dim_v)
    data = {}
    for i in range(alg.dim):
        val = alg.bracket(_unit(alg.dim, i), x)
        for k, c in enumerate(val):
            if c:
                data[(i,), k] = c
    return Cochain(dims, data)


def complex_ce(alg: LieAlgebra, augmented: bool = True, method: str = "bracket") -> CochainComplex:
    """CE complex with adjoint coefficients.

    ``augmented=True`` includes C^0 = g, so H^1 is outer derivations;
    ``augmented=False`` sets C^0 = 0 as in the Rota-Baxter sequences.
    """
    dims = (alg.dim, 0)

    def space(n):
        if n == 0:
            return VectorSpace(alg.dim if augmented else 0)
        return ce_space(dims, n)

    def d(n, x):
        if n == 0:
            return d_ce_zero(alg, x)
        return d_ce(alg, x, n, method)

    return CochainComplex("ce" if augmented else "ce-reduced", space, d)


# ---------------------------------------------------------------------------
# LieRep pairs


def partial(rep: Representation, f: Cochain, n: Optional[int] = None, method: str = "bracket") -> Cochain:
    """(-1)^{n-1} [mu + rho, f]_NR on Hom(wedge^n g, g) (+) Hom(wedge^{n-1} g (x) V, V)."""
    n = _arity(f, n) if n is None else n
    if n is None or n < 1:
        raise ValueError("the LieRep differential is defined for n >= 1")
    dims = rep.dims

    def br():
        val = nr_bracket(rep.pi(), f)
        return val if (n - 1) % 2 == 0 else -val

    def ex():
        ctx = _Ctx(rep)
        alg = rep.base
        fg_part = f.restrict(lambda k: k[1] < ctx.ng)
        fg = d_ce(alg, fg_part, n, "explicit") if fg_part else Cochain(dims)

        def fv(xs, v):
            return ctx.vpart(f.evaluate([ctx.g(x) for x in xs] + [ctx.v(v)]))

        def fn(t):
            xs, vs = ctx.split(t)
            v = vs[0]
            out = [ZERO] * ctx.nv
            for i in range(n):
                for j in range(i + 1, n):
                    rest = [xs[k] for k in range(n) if k not in (i, j)]
                    out = _add(out, fv([alg.bracket(xs[i], xs[j])] + rest, v), (-1) ** (i + j))
            fgx = ctx.gpart(f.evaluate([ctx.g(x) for x in xs]))
            out = _add(out, rep.act(fgx, v), (-1) ** (n - 1))
            for i in range(n):
                rest = xs[:i] + xs[i + 1:]
                term = _add(rep.act(xs[i], fv(rest, v)), fv(rest, rep.act(xs[i], v)), -1)
                out = _add(out, term, (-1) ** i)
            return ctx.v(out)

        fvpart = _tabulate(dims, hom_keys(dims, n, 1, False), fn)
        return fg + fvpart

    return _pick(method, br, ex, "partial")


def complex_lierep(rep: Representation, method: str = "bracket") -> CochainComplex:
    return CochainComplex("lierep", lambda n: rep_space(rep.dims, n), lambda n, f: partial(rep, f, n, method))


# ---------------------------------------------------------------------------
# relative Rota-Baxter operators


def delta(op: RelativeRBO, theta: Cochain, n: Optional[int] = None, method: str = "bracket") -> Cochain:
    """(-1)^{n-2} [[pi, T]_NR, theta]_NR for theta in Hom(wedge^{n-1} V, g), n >= 2."""
    if n is None:
        a = _arity(theta, None)
        if a is None:
            raise ValueError("cannot infer the degree of a zero cochain; pass n")
        n = a + 1
    if n < 2:
        raise ValueError("the operator complex starts in degree 2")
    dims = op.dims

    def br():
        val = nr_bracket(nr_bracket(op.rep.pi(), op.cochain()), theta)
        return val if n % 2 == 0 else -val

    def ex():
        ctx = _Ctx(op.rep, op.T)
        alg, rep = op.alg, op.rep

        def th(vs):
            return ctx.gpart(theta.evaluate([ctx.v(u) for u in vs]))

        def fn(t):
            _, vs = ctx.split(t)
            out = [ZERO] * ctx.ng
            for i in range(n):
                rest = vs[:i] + vs[i + 1:]
                val = th(rest)
                out = _add(out, alg.bracket(ctx.Tv(vs[i]), val), (-1) ** i)
                out = _add(out, ctx.Tv(rep.act(val, vs[i])), (-1) ** i)
            for i in range(n):
                for j in range(i + 1, n):
                    rest = [vs[k] for k in range(n) if k not in (i, j)]
                    w = _add(rep.act(ctx.Tv(vs[i]), vs[j]), rep.act(ctx.Tv(vs[j]), vs[i]), -1)
                    out = _add(out, th([w] + rest), (-1) ** (i + j))
            return ctx.g(out)

        return _tabulate(dims, hom_keys(dims, 0, n, True), fn)

    return _pick(method, br, ex, "delta")


def complex_oop(op: RelativeRBO, method: str = "bracket") -> CochainComplex:
    return CochainComplex("oop", lambda n: op_space(op.dims, n), lambda n, t: delta(op, t, n, method))


def h_T(op: RelativeRBO, f: Cochain, n: Optional[int] = None, method: str = "bracket") -> Cochain:
    """(-1)^{n-2} (1/n!) [...[f, T]_NR ... T]_NR (n brackets); lands in Hom(wedge^n V, g)."""
    n = _arity(f, n) if n is None else n
    if n is None or n < 1:
        raise ValueError("h_T is defined for n >= 1")
    dims = op.dims

    def br():
        val = nested_bracket(f, [op.cochain()] * n).scale(Fraction(1, math.factorial(n)))
        return val if n % 2 == 0 else -val

    def ex():
        ctx = _Ctx(op.rep, op.T)

        def fn(t):
            _, vs = ctx.split(t)
            Tvs = [ctx.Tv(u) for u in vs]
            out = _add([ZERO] * ctx.ng, ctx.gpart(f.evaluate([ctx.g(x) for x in Tvs])), (-1) ** n)
            for i in range(n):
                rest = Tvs[:i] + Tvs[i + 1:]
                val = ctx.vpart(f.evaluate([ctx.g(x) for x in rest] + [ctx.v(vs[i])]))
                out = _add(out, ctx.Tv(val), (-1) ** i)
            return ctx.g(out)

        return _tabulate(dims, hom_keys(dims, 0, n, True), fn)

    return _pick(method, br, ex, "h_T")


def big_d(op: RelativeRBO, c: Tuple[Cochain, Cochain], n: Optional[int] = None,
          method: str = "bracket") -> Tuple[Cochain, Cochain]:
    """The coboundary (f, theta) |-> (partial f, delta theta + h_T f)."""
    f, theta = c
    if n is None:
        n = _arity(f, None)
        if n is None:
            a = _arity(theta, None)
            if a is None:
                raise ValueError("cannot infer the degree of a zero cochain; pass n")
            n = a + 1
    if n < 1:
        return (Cochain(op.dims), Cochain(op.dims))
    if n == 1 and theta:
        raise ValueError("1-cochains have no operator component")
    df = partial(op.rep, f, n, method)
    dth = h_T(op, f, n, method)
    if n >= 2:
        dth = dth + delta(op, theta, n, method)
    return (df, dth)


def big_d_direct(op: RelativeRBO, c: Tuple[Cochain, Cochain], n: int) -> Tuple[Cochain, Cochain]:
    """The same coboundary written as one signed expression of NR brackets."""
    f, theta = c
    pi, T = op.rep.pi(), op.cochain()
    s = 1 if n % 2 == 0 else -1
    first = (-nr_bracket(pi, f)).scale(s)
    second = nested_bracket(f, [T] * n).scale(Fraction(1, math.factorial(n)))
    if n >= 2:
        second = second + nr_bracket(nr_bracket(pi, T), theta)
    return (first, second.scale(s))


def rrb_space(dims: Tuple[int, int], n: int) -> Space:
    return PairSpace(rep_space(dims, n), op_space(dims, n))


def complex_rrb(op: RelativeRBO, method: str = "bracket") -> CochainComplex:
    return CochainComplex("rrb", lambda n: rrb_space(op.dims, n), lambda n, c: big_d(op, c, n, method))


# ---------------------------------------------------------------------------
# Rota-Baxter operators on a Lie algebra


def embed_rb(f: Cochain, theta: Cochain, n: int) -> Tuple[Cochain, Cochain]:
    """(f, theta) on g |-> (f, f, theta) on g (+) g (second copy acting as V)."""
    ng = f.dims[0]
    dims = (ng, ng)
    data = {}
    for (t, o), v in f.data.items():
        data[t, o] = v
        # f(x_1..x_{n-1}, v) with v from the copy: move the last slot into V
        for pos in range(len(t)):
            rest = t[:pos] + t[pos + 1:]
            sign = (-1) ** (len(t) - 1 - pos)
            key = (rest + (ng + t[pos],), ng + o)
            data[key] = data.get(key, ZERO) + sign * v
    th = {}
    for (t, o), v in theta.data.items():
        th[tuple(ng + i for i in t), o] = v
    return (Cochain(dims, data), Cochain(dims, th))


def project_rb(c: Tuple[Cochain, Cochain]) -> Tuple[Cochain, Cochain]:
    """Inverse of :func:`embed_rb` on its image; raises if the input is not in the image."""
    F, Th = c
    ng = F.dims[0]
    dims = (ng, 0)
    f = Cochain(dims, {k: v for k, v in F.data.items() if all(i < ng for i in k[0]) and k[1] < ng})
    theta = Cochain(dims, {(tuple(i - ng for i in t), o): v for (t, o), v in Th.data.items()})
    n = _arity(f, None)
    if n is not None:
        back, _ = embed_rb(f, Cochain(dims), n)
        if back != F:
            raise ValueError("cochain is not in the image of the embedding")
    elif F:
        raise ValueError("cochain is not in the image of the embedding")
    return (f, theta)


def omega(rbo: RBO, f: Cochain, n: Optional[int] = None, method: str = "explicit") -> Cochain:
    """(-1)^n ( f(Tx_1..Tx_n) - sum_i T f(Tx_1..x_i..Tx_n) )."""
    n = _arity(f, n) if n is None else n
    if n is None or n < 1:
        raise ValueError("Omega is defined for n >= 1")
    dims = (rbo.alg.dim, 0)

    def ex():
        T, ng = rbo.T, rbo.alg.dim

        def fn(t):
            xs = [_unit(ng, i) for i in t]
            Txs = [T @ x for x in xs]
            out = f.evaluate(Txs)
            for i in range(n):
                args = Txs[:i] + [xs[i]] + Txs[i + 1:]
                out = _add(out, T @ f.evaluate(args), -1)
            return [c * (-1) ** n for c in out]

        return _tabulate(dims, hom_keys(dims, n, 0, True), fn)

    def br():
        op = rbo.as_relative()
        F, _ = embed_rb(f, Cochain(dims), n)
        val = h_T(op, F, n, "bracket")
        return Cochain(dims, {(tuple(i - rbo.alg.dim for i in t), o): v for (t, o), v in val.data.items()})

    return _pick(method, br, ex, "Omega")


def d_rb(rbo: RBO, c: Tuple[Cochain, Cochain], n: Optional[int] = None,
         method: str = "explicit") -> Tuple[Cochain, Cochain]:
    """(f, theta) |-> (d_CE f, delta theta + Omega f) on Hom(wedge^n g, g) (+) Hom(wedge^{n-1} g, g).

    ``method="bracket"`` routes through the relative complex over the adjoint
    representation via the embedding (f, theta) |-> (f, f, theta).
    """
    f, theta = c
    if n is None:
        n = _arity(f, None)
        if n is None:
            a = _arity(theta, None)
            if a is None:
                raise ValueError("cannot infer the degree of a zero cochain; pass n")
            n = a + 1
    dims = (rbo.alg.dim, 0)
    if n < 1:
        return (Cochain(dims), Cochain(dims))
    if n == 1 and theta:
        raise ValueError("1-cochains have no operator component")

    def ex():
        op = rbo.as_relative()
        df = d_ce(rbo.alg, f, n, "explicit")
        dth = omega(rbo, f, n, "explicit")
        if n >= 2 and theta:
            _, Th = embed_rb(Cochain(dims), theta, n)
            val = delta(op, Th, n, "explicit")
            dth = dth + Cochain(dims, {(tuple(i - rbo.alg.dim for i in t), o): v for (t, o), v in val.data.items()})
        return (df, dth)

    def br():
        op = rbo.as_relative()
        return project_rb(big_d(op, embed_rb(f, theta, n), n, "bracket"))

    return _pick(method, br, ex, "D_RB")


def rb_space(ng: int, n: int) -> Space:
    dims = (ng, 0)
    if n <= 0:
        return PairSpace(CochainSpace(dims, []), CochainSpace(dims, []))
    second = CochainSpace(dims, hom_keys(dims, n - 1, 0, True) if n >= 2 else [])
    return PairSpace(ce_space(dims, n), second)


def complex_rb(rbo: RBO, method: str = "explicit") -> CochainComplex:
    return CochainComplex("rb", lambda n: rb_space(rbo.alg.dim, n), lambda n, c: d_rb(rbo, c, n, method))


def complex_oop_rb(rbo: RBO, method: str = "explicit") -> CochainComplex:
    """The operator complex of an RB operator, written on Hom(wedge^{n-1} g, g)."""
    op = rbo.as_relative()
    ng = rbo.alg.dim
    dims = (ng, 0)

    def space(n):
        return CochainSpace(dims, hom_keys(dims, n - 1, 0, True) if n >= 2 else [])

    def d(n, theta):
        _, Th = embed_rb(Cochain(dims), theta, n)
        val = delta(op, Th, n, method)
        return Cochain(dims, {(tuple(i - ng for i in t), o): v for (t, o), v in val.data.items()})

    return CochainComplex("oop-rb", space, d)


# ---------------------------------------------------------------------------
# dispatch


KINDS = ("ce", "lierep", "oop", "rrb", "rb", "tlb")


def build_complex(kind: str, structure, method: Optional[str] = None) -> CochainComplex:
    """Complex of the given kind; ``structure`` is the matching object."""
    if kind == "ce":
        alg = structure if isinstance(structure, LieAlgebra) else _alg_of(structure)
        return complex_ce(alg, True, method or "bracket")
    if kind == "lierep":
        rep = structure if isinstance(structure, Representation) else structure.rep
        return complex_lierep(rep, method or "bracket")
    if kind == "oop":
        return complex_oop(_relative(structure), method or "bracket")
    if kind == "rrb":
        return complex_rrb(_relative(structure), method or "bracket")
    if kind == "rb":
        if not isinstance(structure, RBO):
            raise TypeError("the rb complex needs a Rota-Baxter operator on a Lie algebra")
        return complex_rb(structure, method or "explicit")
    if kind == "tlb":
        from .bialgebra import complex_tlb
        return complex_tlb(structure.alg, structure.r)
    raise ValueError(f"unknown complex kind {kind!r}")


def _alg_of(s) -> LieAlgebra:
    for attr in ("alg", "base"):
        if hasattr(s, attr):
            return getattr(s, attr)
    raise TypeError("cannot find a Lie algebra in the structure")


def _relative(s) -> RelativeRBO:
    if isinstance(s, RelativeRBO):
        return s
    if isinstance(s, RBO):
        return s.as_relative()
    raise TypeError("expected a relative Rota-Baxter operator")


def cohomology(kind: str, structure, n: int) -> CohomologyReport:
    return build_complex(kind, structure).cohomology(n)


# ---------------------------------------------------------------------------
# long exact sequences


@dataclass
class LESReport:
    ok: bool
    max_degree: int
    bettis: Dict[str, List[int]]
    nodes: List[Dict[str, Any]]

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "max_degree": self.max_degree, "bettis": self.bettis, "nodes": self.nodes}


def induced_map(src: CochainComplex, dst: CochainComplex, n_src: int, n_dst: int,
                fn: Callable[[Any], Any]) -> Matrix:
    """Matrix of the map on cohomology induced by a cochain map (or connecting map) ``fn``."""
    hs = src.cohomology(n_src)
    hd = dst.cohomology(n_dst)
    cols = []
    for x in hs.representatives:
        y = dst.space(n_dst).to_vec(fn(x))
        cols.append(dst.class_coordinates(n_dst, y))
    if not cols:
        return Matrix(hd.betti, 0)
    return Matrix.from_columns(hd.betti, cols)


def sequence_exactness(names: Sequence[str], spaces: Sequence[int], maps: Sequence[Matrix]) -> List[Dict[str, Any]]:
    """Check exactness of V_0 -> V_1 -> ... at every interior node by rank identities."""
    nodes = []
    for i in range(1, len(spaces) - 1):
        f, g = maps[i - 1], maps[i]
        comp_zero = (g @ f).is_zero() if f.cols and g.rows else True
        rf, rg = rank(f), rank(g)
        exact = comp_zero and rf + rg == spaces[i]
        nodes.append({"node": names[i], "dim": spaces[i], "rank_in": rf, "rank_out": rg, "exact": exact})
    return nodes


def les_from_triple(sub: CochainComplex, mid: CochainComplex, quo: CochainComplex,
                    iota: Callable[[int, Any], Any], proj: Callable[[int, Any], Any],
                    connect: Callable[[int, Any], Any], max_degree: int) -> LESReport:
    """Exactness of ... H^n(sub) -> H^n(mid) -> H^n(quo) -> H^{n+1}(sub) -> ... up to ``max_degree``."""
    names, dims, maps = [], [], []
    for n in range(0, max_degree + 1):
        for label, cx in (("sub", sub), ("mid", mid), ("quo", quo)):
            names.append(f"{label}^{n}")
            dims.append(cx.cohomology(n).betti)
        maps.append(induced_map(sub, mid, n, n, lambda x, n=n: iota(n, x)))
        maps.append(induced_map(mid, quo, n, n, lambda x, n=n: proj(n, x)))
        maps.append(induced_map(quo, sub, n, n + 1, lambda x, n=n: connect(n, x)))
    names.append(f"sub^{max_degree + 1}")
    dims.append(sub.cohomology(max_degree + 1).betti)
    # node 0 (H^0 of sub) has nothing coming in: exactness there is injectivity
    full_names = ["0"] + names
    full_dims = [0] + dims
    full_maps = [Matrix(dims[0], 0)] + maps
    nodes = sequence_exactness(full_names, full_dims, full_maps)
    nodes = [nd for nd in nodes if nd["node"] != f"sub^{max_degree + 1}"]
    bettis = {"sub": [sub.cohomology(n).betti for n in range(max_degree + 2)],
              "mid": [mid.cohomology(n).betti for n in range(max_degree + 1)],
              "quo": [quo.cohomology(n).betti for n in range(max_degree + 1)]}
    return LESReport(all(nd["exact"] for nd in nodes), max_degree, bettis, nodes)


def les_check(kind: str, structure, max_degree: int = 3) -> LESReport:
    """Long exact sequence for ``kind`` in {"rrb", "rb", "tlb"}."""
    if kind == "rrb":
        op = _relative(structure)
        sub, mid, quo = complex_oop(op), complex_rrb(op), complex_lierep(op.rep)
        dims = op.dims
        return les_from_triple(
            sub, mid, quo,
            lambda n, th: (Cochain(dims), th),
            lambda n, c: c[0],
            lambda n, f: h_T(op, f, n) if n >= 1 else Cochain(dims),
            max_degree)
    if kind == "rb":
        if not isinstance(structure, RBO):
            raise TypeError("the rb sequence needs a Rota-Baxter operator on a Lie algebra")
        rbo = structure
        dims = (rbo.alg.dim, 0)
        sub, mid, quo = complex_oop_rb(rbo), complex_rb(rbo), complex_ce(rbo.alg, augmented=False)
        return les_from_triple(
            sub, mid, quo,
            lambda n, th: (Cochain(dims), th),
            lambda n, c: c[0],
            lambda n, f: omega(rbo, f, n) if n >= 1 else Cochain(dims),
            max_degree)
    if kind == "tlb":
        from .bialgebra import tlb_les_check
        return tlb_les_check(structure.alg, structure.r, max_degree)
    raise ValueError(f"no long exact sequence for kind {kind!r}")
