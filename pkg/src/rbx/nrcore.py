"""Alternating multilinear maps on g (+) V and the Nijenhuis-Richardson bracket.

A :class:`Cochain` is an element of ``C^*(W, W) = (+)_n Hom(wedge^{n+1} W, W)``
for ``W = g (+) V``.  Basis indices ``0 .. dim_g-1`` are g, the remaining ones
are V.  Values are stored only on strictly increasing index tuples; every other
argument order is reached by sort-and-sign.

Degree conventions used throughout the package:

* NR degree of a map of arity ``m`` is ``m - 1``;
* a map ``wedge^a g (x) wedge^b V -> g`` has bidegree ``(a-1)|b``, one landing
  in V has bidegree ``a|(b-1)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .foundation import (
    ONE,
    ZERO,
    Matrix,
    Q,
    exterior_basis,
    perm_sign,
    shuffles,
    sort_with_sign,
)

Key = Tuple[Tuple[int, ...], int]
Vector = List[Fraction]


class Cochain:
    """Element of C^*(g (+) V, g (+) V), possibly mixing arities and bidegrees."""

    __slots__ = ("dims", "data")

    def __init__(self, dims: Tuple[int, int], data: Optional[Dict[Key, Fraction]] = None):
        self.dims = (int(dims[0]), int(dims[1]))
        n = self.dims[0] + self.dims[1]
        clean: Dict[Key, Fraction] = {}
        for (tup, out), v in (data or {}).items():
            v = Q(v)
            if not v:
                continue
            tup = tuple(tup)
            if not tup or any(b <= a for a, b in zip(tup, tup[1:])):
                raise ValueError(f"key {tup} is not strictly increasing and nonempty")
            if tup[-1] >= n or tup[0] < 0 or not 0 <= out < n:
                raise ValueError(f"index out of range in {(tup, out)}")
            clean[tup, out] = clean.get((tup, out), ZERO) + v
            if not clean[tup, out]:
                del clean[tup, out]
        self.data = clean

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, dims) -> "Cochain":
        return cls(dims)

    @classmethod
    def from_unsorted(cls, dims, items: Iterable[Tuple[Sequence[int], int, Fraction]]) -> "Cochain":
        acc: Dict[Key, Fraction] = defaultdict(Fraction)
        for args, out, v in items:
            tup, s = sort_with_sign(args)
            if tup is None:
                continue
            acc[tup, out] += s * Q(v)
        return cls(dims, acc)

    # -- basic algebra ----------------------------------------------------
    @property
    def n(self) -> int:
        return self.dims[0] + self.dims[1]

    def _check(self, other: "Cochain"):
        if not isinstance(other, Cochain):
            raise TypeError("expected a Cochain")
        if other.dims != self.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        d = dict(self.data)
        for k, v in other.data.items():
            d[k] = d.get(k, ZERO) + v
        return Cochain(self.dims, d)

    def __neg__(self) -> "Cochain":
        return Cochain(self.dims, {k: -v for k, v in self.data.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, c) -> "Cochain":
        c = Q(c)
        return Cochain(self.dims, {k: c * v for k, v in self.data.items()})

    def __rmul__(self, c) -> "Cochain":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cochain) and self.dims == other.dims and self.data == other.data

    def __hash__(self):
        return hash((self.dims, frozenset(self.data.items())))

    def is_zero(self) -> bool:
        return not self.data

    def __bool__(self) -> bool:
        return bool(self.data)

    def __repr__(self) -> str:
        return f"Cochain(dims={self.dims}, nnz={len(self.data)}, arities={sorted(self.arities())})"

    # -- grading ------------------------------------------------------------
    def arities(self) -> set:
        return {len(t) for (t, _) in self.data}

    def component(self, arity: int) -> "Cochain":
        return Cochain(self.dims, {k: v for k, v in self.data.items() if len(k[0]) == arity})

    @property
    def degree(self) -> Optional[int]:
        """NR degree (arity - 1) when arity-homogeneous; None otherwise or when zero."""
        ar = self.arities()
        if len(ar) != 1:
            return None
        return next(iter(ar)) - 1

    def key_bidegree(self, key: Key) -> Tuple[int, int]:
        tup, out = key
        ng = self.dims[0]
        a = sum(1 for i in tup if i < ng)
        b = len(tup) - a
        return (a - 1, b) if out < ng else (a, b - 1)

    def bidegrees(self) -> set:
        return {self.key_bidegree(k) for k in self.data}

    def bidegree_component(self, k: int, l: int) -> "Cochain":
        return Cochain(self.dims, {key: v for key, v in self.data.items() if self.key_bidegree(key) == (k, l)})

    def restrict(self, pred) -> "Cochain":
        return Cochain(self.dims, {key: v for key, v in self.data.items() if pred(key)})

    # -- evaluation -----------------------------------------------------------
    def on_basis(self, args: Sequence[int]) -> Vector:
        """Value on basis vectors given in any order (alternating)."""
        out = [ZERO] * self.n
        tup, s = sort_with_sign(args)
        if tup is None:
            return out
        for (t, o), v in self._by_tuple().get(tup, ()):  # type: ignore[misc]
            out[o] += s * v
        return out

    def _by_tuple(self):
        idx = defaultdict(list)
        for k, v in self.data.items():
            idx[k[0]].append((k, v))
        return idx

    def evaluate(self, args: Sequence[Sequence]) -> Vector:
        """Multilinear evaluation on arbitrary vectors of W (dense lists)."""
        m = len(args)
        out = [ZERO] * self.n
        by_t = self._by_tuple()
        supports = [[(i, Q(c)) for i, c in enumerate(a) if c] for a in args]

        def rec(pos, chosen, coef):
            if pos == m:
                tup, s = sort_with_sign(chosen)
                if tup is None:
                    return
                for (t, o), v in by_t.get(tup, ()):
                    out[o] += s * coef * v
                return
            for i, c in supports[pos]:
                rec(pos + 1, chosen + [i], coef * c)

        rec(0, [], ONE)
        return out


def basis_vector(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = ONE
    return v


# ---------------------------------------------------------------------------
# Bigraded maps and the lift


@dataclass
class BigradedMap:
    """A map ``wedge^a g (x) wedge^b V -> g`` or ``-> V`` given by block coefficients.

    ``coeffs`` is keyed by ``(g_indices, v_indices, target_index)`` with both
    index tuples strictly increasing; V and target indices are local to their
    own space.
    """

    dims: Tuple[int, int]
    g_arity: int
    v_arity: int
    into_g: bool
    coeffs: Dict[Tuple[Tuple[int, ...], Tuple[int, ...], int], Fraction] = field(default_factory=dict)

    @property
    def bidegree(self) -> Tuple[int, int]:
        if self.into_g:
            return (self.g_arity - 1, self.v_arity)
        return (self.g_arity, self.v_arity - 1)

    def lift(self) -> Cochain:
        ng = self.dims[0]
        data = {}
        for (gs, vs, t), c in self.coeffs.items():
            if len(gs) != self.g_arity or len(vs) != self.v_arity:
                raise ValueError("arity mismatch in coefficients")
            key = (tuple(gs) + tuple(ng + j for j in vs), t if self.into_g else ng + t)
            data[key] = Q(c)
        return Cochain(self.dims, data)

    def raw(self, xs: Sequence[Sequence], vs: Sequence[Sequence]) -> Vector:
        """f(x_1..x_a, v_1..v_b) on g- and V-vectors, landing in its own target space."""
        ng, nv = self.dims
        tdim = ng if self.into_g else nv
        out = [ZERO] * tdim
        table = defaultdict(list)
        for (gs, vs_, t), c in self.coeffs.items():
            table[(tuple(gs), tuple(vs_))].append((t, Q(c)))
        gsup = [[(i, Q(c)) for i, c in enumerate(x) if c] for x in xs]
        vsup = [[(i, Q(c)) for i, c in enumerate(v) if c] for v in vs]

        def rec(pos, gi, vi, coef):
            if pos == len(gsup) + len(vsup):
                gt, s1 = sort_with_sign(gi)
                vt, s2 = sort_with_sign(vi)
                if gt is None or vt is None:
                    return
                for t, c in table.get((gt, vt), ()):
                    out[t] += s1 * s2 * coef * c
                return
            if pos < len(gsup):
                for i, c in gsup[pos]:
                    rec(pos + 1, gi + [i], vi, coef * c)
            else:
                for i, c in vsup[pos - len(gsup)]:
                    rec(pos + 1, gi, vi + [i], coef * c)

        rec(0, [], [], ONE)
        return out

    def evaluate_lifted(self, pairs: Sequence[Tuple[Sequence, Sequence]]) -> Tuple[Vector, Vector]:
        """Shuffle-sum evaluation of the lift on arguments ``(x_i, v_i)``."""
        a, b = self.g_arity, self.v_arity
        if len(pairs) != a + b:
            raise ValueError(f"lift of a {a}+{b}-ary map needs {a + b} arguments, got {len(pairs)}")
        ng, nv = self.dims
        gx = [ZERO] * ng
        vx = [ZERO] * nv
        for sigma, sign in shuffles([a, b]):
            xs = [pairs[sigma[i]][0] for i in range(a)]
            vs = [pairs[sigma[i]][1] for i in range(a, a + b)]
            val = self.raw(xs, vs)
            tgt = gx if self.into_g else vx
            for i, c in enumerate(val):
                tgt[i] += sign * c
        return gx, vx


def lift(f: BigradedMap) -> Cochain:
    return f.lift()


def bidegree(c: Cochain) -> Optional[Tuple[int, int]]:
    """The bidegree of a homogeneous cochain, or None for mixed or zero input."""
    bd = c.bidegrees()
    if len(bd) != 1:
        return None
    return next(iter(bd))


# ---------------------------------------------------------------------------
# Nijenhuis-Richardson bracket


def _circ(P: Cochain, Qc: Cochain) -> Cochain:
    """P o-bar Q: sum over (q+1, p)-shuffles of P(Q(x_A), x_B), all arities at once."""
    by_first = defaultdict(list)
    for (K, o), pv in P.data.items():
        for pos, c in enumerate(K):
            by_first[c].append((K[:pos] + K[pos + 1:], o, pv if pos % 2 == 0 else -pv))
    acc: Dict[Key, Fraction] = defaultdict(Fraction)
    for (A, c), qv in Qc.data.items():
        for B, o, pv in by_first.get(c, ()):
            if set(A) & set(B):
                continue
            merged = A + B
            t = tuple(sorted(merged))
            acc[t, o] += perm_sign(merged) * qv * pv
    return Cochain(P.dims, acc)


def circ(P: Cochain, Qc: Cochain) -> Cochain:
    P._check(Qc)
    return _circ(P, Qc)


def nr_bracket(P: Cochain, Qc: Cochain) -> Cochain:
    """[P, Q]_NR = P o Q - (-1)^{pq} Q o P, extended bilinearly over arities."""
    P._check(Qc)
    result = Cochain(P.dims)
    for ap in sorted(P.arities()):
        Pp = P.component(ap)
        for aq in sorted(Qc.arities()):
            Qq = Qc.component(aq)
            p, q = ap - 1, aq - 1
            term = _circ(Pp, Qq)
            other = _circ(Qq, Pp)
            result = result + (term - other if (p * q) % 2 == 0 else term + other)
    return result


def coderivation_matrix(Qc: Cochain, m: int) -> Tuple[Matrix, List[Tuple[int, ...]], List[Tuple[int, ...]]]:
    """Matrix of the coderivation extending a homogeneous Q on wedge^m W.

    Columns are indexed by ``exterior_basis(m, N)``, rows by
    ``exterior_basis(m - q, N)``.
    """
    N = Qc.n
    arity = Qc.degree + 1
    src = exterior_basis(m, N)
    dst = exterior_basis(m - arity + 1, N)
    dst_index = {t: i for i, t in enumerate(dst)}
    ents: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for col, t in enumerate(src):
        for sigma, sign in shuffles([arity, m - arity]):
            A = tuple(t[sigma[i]] for i in range(arity))
            B = tuple(t[sigma[i]] for i in range(arity, m))
            val = Qc.on_basis(A)
            for c, v in enumerate(val):
                if not v:
                    continue
                word, s = sort_with_sign((c,) + B)
                if word is None:
                    continue
                ents[dst_index[word], col] += sign * s * v
    return Matrix(len(dst), len(src), ents), src, dst


def _as_matrix(P: Cochain) -> Tuple[Matrix, List[Tuple[int, ...]]]:
    N = P.n
    arity = P.degree + 1
    src = exterior_basis(arity, N)
    ents = {}
    for col, t in enumerate(src):
        for o, v in enumerate(P.on_basis(t)):
            if v:
                ents[o, col] = v
    return Matrix(N, len(src), ents), src


def nr_bracket_coder(P: Cochain, Qc: Cochain) -> Cochain:
    """Independent route: corestriction of the commutator of coderivations on wedge^c W."""
    P._check(Qc)
    result = Cochain(P.dims)
    for ap in sorted(P.arities()):
        for aq in sorted(Qc.arities()):
            Pp, Qq = P.component(ap), Qc.component(aq)
            p, q = ap - 1, aq - 1
            m = p + q + 1
            if m > P.n:
                continue
            DQ, src, _ = coderivation_matrix(Qq, m)
            DP, _, _ = coderivation_matrix(Pp, m)
            MP, _ = _as_matrix(Pp)
            MQ, _ = _as_matrix(Qq)
            comm = MP @ DQ
            other = MQ @ DP
            data = defaultdict(Fraction)
            sign = -1 if (p * q) % 2 == 0 else 1
            for (o, col), v in comm.entries.items():
                data[src[col], o] += v
            for (o, col), v in other.entries.items():
                data[src[col], o] += sign * v
            result = result + Cochain(P.dims, data)
    return result


def nested_bracket(f: Cochain, args: Sequence[Cochain]) -> Cochain:
    """[...[[f, a_1], a_2], ..., a_k]_NR."""
    out = f
    for a in args:
        if out.is_zero():
            return out
        out = nr_bracket(out, a)
    return out


def courant_bracket(theta: Cochain, phi: Cochain, pi: Cochain) -> Cochain:
    """Derived bracket (-1)^{n-1} [[pi, theta]_NR, phi]_NR on maps wedge^n V -> g.

    Both arguments must lie in the abelian subalgebra of maps from wedge^* V
    to g.  The result has bidegree -1|(n+m).
    """
    for x in (theta, phi):
        for bd in x.bidegrees():
            if bd[0] != -1:
                raise ValueError(f"argument has bidegree {bd}; expected -1|k")
    out = Cochain(theta.dims)
    for a in sorted(theta.arities()):
        th = theta.component(a)
        val = nr_bracket(nr_bracket(pi, th), phi)
        out = out + (val if (a - 1) % 2 == 0 else -val)
    return out


# ---------------------------------------------------------------------------
# Standard building blocks


def mu_cochain(dims: Tuple[int, int], consts) -> Cochain:
    """Lie bracket from structure constants ``consts[i][j][k]`` ([e_i, e_j] = sum_k c e_k)."""
    ng = dims[0]
    data = {}
    for i in range(ng):
        for j in range(i + 1, ng):
            for k in range(ng):
                v = consts[i][j][k]
                if v:
                    data[(i, j), k] = v
    return Cochain(dims, data)


def rho_cochain(dims: Tuple[int, int], rho: Sequence[Matrix]) -> Cochain:
    """Action g (x) V -> V; ``rho[i][b, a]`` is the e_b-coefficient of rho(e_i) e_a."""
    ng = dims[0]
    data = {}
    for i, m in enumerate(rho):
        for (b, a), v in m.entries.items():
            data[(i, ng + a), ng + b] = v
    return Cochain(dims, data)


def operator_cochain(dims: Tuple[int, int], T: Matrix) -> Cochain:
    """T: V -> g as a cochain of bidegree -1|1; ``T[i, a]`` is the e_i-coefficient of T(e_a)."""
    ng = dims[0]
    return Cochain(dims, {((ng + a,), i): v for (i, a), v in T.entries.items()})


def endomorphism_cochain(dims: Tuple[int, int], N: Optional[Matrix] = None, S: Optional[Matrix] = None) -> Cochain:
    """(N, S) in gl(g) (+) gl(V) as an arity-one cochain."""
    ng = dims[0]
    data = {}
    if N is not None:
        for (i, j), v in N.entries.items():
            data[(j,), i] = v
    if S is not None:
        for (a, b), v in S.entries.items():
            data[(ng + b,), ng + a] = v
    return Cochain(dims, data)
