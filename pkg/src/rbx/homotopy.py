"""Graded (L-infinity) machinery on finite-dimensional Z-graded spaces.

A :class:`GradedMap` stores its values on sorted basis tuples: for the
``sym`` flavor ``f(e_{i_1}, ..., e_{i_k})`` with weakly increasing indices
(odd indices never repeat), for ``symtensor`` the first ``k-1`` slots are
sorted and the last slot is free.  All brackets have intrinsic degree +1.

Classical (ungraded) structures enter through desuspension: every basis
vector is placed in degree -1, which turns alternating maps into graded
symmetric ones with identical value tables.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .foundation import ONE, ZERO, Matrix, Q, graded_sort, graded_sym_basis, koszul_sign, shuffles
from .structures import LieAlgebra, RelativeRBO, Report, Representation

SYM = "sym"
SYMTENSOR = "symtensor"
Vector = List[Fraction]
GKey = Tuple[Tuple[int, ...], int]


class GradedSpace:
    """Basis vectors with integer degrees."""

    def __init__(self, degrees: Sequence[int], labels: Optional[Sequence[str]] = None):
        self.degrees = [int(d) for d in degrees]
        self.labels = list(labels) if labels is not None else [f"e{i}" for i in range(len(self.degrees))]
        if len(self.labels) != len(self.degrees):
            raise ValueError("one label per basis vector")

    @classmethod
    def from_dims(cls, dims: Dict[int, int]) -> "GradedSpace":
        degs = []
        for d in sorted(dims):
            if dims[d] < 0:
                raise ValueError("negative dimension")
            degs += [d] * dims[d]
        return cls(degs)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = defaultdict(int)
        for d in self.degrees:
            out[d] += 1
        return dict(out)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def shift(self, k: int) -> "GradedSpace":
        return GradedSpace([d + k for d in self.degrees], self.labels)

    def direct_sum(self, other: "GradedSpace") -> "GradedSpace":
        return GradedSpace(self.degrees + other.degrees, self.labels + other.labels)

    def unit(self, i: int) -> Vector:
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedSpace) and self.degrees == other.degrees

    def __repr__(self) -> str:
        return f"GradedSpace({self.dims()})"


def _sym_ok(t: Sequence[int], degs: Sequence[int]) -> bool:
    return all(a < b or (a == b and not degs[a] & 1) for a, b in zip(t, t[1:]))


class GradedMap:
    """A finite sum of graded maps Sym^k(W) -> W (or Sym^{k-1}(W) (x) W -> W)."""

    __slots__ = ("space", "flavor", "data", "_index")

    def __init__(self, space: GradedSpace, data: Optional[Dict[GKey, object]] = None, flavor: str = SYM):
        if flavor not in (SYM, SYMTENSOR):
            raise ValueError(f"unknown flavor {flavor!r}")
        self.space = space
        self.flavor = flavor
        degs = space.degrees
        clean = {}
        for (ins, out), v in (data or {}).items():
            ins = tuple(ins)
            if not ins or not all(0 <= i < space.dim for i in ins) or not 0 <= out < space.dim:
                raise ValueError(f"bad key {(ins, out)}")
            sym = ins if flavor == SYM else ins[:-1]
            if not _sym_ok(sym, degs):
                raise ValueError(f"key {(ins, out)} is not a sorted graded-symmetric tuple")
            v = Q(v)
            if v:
                clean[ins, out] = v
        self.data = clean
        self._index = None

    @classmethod
    def from_values(cls, space: GradedSpace, items: Iterable[Tuple[Sequence[int], int, object]],
                    flavor: str = SYM) -> "GradedMap":
        """Build from values on arbitrary argument orders (signs by the Koszul rule)."""
        acc: Dict[GKey, Fraction] = defaultdict(Fraction)
        for ins, out, v in items:
            ins = list(ins)
            sym = ins if flavor == SYM else ins[:-1]
            t, s = graded_sort(sym, space.degrees)
            if t is None:
                continue
            key = t if flavor == SYM else t + (ins[-1],)
            acc[key, out] += s * Q(v)
        return cls(space, dict(acc), flavor)

    @classmethod
    def zero(cls, space: GradedSpace, flavor: str = SYM) -> "GradedMap":
        return cls(space, {}, flavor)

    def _idx(self):
        if self._index is None:
            idx = defaultdict(list)
            for (ins, out), v in self.data.items():
                idx[ins].append((out, v))
            self._index = idx
        return self._index

    def key_degree(self, key: GKey) -> int:
        ins, out = key
        d = self.space.degrees
        return d[out] - sum(d[i] for i in ins)

    def degree(self) -> Optional[int]:
        ds = {self.key_degree(k) for k in self.data}
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    def degrees(self) -> List[int]:
        return sorted({self.key_degree(k) for k in self.data})

    def degree_component(self, n: int) -> "GradedMap":
        return self.restrict(lambda k: self.key_degree(k) == n)

    def weights(self) -> List[int]:
        return sorted({len(k[0]) for k in self.data})

    def component(self, k: int) -> "GradedMap":
        return self.restrict(lambda key: len(key[0]) == k)

    def restrict(self, pred: Callable[[GKey], bool]) -> "GradedMap":
        return GradedMap(self.space, {k: v for k, v in self.data.items() if pred(k)}, self.flavor)

    def on_basis(self, idx: Sequence[int]) -> Dict[int, Fraction]:
        """Sparse value on basis vectors given in any order."""
        idx = list(idx)
        if not idx:
            return {}
        sym = idx if self.flavor == SYM else idx[:-1]
        t, s = graded_sort(sym, self.space.degrees)
        if t is None:
            return {}
        key = t if self.flavor == SYM else t + (idx[-1],)
        return {o: s * v for o, v in self._idx().get(key, ())}

    def evaluate(self, args: Sequence[Sequence]) -> Vector:
        """Multilinear evaluation on dense vectors of the space."""
        out = [ZERO] * self.space.dim
        supports = [[(i, Q(c)) for i, c in enumerate(a) if c] for a in args]
        if not args or any(not s for s in supports):
            return out
        for combo in itertools.product(*supports):
            coef = ONE
            for _, c in combo:
                coef *= c
            for o, v in self.on_basis([i for i, _ in combo]).items():
                out[o] += coef * v
        return out

    def _check(self, other: "GradedMap"):
        if self.space != other.space or self.flavor != other.flavor:
            raise ValueError("graded maps live on different spaces or flavors")

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, ZERO) + v
        return GradedMap(self.space, out, self.flavor)

    def __neg__(self) -> "GradedMap":
        return GradedMap(self.space, {k: -v for k, v in self.data.items()}, self.flavor)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + (-other)

    def scale(self, c) -> "GradedMap":
        c = Q(c)
        return GradedMap(self.space, {k: c * v for k, v in self.data.items()}, self.flavor)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.space == other.space
                and self.flavor == other.flavor and self.data == other.data)

    def is_zero(self) -> bool:
        return not self.data

    def __bool__(self) -> bool:
        return bool(self.data)

    def __repr__(self) -> str:
        return f"GradedMap({self.flavor}, weights={self.weights()}, degrees={self.degrees()}, {len(self.data)} terms)"


def _pairs_by_total(fw: Sequence[int], gw: Sequence[int], offset: int) -> Dict[int, List[Tuple[int, int]]]:
    out: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for i in fw:
        for j in gw:
            n = i + j - offset
            if n >= 1:
                out[n].append((i, j))
    return out


# ---------------------------------------------------------------------------
# graded Nijenhuis-Richardson bracket


def graded_circ(f: GradedMap, g: GradedMap) -> GradedMap:
    """(f_i o g_j)(v_1..v_{i+j-1}) = sum over (j, i-1)-shuffles of eps f_i(g_j(..), ..)."""
    if f.flavor != SYM or g.flavor != SYM:
        raise ValueError("the NR composition needs sym-flavored maps")
    f._check(g)
    degs = f.space.degrees
    out: Dict[GKey, Fraction] = defaultdict(Fraction)
    for n, pairs in _pairs_by_total(f.weights(), g.weights(), 1).items():
        for t in graded_sym_basis(n, degs):
            d = [degs[x] for x in t]
            for i, j in pairs:
                for sigma, _ in shuffles([j, i - 1]):
                    eps = koszul_sign(sigma, d)
                    inner = g.on_basis([t[p] for p in sigma[:j]])
                    if not inner:
                        continue
                    rest = [t[p] for p in sigma[j:]]
                    for o, c in inner.items():
                        for o2, c2 in f.on_basis([o] + rest).items():
                            out[t, o2] += eps * c * c2
    return GradedMap(f.space, dict(out), SYM)


def _split_degrees(f: GradedMap) -> List[Tuple[int, GradedMap]]:
    return [(d, f.degree_component(d)) for d in f.degrees()]


def graded_nr_bracket(f: GradedMap, g: GradedMap) -> GradedMap:
    """[f, g] = f o g - (-1)^{mn} g o f, extended bilinearly over degree components."""
    if f.flavor != SYM or g.flavor != SYM:
        raise ValueError("the NR bracket needs sym-flavored maps")
    out = GradedMap.zero(f.space)
    for m, fm in _split_degrees(f):
        for n, gn in _split_degrees(g):
            term = graded_circ(fm, gn)
            other = graded_circ(gn, fm)
            out = out + (term - other if (m * n) % 2 == 0 else term + other)
    return out


def nested_graded(f: GradedMap, args: Sequence[GradedMap]) -> GradedMap:
    """[...[[f, a_1], a_2], ..., a_k]."""
    out = f
    for a in args:
        if not out:
            return out
        out = graded_nr_bracket(out, a)
    return out


# ---------------------------------------------------------------------------
# graded Matsushima-Nijenhuis bracket and Phi


def mn_diamond(f: GradedMap, g: GradedMap) -> GradedMap:
    """The two-sum composition f_i <> g_j on Sym(V) (x) V -> V."""
    if f.flavor != SYMTENSOR or g.flavor != SYMTENSOR:
        raise ValueError("the MN composition needs symtensor-flavored maps")
    f._check(g)
    n_deg = g.degree()
    if n_deg is None:
        raise ValueError("the diamond composition needs a homogeneous right factor")
    degs = f.space.degrees
    dim = f.space.dim
    out: Dict[GKey, Fraction] = defaultdict(Fraction)
    for n, pairs in _pairs_by_total(f.weights(), g.weights(), 1).items():
        for s in graded_sym_basis(n - 1, degs):
            d = [degs[x] for x in s]
            for last in range(dim):
                key = s + (last,)
                for i, j in pairs:
                    if i >= 2:
                        for sigma, _ in shuffles([j - 1, 1, i - 2]):
                            eps = koszul_sign(sigma, d)
                            a = [s[p] for p in sigma]
                            inner = g.on_basis(a[:j - 1] + [a[j - 1]])
                            for o, c in inner.items():
                                for o2, c2 in f.on_basis([o] + a[j:] + [last]).items():
                                    out[key, o2] += eps * c * c2
                    for sigma, _ in shuffles([i - 1, j - 1]):
                        eps = koszul_sign(sigma, d)
                        a = [s[p] for p in sigma]
                        alpha = n_deg * sum(degs[x] for x in a[:i - 1])
                        sgn = eps if alpha % 2 == 0 else -eps
                        inner = g.on_basis(a[i - 1:] + [last])
                        for o, c in inner.items():
                            for o2, c2 in f.on_basis(a[:i - 1] + [o]).items():
                                out[key, o2] += sgn * c * c2
    return GradedMap(f.space, dict(out), SYMTENSOR)


def graded_mn_bracket(f: GradedMap, g: GradedMap) -> GradedMap:
    """[f, g]_MN = f <> g - (-1)^{mn} g <> f."""
    if f.flavor != SYMTENSOR or g.flavor != SYMTENSOR:
        raise ValueError("the MN bracket needs symtensor-flavored maps")
    out = GradedMap.zero(f.space, SYMTENSOR)
    for m, fm in _split_degrees(f):
        for n, gn in _split_degrees(g):
            term = mn_diamond(fm, gn)
            other = mn_diamond(gn, fm)
            out = out + (term - other if (m * n) % 2 == 0 else term + other)
    return out


def phi(f: GradedMap) -> GradedMap:
    """Phi(f_k)(v_1..v_k) = sum_i (-1)^{v_i(v_{i+1}+..+v_k)} f_k(v_1..^i..v_k, v_i)."""
    if f.flavor != SYMTENSOR:
        raise ValueError("Phi takes a symtensor-flavored map")
    degs = f.space.degrees
    out: Dict[GKey, Fraction] = defaultdict(Fraction)
    for k in f.weights():
        for t in graded_sym_basis(k, degs):
            for i in range(k):
                e = degs[t[i]] * sum(degs[x] for x in t[i + 1:])
                s = 1 if e % 2 == 0 else -1
                for o, v in f.on_basis(list(t[:i] + t[i + 1:]) + [t[i]]).items():
                    out[t, o] += s * v
    return GradedMap(f.space, dict(out), SYM)


# ---------------------------------------------------------------------------
# L-infinity algebras and representations


class LinftyAlgebra:
    """Brackets l_k collected in one sym-flavored map of degree +1."""

    def __init__(self, space: GradedSpace, brackets: Optional[GradedMap] = None, name: Optional[str] = None):
        brackets = brackets if brackets is not None else GradedMap.zero(space)
        if brackets.flavor != SYM or brackets.space != space:
            raise ValueError("brackets must be sym-flavored maps on the space")
        if brackets and brackets.degree() != 1:
            raise ValueError("L-infinity brackets must have degree +1")
        self.space = space
        self.l = brackets
        self.name = name

    @property
    def arity_bound(self) -> int:
        w = self.l.weights()
        return max(w) if w else 0

    def bracket(self, args: Sequence[Sequence]) -> Vector:
        return self.l.evaluate(args)

    def __repr__(self) -> str:
        return f"LinftyAlgebra({self.space!r}, arity_bound={self.arity_bound}, name={self.name!r})"


def _jacobi_at(l: GradedMap, t: Sequence[int]) -> Vector:
    """sum_i sum_{(i,n-i)-shuffles} eps l(l(x_sigma..), x_sigma..) on basis vectors, by dense evaluation."""
    sp = l.space
    degs = sp.degrees
    n = len(t)
    d = [degs[x] for x in t]
    out = [ZERO] * sp.dim
    for i in range(1, n + 1):
        for sigma, _ in shuffles([i, n - i]):
            eps = koszul_sign(sigma, d)
            inner = l.evaluate([sp.unit(t[p]) for p in sigma[:i]])
            if not any(inner):
                continue
            val = l.evaluate([inner] + [sp.unit(t[p]) for p in sigma[i:]])
            out = [a + eps * b for a, b in zip(out, val)]
    return out


def verify_linfty(alg: LinftyAlgebra, max_arity: Optional[int] = None) -> Report:
    """Generalized Jacobi on basis tuples up to ``max_arity`` (default 2 * arity bound), against [l, l]_NR = 0."""
    b = alg.arity_bound
    top = max_arity if max_arity is not None else 2 * b
    witness = None
    per_n = {}
    for n in range(1, top + 1):
        ok = True
        for t in graded_sym_basis(n, alg.space.degrees):
            if any(_jacobi_at(alg.l, t)):
                ok = False
                witness = witness or t
                break
        per_n[n] = ok
    ll = graded_nr_bracket(alg.l, alg.l)
    nr_ok = ll.is_zero()
    direct = all(per_n.values())
    if top >= 2 * b - 1 and nr_ok != direct:
        raise AssertionError("generalized Jacobi check disagrees with [l, l]_NR = 0")
    if top < 2 * b - 1:
        nr_ok = all(ll.component(n).is_zero() for n in range(1, top + 1))
        if nr_ok != direct:
            raise AssertionError("generalized Jacobi check disagrees with [l, l]_NR = 0")
    return Report(direct, witness, {"arities": per_n, "nr_bracket_zero": nr_ok})


class LinftyRep:
    """rho_k: Sym^{k-1}(g) (x) V -> V of degree +1, stored on W = g (+) V as the V-valued part of the semidirect product."""

    def __init__(self, alg: LinftyAlgebra, vspace: GradedSpace, rho: Dict[Tuple[Tuple[int, ...], int, int], object]):
        self.alg = alg
        self.vspace = vspace
        self.W = alg.space.direct_sum(vspace)
        ng = alg.space.dim
        items = []
        for (gs, v, out), c in rho.items():
            if any(not 0 <= i < ng for i in gs) or not 0 <= v < vspace.dim or not 0 <= out < vspace.dim:
                raise ValueError(f"bad action key {(gs, v, out)}")
            items.append((tuple(gs) + (ng + v,), ng + out, c))
        self.rho = GradedMap.from_values(self.W, items)
        if self.rho and self.rho.degree() != 1:
            raise ValueError("action maps must have degree +1")

    @property
    def ng(self) -> int:
        return self.alg.space.dim

    @property
    def nv(self) -> int:
        return self.vspace.dim

    def lifted_brackets(self) -> GradedMap:
        return GradedMap(self.W, {(ins, o): v for (ins, o), v in self.alg.l.data.items()})

    def delta(self) -> GradedMap:
        """l + rho on g (+) V."""
        return self.lifted_brackets() + self.rho

    def semidirect(self) -> LinftyAlgebra:
        return LinftyAlgebra(self.W, self.delta(), name="semidirect")

    def act(self, xs: Sequence[Sequence], v: Sequence) -> Vector:
        """rho_{k+1}(x_1, .., x_k, v) for g-vectors x_i and a V-vector v (local coordinates)."""
        ng = self.ng
        args = [list(x) + [ZERO] * self.nv for x in xs] + [[ZERO] * ng + list(v)]
        return self.rho.evaluate(args)[ng:]

    @property
    def arity_bound(self) -> int:
        w = self.rho.weights()
        return max(w) if w else 0


def semidirect(rep: LinftyRep) -> LinftyAlgebra:
    return rep.semidirect()


def _rep_identity_at(rep: LinftyRep, xs: Sequence[int], v: int) -> Vector:
    """Left side of the representation identity on basis vectors x_1..x_{n-1} (in g) and v."""
    alg = rep.alg
    sp = alg.space
    degs = sp.degrees
    n = len(xs) + 1
    d = [degs[x] for x in xs]
    X = [sp.unit(x) for x in xs]
    V = rep.vspace.unit(v)
    out = [ZERO] * rep.nv
    for i in range(1, n):
        for sigma, _ in shuffles([i, n - 1 - i]):
            eps = koszul_sign(sigma, d)
            inner = alg.l.evaluate([X[p] for p in sigma[:i]])
            if any(inner):
                val = rep.act([inner] + [X[p] for p in sigma[i:]], V)
                out = [a + eps * b for a, b in zip(out, val)]
    for i in range(1, n + 1):
        for sigma, _ in shuffles([n - i, i - 1]):
            eps = koszul_sign(sigma, d)
            if sum(d[p] for p in sigma[:n - i]) % 2:
                eps = -eps
            inner = rep.act([X[p] for p in sigma[n - i:]], V)
            if any(inner):
                val = rep.act([X[p] for p in sigma[:n - i]], inner)
                out = [a + eps * b for a, b in zip(out, val)]
    return out


def verify_linfty_rep(rep: LinftyRep) -> Report:
    """Representation identity evaluated directly, against [l + rho, l + rho]_NR = 0."""
    alg_rep = verify_linfty(rep.alg)
    b = max(rep.arity_bound, rep.alg.arity_bound)
    witness = None
    for n in range(1, 2 * b + 1):
        for xs in graded_sym_basis(n - 1, rep.alg.space.degrees) if n > 1 else [()]:
            for v in range(rep.nv):
                if any(_rep_identity_at(rep, xs, v)):
                    witness = witness or (xs, v)
    direct = alg_rep.ok and witness is None
    D = rep.delta()
    nr_ok = graded_nr_bracket(D, D).is_zero()
    if nr_ok != direct:
        raise AssertionError("direct representation identity disagrees with the semidirect MC criterion")
    return Report(direct, witness or alg_rep.witness, {"algebra": alg_rep.ok, "action": witness is None,
                                                       "semidirect_mc": nr_ok})


# ---------------------------------------------------------------------------
# V-data and derived brackets


def h_projection(W: GradedSpace, ng: int) -> Callable[[GradedMap], GradedMap]:
    """P onto Hom(Sym(V), g) inside maps on W = g (+) V."""
    def P(f: GradedMap) -> GradedMap:
        return f.restrict(lambda k: k[1] < ng and all(i >= ng for i in k[0]))
    return P


@dataclass
class VData:
    """(L, h, P, Delta) with L the graded NR algebra on ``space``."""

    space: GradedSpace
    P: Callable[[GradedMap], GradedMap]
    Delta: GradedMap

    def check(self, samples: Sequence[GradedMap] = ()) -> Report:
        dd = graded_nr_bracket(self.Delta, self.Delta).is_zero()
        p_delta = self.P(self.Delta).is_zero()
        deg = self.Delta.degree() == 1 or self.Delta.is_zero()
        idem = all(self.P(self.P(s)) == self.P(s) for s in samples)
        kernel = True
        ks = [s - self.P(s) for s in samples]
        for a in ks:
            for b in ks:
                br = graded_nr_bracket(a, b)
                if not self.P(br).is_zero():
                    kernel = False
        checks = {"delta_squared_zero": dd, "delta_in_kernel": p_delta, "delta_degree_one": deg,
                  "idempotent": idem, "kernel_closed": kernel}
        return Report(all(checks.values()), None, checks)

    def in_h(self, a: GradedMap) -> bool:
        return self.P(a) == a


def vdata_from_rep(rep: LinftyRep) -> VData:
    return VData(rep.W, h_projection(rep.W, rep.ng), rep.delta())


def derived_bracket(vd: VData, args: Sequence[GradedMap]) -> GradedMap:
    """l_k(a_1..a_k) = P[...[[Delta, a_1], a_2], ..., a_k]."""
    for a in args:
        if not vd.in_h(a):
            raise ValueError("derived brackets take arguments in h")
    return vd.P(nested_graded(vd.Delta, args))


class BiggerLinfty:
    """Brackets on s^{-1}L' (+) h; elements are pairs ``(x, a)`` standing for s^{-1}x + a."""

    def __init__(self, vd: VData, in_lprime: Optional[Callable[[GKey], bool]] = None):
        self.vd = vd
        self.in_lprime = in_lprime

    def closure_check(self, basis: Iterable[GradedMap]) -> Report:
        """[Delta, L'] inside L' on the given spanning maps."""
        if self.in_lprime is None:
            return Report(True)
        for x in basis:
            for k in graded_nr_bracket(self.vd.Delta, x).data:
                if not self.in_lprime(k):
                    return Report(False, k, {"closed": False})
        return Report(True, None, {"closed": True})

    def zero(self):
        z = GradedMap.zero(self.vd.space)
        return (z, z)

    @staticmethod
    def atoms(x) -> List[Tuple[str, GradedMap, int]]:
        f, a = x
        out = [("s", f.degree_component(d), d - 1) for d in f.degrees()]
        out += [("h", a.degree_component(d), d) for d in a.degrees()]
        return out

    def _on_atoms(self, ats):
        vd = self.vd
        z = GradedMap.zero(vd.space)
        k = len(ats)
        s_pos = [i for i, t in enumerate(ats) if t[0] == "s"]
        if k == 1:
            kind, m, _ = ats[0]
            if kind == "s":
                return (-graded_nr_bracket(vd.Delta, m), vd.P(m))
            return (z, vd.P(graded_nr_bracket(vd.Delta, m)))
        if len(s_pos) == 2 and k == 2:
            x, y = ats[0][1], ats[1][1]
            val = graded_nr_bracket(x, y)
            return (val if (ats[0][2] + 1) % 2 == 0 else -val, z)
        if len(s_pos) == 1:
            i = s_pos[0]
            order = [i] + [j for j in range(k) if j != i]
            sign = koszul_sign(order, [t[2] for t in ats])
            val = vd.P(nested_graded(ats[i][1], [ats[j][1] for j in order[1:]]))
            return (z, val if sign > 0 else -val)
        if not s_pos:
            return (z, vd.P(nested_graded(vd.Delta, [t[1] for t in ats])))
        return (z, z)

    def bracket(self, xs: Sequence) -> Tuple[GradedMap, GradedMap]:
        out = self.zero()
        for ats in itertools.product(*[self.atoms(x) for x in xs]):
            f, a = self._on_atoms(list(ats))
            out = (out[0] + f, out[1] + a)
        return out

    def mc_sum(self, alpha, max_k: int) -> Tuple[GradedMap, GradedMap]:
        out = self.zero()
        for k in range(1, max_k + 1):
            f, a = self.bracket([alpha] * k)
            c = Fraction(1, math.factorial(k))
            out = (out[0] + f.scale(c), out[1] + a.scale(c))
        return out


# ---------------------------------------------------------------------------
# homotopy relative Rota-Baxter operators


def _compositions(total: int, parts: int, cap: int) -> Iterable[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, min(cap, total - parts + 1) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


class HomotopyRBO:
    """T = sum_k T_k with T_k: Sym^k(V) -> g of degree 0, stored on W = g (+) V."""

    def __init__(self, rep: LinftyRep, T: Dict[Tuple[Tuple[int, ...], int], object]):
        self.rep = rep
        ng = rep.ng
        items = []
        for (vs, out), c in T.items():
            if any(not 0 <= v < rep.nv for v in vs) or not 0 <= out < ng:
                raise ValueError(f"bad operator key {(vs, out)}")
            items.append((tuple(ng + v for v in vs), out, c))
        self.T = GradedMap.from_values(rep.W, items)
        if self.T and self.T.degree() != 0:
            raise ValueError("a homotopy operator has degree 0")

    @classmethod
    def from_matrix(cls, rep: LinftyRep, T1: Matrix) -> "HomotopyRBO":
        return cls(rep, {((a,), i): v for (i, a), v in T1.entries.items()})

    @property
    def weight_bound(self) -> int:
        w = self.T.weights()
        return max(w) if w else 0

    @property
    def filtration_level(self) -> int:
        """Smallest weight present (the filtration index of T)."""
        w = self.T.weights()
        return min(w) if w else 0

    def is_strict(self) -> bool:
        return all(k <= 1 for k in self.T.weights())

    def certified_bound(self) -> int:
        """Beyond this weight both sides of the operator identity vanish identically."""
        t = max(self.weight_bound, 1)
        lb = max(self.rep.alg.arity_bound, 1)
        rb = max(self.rep.arity_bound, 1)
        return max(lb * t, t + (rb - 1) * t, 1)

    def apply(self, vs: Sequence[Sequence]) -> Vector:
        """T_k(v_1..v_k) for V-vectors in local coordinates, returned in g."""
        ng = self.rep.ng
        return self.T.evaluate([[ZERO] * ng + list(v) for v in vs])[:ng]


def _operator_identity_at(op: HomotopyRBO, t: Sequence[int]) -> Vector:
    """LHS - RHS of the operator identity on V-basis vectors t (local indices), t = 0 term included."""
    rep, alg = op.rep, op.rep.alg
    ng = rep.ng
    degs = rep.vspace.degrees
    p = len(t)
    d = [degs[x] for x in t]
    V = [rep.vspace.unit(x) for x in t]
    cap = max(op.weight_bound, 1)
    memo: Dict[Tuple[int, ...], Vector] = {}

    def T_on(idx: Tuple[int, ...]) -> Vector:
        if idx not in memo:
            memo[idx] = op.apply([V[q] for q in idx])
        return memo[idx]

    lhs = [ZERO] * ng
    for tt in range(0, p):
        for m in range(0, tt + 1):
            for ks in _compositions(tt, m, cap):
                if p - tt > cap:
                    continue
                c = Fraction(1, math.factorial(m))
                for sigma, _ in shuffles(list(ks) + [1, p - 1 - tt]):
                    eps = koszul_sign(sigma, d)
                    pos = 0
                    Ts = []
                    for k in ks:
                        Ts.append(T_on(tuple(sigma[pos:pos + k])))
                        pos += k
                    if any(not any(x) for x in Ts):
                        continue
                    inner = rep.act(Ts, V[sigma[pos]])
                    if not any(inner):
                        continue
                    val = op.apply([inner] + [V[sigma[q]] for q in range(pos + 1, p)])
                    lhs = [a + eps * c * b for a, b in zip(lhs, val)]
    rhs = [ZERO] * ng
    for n in range(1, p + 1):
        c = Fraction(1, math.factorial(n))
        for ks in _compositions(p, n, cap):
            for sigma, _ in shuffles(list(ks)):
                eps = koszul_sign(sigma, d)
                pos = 0
                Ts = []
                for k in ks:
                    Ts.append(T_on(tuple(sigma[pos:pos + k])))
                    pos += k
                if any(not any(x) for x in Ts):
                    continue
                val = alg.l.evaluate(Ts)
                rhs = [a + eps * c * b for a, b in zip(rhs, val)]
    return [a - b for a, b in zip(lhs, rhs)]


def exp_twist(D: GradedMap, T: GradedMap, max_terms: int = 64) -> GradedMap:
    """e^{[., T]} D = sum_n (1/n!) [...[D, T]..., T], stopping at the first vanishing term."""
    out = D
    term = D
    for n in range(1, max_terms + 1):
        term = graded_nr_bracket(term, T)
        if term.is_zero():
            return out
        out = out + term.scale(Fraction(1, math.factorial(n)))
    raise AssertionError("[., T] failed to be nilpotent within the bound")


def bracket_power(X: GradedMap, T: GradedMap, n: int) -> GradedMap:
    out = X
    for _ in range(n):
        out = graded_nr_bracket(out, T)
    return out


def mc_series(op: HomotopyRBO) -> GradedMap:
    """P sum_n (1/n!) [...[Delta, T]..., T]."""
    vd = vdata_from_rep(op.rep)
    return vd.P(exp_twist(vd.Delta, op.T) - vd.Delta)


def verify_homotopy_rbo(op: HomotopyRBO, p_max: Optional[int] = None) -> Report:
    """The operator identity for p <= p_max by shuffle sums, against the MC equation in h."""
    bound = op.certified_bound()
    if p_max is None:
        p_max = bound
    if p_max > bound:
        raise ValueError(f"p_max={p_max} exceeds the certified weight bound {bound}")
    degs = op.rep.vspace.degrees
    mc = mc_series(op)
    direct, via_mc = {}, {}
    witness = None
    for p in range(1, p_max + 1):
        ok = True
        for t in graded_sym_basis(p, degs):
            if any(_operator_identity_at(op, t)):
                ok = False
                witness = witness or t
                break
        direct[p] = ok
        via_mc[p] = mc.component(p).is_zero()
        if direct[p] != via_mc[p]:
            raise AssertionError(f"operator identity and MC equation disagree at weight {p}")
    return Report(all(direct.values()), witness, {"direct": direct, "mc": via_mc})


def twist_by_T(op: HomotopyRBO) -> LinftyAlgebra:
    """The L-infinity structure on V: sum over compositions of rho_{m+1}(T.., .., v)."""
    rep = op.rep
    ng, nv = rep.ng, rep.nv
    degs = rep.vspace.degrees
    cap = max(op.weight_bound, 1)
    top = max(rep.arity_bound - 1, 0) * cap + 1
    data: Dict[GKey, Fraction] = defaultdict(Fraction)
    for n in range(1, top + 1):
        tt = n - 1
        for t in graded_sym_basis(n, degs):
            d = [degs[x] for x in t]
            V = [rep.vspace.unit(x) for x in t]
            acc = [ZERO] * nv
            for m in range(0, tt + 1):
                c = Fraction(1, math.factorial(m))
                for ks in _compositions(tt, m, cap):
                    for sigma, _ in shuffles(list(ks) + [1]):
                        eps = koszul_sign(sigma, d)
                        pos = 0
                        Ts = []
                        for k in ks:
                            Ts.append(op.apply([V[sigma[q]] for q in range(pos, pos + k)]))
                            pos += k
                        val = rep.act(Ts, V[sigma[pos]])
                        acc = [a + eps * c * b for a, b in zip(acc, val)]
            for o, v in enumerate(acc):
                if v:
                    data[t, o] += v
    direct = GradedMap(rep.vspace, dict(data))
    twisted = exp_twist(rep.delta(), op.T)
    on_v = GradedMap(rep.vspace, {(tuple(i - ng for i in ins), o - ng): v for (ins, o), v in twisted.data.items()
                                  if o >= ng and all(i >= ng for i in ins)})
    if on_v != direct:
        raise AssertionError("twisted brackets on V disagree with the exponential of [., T]")
    return LinftyAlgebra(rep.vspace, direct, name="twisted")


def verify_linfty_morphism(F: Callable[[Sequence[Sequence]], Vector], weight_bound: int,
                           src: LinftyAlgebra, tgt: LinftyAlgebra, p_max: int) -> Report:
    """sum_j F(l_j(..), ..) = sum_n (1/n!) l'_n(F(..), .., F(..)) for a degree-0 F = sum F_k."""
    degs = src.space.degrees
    cap = max(weight_bound, 1)
    witness = None
    for p in range(1, p_max + 1):
        for t in graded_sym_basis(p, degs):
            d = [degs[x] for x in t]
            V = [src.space.unit(x) for x in t]
            lhs = [ZERO] * tgt.space.dim
            for j in range(1, p + 1):
                if p - j + 1 > cap:
                    continue
                for sigma, _ in shuffles([j, p - j]):
                    eps = koszul_sign(sigma, d)
                    inner = src.l.evaluate([V[q] for q in sigma[:j]])
                    if any(inner):
                        val = F([inner] + [V[q] for q in sigma[j:]])
                        lhs = [a + eps * b for a, b in zip(lhs, val)]
            rhs = [ZERO] * tgt.space.dim
            for n in range(1, p + 1):
                c = Fraction(1, math.factorial(n))
                for ks in _compositions(p, n, cap):
                    for sigma, _ in shuffles(list(ks)):
                        eps = koszul_sign(sigma, d)
                        pos, Fs = 0, []
                        for k in ks:
                            Fs.append(F([V[sigma[q]] for q in range(pos, pos + k)]))
                            pos += k
                        val = tgt.l.evaluate(Fs)
                        rhs = [a + eps * c * b for a, b in zip(rhs, val)]
            if lhs != rhs:
                witness = witness or t
    return Report(witness is None, witness)


def twist_report(op: HomotopyRBO) -> Report:
    """Twisted structure: L-infinity, and T a morphism onto g."""
    tw = twist_by_T(op)
    lin = verify_linfty(tw)
    bound = op.certified_bound()
    mor = verify_linfty_morphism(op.apply, op.weight_bound, tw, op.rep.alg, bound)
    return Report(lin.ok and mor.ok, lin.witness or mor.witness, {"linfty": lin.ok, "morphism": mor.ok})


# ---------------------------------------------------------------------------
# pre-Lie infinity algebras


class PreLieInfty:
    """Products r_k: Sym^{k-1}(V) (x) V -> V of degree +1 in one symtensor map."""

    def __init__(self, space: GradedSpace, r: Optional[GradedMap] = None, name: Optional[str] = None):
        r = r if r is not None else GradedMap.zero(space, SYMTENSOR)
        if r.flavor != SYMTENSOR or r.space != space:
            raise ValueError("pre-Lie products must be symtensor-flavored maps on the space")
        if r and r.degree() != 1:
            raise ValueError("pre-Lie products must have degree +1")
        self.space = space
        self.r = r
        self.name = name


def verify_prelie(p: PreLieInfty) -> Report:
    """MC equation [r, r]_MN = 0."""
    rr = graded_mn_bracket(p.r, p.r)
    w = min(rr.data)[0] if rr.data else None
    return Report(rr.is_zero(), w, {"mn_mc": rr.is_zero()})


def subadjacent(p: PreLieInfty, check: bool = True) -> LinftyAlgebra:
    if check and not verify_prelie(p):
        raise ValueError("input is not a pre-Lie infinity algebra")
    return LinftyAlgebra(p.space, phi(p.r), name="subadjacent")


def left_mult_rep(p: PreLieInfty, check: bool = True) -> LinftyRep:
    """L_k = r_k, acting on a copy of the space."""
    alg = subadjacent(p, check)
    rho = {}
    for (ins, out), v in p.r.data.items():
        rho[ins[:-1], ins[-1], out] = v
    return LinftyRep(alg, p.space, rho)


def identity_is_strict_rbo(p: PreLieInfty) -> Report:
    rep = left_mult_rep(p)
    op = HomotopyRBO.from_matrix(rep, Matrix.identity(p.space.dim))
    rep_ok = verify_linfty_rep(rep)
    rb = verify_homotopy_rbo(op)
    return Report(rep_ok.ok and rb.ok, rep_ok.witness or rb.witness,
                  {"representation": rep_ok.ok, "operator": rb.ok})


def strict_rbo_to_prelie(op: HomotopyRBO, check: bool = True) -> PreLieInfty:
    """r_k(v_1..v_k) = rho_k(Tv_1, .., Tv_{k-1}, v_k)."""
    if not op.is_strict():
        raise ValueError("only strict operators (T_k = 0 for k >= 2) induce pre-Lie products this way")
    if check and not verify_homotopy_rbo(op):
        raise ValueError("operator identity fails")
    rep = op.rep
    degs = rep.vspace.degrees
    data: Dict[GKey, Fraction] = {}
    for k in range(1, rep.arity_bound + 1):
        for s in graded_sym_basis(k - 1, degs):
            Ts = [op.apply([rep.vspace.unit(x)]) for x in s]
            for last in range(rep.nv):
                val = rep.act(Ts, rep.vspace.unit(last))
                for o, v in enumerate(val):
                    if v:
                        data[s + (last,), o] = v
    return PreLieInfty(rep.vspace, GradedMap(rep.vspace, data, SYMTENSOR))


def _inverse(M: Matrix) -> Matrix:
    from .foundation import solve
    n = M.rows
    if M.cols != n:
        raise ValueError("operator is not square")
    cols = []
    for j in range(n):
        e = [ZERO] * n
        e[j] = ONE
        x = solve(M, e)
        if x is None:
            raise ValueError("operator is not invertible")
        cols.append(x)
    return Matrix.from_columns(n, cols)


def invertible_correspondence(op: HomotopyRBO) -> PreLieInfty:
    """o_k(x_1..x_k) = T rho_k(x_1..x_{k-1}, T^{-1} x_k); asserts Phi(o) = l."""
    if not op.is_strict():
        raise ValueError("the correspondence needs a strict operator")
    rep = op.rep
    ng = rep.ng
    T1 = Matrix(ng, rep.nv, {(o, ins[0] - ng): v for (ins, o), v in op.T.data.items()})
    Tinv = _inverse(T1)
    if rep.alg.space.degrees != [rep.vspace.degrees[a] for a in range(rep.nv)]:
        raise ValueError("T must preserve degrees between g and V")
    degs = rep.alg.space.degrees
    data: Dict[GKey, Fraction] = {}
    for k in range(1, rep.arity_bound + 1):
        for s in graded_sym_basis(k - 1, degs):
            xs = [rep.alg.space.unit(x) for x in s]
            for last in range(ng):
                v = Tinv @ rep.alg.space.unit(last)
                val = T1 @ rep.act(xs, v)
                for o, c in enumerate(val):
                    if c:
                        data[s + (last,), o] = c
    pre = PreLieInfty(rep.alg.space, GradedMap(rep.alg.space, data, SYMTENSOR))
    if phi(pre.r) != rep.alg.l:
        raise AssertionError("transported pre-Lie products do not symmetrize to the brackets")
    return pre


# ---------------------------------------------------------------------------
# classical dictionary (desuspension)


def desuspended_space(n: int, labels: Optional[Sequence[str]] = None) -> GradedSpace:
    return GradedSpace([-1] * n, labels)


def desuspend_map(c, space: GradedSpace) -> GradedMap:
    """Alternating cochain table -> graded map on the desuspended space (identical values)."""
    return GradedMap(space, dict(c.data))


def desuspend_lie(alg: LieAlgebra) -> LinftyAlgebra:
    sp = desuspended_space(alg.dim)
    return LinftyAlgebra(sp, desuspend_map(alg.mu(), sp), name=alg.name)


def desuspend_rep(rep: Representation) -> LinftyRep:
    galg = desuspend_lie(rep.base)
    rho = {}
    for i, m in enumerate(rep.rho):
        for (b, a), v in m.entries.items():
            rho[(i,), a, b] = v
    return LinftyRep(galg, desuspended_space(rep.dim_v), rho)


def desuspend_rbo(op: RelativeRBO) -> HomotopyRBO:
    return HomotopyRBO.from_matrix(desuspend_rep(op.rep), op.T)


def desuspend_prelie(table: Sequence[Sequence[Sequence]]) -> PreLieInfty:
    """A classical pre-Lie product table[a][b] = e_a |> e_b as a binary product in degree -1."""
    n = len(table)
    sp = desuspended_space(n)
    data = {}
    for a in range(n):
        for b in range(n):
            for o, v in enumerate(table[a][b]):
                if v:
                    data[(a, b), o] = v
    return PreLieInfty(sp, GradedMap(sp, data, SYMTENSOR))


class DGLieAlgebra:
    """A finite-dimensional dg Lie algebra given by brackets on basis pairs and a differential."""

    def __init__(self, space: GradedSpace, brackets: Dict[Tuple[int, int], Dict[int, object]],
                 d: Optional[Dict[int, Dict[int, object]]] = None):
        self.space = space
        degs = space.degrees
        full: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for (i, j), vals in brackets.items():
            vec = {k: Q(v) for k, v in vals.items() if Q(v)}
            for k in vec:
                if degs[k] != degs[i] + degs[j]:
                    raise ValueError(f"bracket [{i},{j}] does not preserve degree")
            s = -1 if (degs[i] * degs[j]) % 2 == 0 else 1
            rev = {k: s * v for k, v in vec.items()}
            for key, val in (((i, j), vec), ((j, i), rev)):
                if key in full and full[key] != val:
                    raise ValueError(f"inconsistent graded antisymmetry at {key}")
                full[key] = val
        self.brackets = full
        self.d = {i: {k: Q(v) for k, v in vals.items() if Q(v)} for i, vals in (d or {}).items()}
        for i, vals in self.d.items():
            for k in vals:
                if degs[k] != degs[i] + 1:
                    raise ValueError("the differential has degree +1")


def quillen(dg: DGLieAlgebra) -> LinftyAlgebra:
    """s^{-1}g with l_1 = d and l_2(s^{-1}x, s^{-1}y) = (-1)^{|x|} s^{-1}[x, y]."""
    sp = dg.space.shift(-1)
    items = []
    for i, vals in dg.d.items():
        for k, v in vals.items():
            items.append(((i,), k, v))
    data: Dict[GKey, Fraction] = {}
    for (i, j), vals in dg.brackets.items():
        t, s = graded_sort([i, j], sp.degrees)
        if t is None or (i, j) != t:
            continue
        sign = -1 if dg.space.degrees[i] % 2 else 1
        for k, v in vals.items():
            data[t, k] = sign * v
    l2 = GradedMap(sp, data)
    return LinftyAlgebra(sp, GradedMap.from_values(sp, items) + l2, name="quillen")


def graded_mc_diagonal(rep: Representation, T: Matrix) -> Dict[str, bool]:
    """MC test of (s^{-1}pi, T) in the desuspended derived-bracket algebra with Delta = 0."""
    srep = desuspend_rep(rep)
    W = srep.W
    ng = rep.base.dim
    vd = VData(W, h_projection(W, ng), GradedMap.zero(W))
    big = BiggerLinfty(vd)
    pi = srep.delta()
    Tm = HomotopyRBO.from_matrix(srep, T).T
    f, a = big.mc_sum((pi, Tm), ng + 3)
    return {"lierep": f.is_zero(), "operator": a.is_zero()}


def jacobi_defect(bracket: Callable[[Sequence], object], xs: Sequence, degrees: Sequence[int],
                  add: Callable, scale: Callable, zero) -> object:
    """sum_i sum_{(i,n-i)-shuffles} eps l(l(x_sigma..), x_sigma..) for homogeneous inputs."""
    n = len(xs)
    out = zero
    for i in range(1, n + 1):
        for sigma, _ in shuffles([i, n - i]):
            eps = koszul_sign(sigma, degrees)
            inner = bracket([xs[p] for p in sigma[:i]])
            out = add(out, scale(bracket([inner] + [xs[p] for p in sigma[i:]]), eps))
    return out


def solve_prelie_family(space: GradedSpace, generators: Sequence[GradedMap], grid: Sequence[int] = (-1, 0, 1),
                        require: Optional[Callable[[Sequence[int]], bool]] = None) -> List[Tuple[int, ...]]:
    """Exact MC solutions sum c_i B_i of [r, r]_MN = 0 with coefficients from ``grid``.

    The quadratic form is assembled once from the pairwise brackets.
    """
    n = len(generators)
    pair: Dict[Tuple[int, int], GradedMap] = {}
    for i in range(n):
        for j in range(i, n):
            b = graded_mn_bracket(generators[i], generators[j])
            pair[i, j] = b if i == j else b.scale(2)
    sols = []
    for coeffs in itertools.product(grid, repeat=n):
        if require and not require(coeffs):
            continue
        tot = GradedMap.zero(space, SYMTENSOR)
        for (i, j), b in pair.items():
            c = coeffs[i] * coeffs[j]
            if c and b:
                tot = tot + b.scale(c)
        if tot.is_zero():
            sols.append(coeffs)
    return sols


def derived_brackets(vd: VData, k: int, args: Sequence[GradedMap]) -> GradedMap:
    if len(args) != k:
        raise ValueError(f"expected {k} arguments, got {len(args)}")
    return derived_bracket(vd, args)


def derived_jacobi_defect(vd: VData, xs: Sequence[GradedMap]) -> GradedMap:
    """Generalized Jacobi for the derived brackets on homogeneous elements of h."""
    degs = [x.degree() for x in xs]
    if any(d is None for d in degs):
        raise ValueError("samples must be homogeneous")
    z = GradedMap.zero(vd.space)
    return jacobi_defect(lambda a: derived_bracket(vd, a), xs, degs,
                         lambda a, b: a + b, lambda a, c: a.scale(c), z)


def bigger_linfty(vd: VData, in_lprime: Optional[Callable[[GKey], bool]] = None,
                  basis: Iterable[GradedMap] = ()) -> BiggerLinfty:
    """The L-infinity algebra on s^{-1}L' (+) h; raises on a closure violation."""
    big = BiggerLinfty(vd, in_lprime)
    rep = big.closure_check(basis)
    if not rep:
        raise ValueError(f"[Delta, L'] leaves L' at {rep.witness}")
    return big


def adjoint_rep(alg: LinftyAlgebra) -> LinftyRep:
    """rho_k = l_k with V a copy of the space."""
    degs = alg.space.degrees
    rho = {}
    for k in range(1, alg.arity_bound + 1):
        for gs in graded_sym_basis(k - 1, degs):
            for v in range(alg.space.dim):
                for o, c in alg.l.on_basis(list(gs) + [v]).items():
                    rho[gs, v, o] = c
    return LinftyRep(alg, alg.space, rho)
