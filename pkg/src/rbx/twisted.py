"""Derived-bracket L-infinity algebra on s^{-1}L' (+) h and its twisting.

An element is a pair ``(f, theta)`` of cochains standing for
``s^{-1} f + theta``: ``f`` lies in ``L' = C^{*|0}`` and ``theta`` in
``h = (+) Hom(wedge^k V, g)``.  Degrees: ``s^{-1} f`` has degree
``arity(f) - 2``, ``theta`` has degree ``arity(theta) - 1``.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .cohomology import hom_keys, rep_space
from .foundation import koszul_sign, shuffles
from .nrcore import Cochain, nested_bracket, nr_bracket
from .structures import Report, RelativeRBO

Elem = Tuple[Cochain, Cochain]
Atom = Tuple[str, Cochain]


def zero_elem(dims) -> Elem:
    return (Cochain(dims), Cochain(dims))


def add(a: Elem, b: Elem) -> Elem:
    return (a[0] + b[0], a[1] + b[1])


def scale(a: Elem, c) -> Elem:
    return (a[0].scale(c), a[1].scale(c))


def is_zero(a: Elem) -> bool:
    return a[0].is_zero() and a[1].is_zero()


def atom_degree(atom: Atom) -> int:
    kind, c = atom
    a = c.degree + 1
    return a - 2 if kind == "s" else a - 1


def atoms(x: Elem) -> List[Atom]:
    """Split an element into arity-homogeneous pieces."""
    f, th = x
    out: List[Atom] = [("s", f.component(a)) for a in sorted(f.arities())]
    out += [("h", th.component(a)) for a in sorted(th.arities())]
    return out


def elem_degree(x: Elem) -> Optional[int]:
    ds = {atom_degree(a) for a in atoms(x)}
    return next(iter(ds)) if len(ds) == 1 else None


def project_h(c: Cochain) -> Cochain:
    """P: keep the components of bidegree -1|k."""
    ng = c.dims[0]
    return c.restrict(lambda k: k[1] < ng and all(i >= ng for i in k[0]))


def _base_on_atoms(ats: Sequence[Atom], dims) -> Elem:
    k = len(ats)
    s_pos = [i for i, a in enumerate(ats) if a[0] == "s"]
    if k == 2 and len(s_pos) == 2:
        Q1, Q2 = ats[0][1], ats[1][1]
        val = nr_bracket(Q1, Q2)
        return (val if Q1.degree % 2 == 0 else -val, Cochain(dims))
    if k >= 2 and len(s_pos) == 1:
        i = s_pos[0]
        order = [i] + [j for j in range(k) if j != i]
        sign = koszul_sign(order, [atom_degree(a) for a in ats])
        Q = ats[i][1]
        rest = [ats[j][1] for j in order[1:]]
        val = project_h(nested_bracket(Q, rest))
        return (Cochain(dims), val if sign > 0 else -val)
    return zero_elem(dims)


def _expand(xs: Sequence[Elem]) -> Iterable[List[Atom]]:
    pieces = [atoms(x) for x in xs]

    def rec(i, acc):
        if i == len(pieces):
            yield list(acc)
            return
        for a in pieces[i]:
            acc.append(a)
            yield from rec(i + 1, acc)
            acc.pop()

    if all(pieces):
        yield from rec(0, [])


def bracket(xs: Sequence[Elem], dims=None) -> Elem:
    """Untwisted l_k(x_1, ..., x_k) with k = len(xs)."""
    dims = dims or xs[0][0].dims
    out = zero_elem(dims)
    for ats in _expand(xs):
        out = add(out, _base_on_atoms(ats, dims))
    return out


class TwistedLinfty:
    """The brackets l_k twisted by the MC element (s^{-1} pi, T) of a relative RB structure."""

    def __init__(self, op: RelativeRBO, truncation_arity: int = 4):
        self.op = op
        self.dims = op.dims
        self.pi = op.rep.pi()
        self.T = op.cochain()
        self.truncation_arity = truncation_arity
        self._jmax = self.dims[0] + 2

    def _check_k(self, k: int):
        if not 1 <= k <= self.truncation_arity:
            raise ValueError(f"bracket arity {k} outside 1..{self.truncation_arity}")

    def bracket(self, xs: Sequence[Elem]) -> Elem:
        """l_k^alpha(x_1..x_k) = sum_{i,j} 1/(i! j!) l_{i+j+k}(pi^i, T^j, x_1..x_k)."""
        k = len(xs)
        self._check_k(k)
        out = zero_elem(self.dims)
        pi_e = (self.pi, Cochain(self.dims))
        T_e = (Cochain(self.dims), self.T)
        for i in range(0, 3):
            for j in range(0, self._jmax + 1):
                if i + j + k < 2:
                    continue
                args = [pi_e] * i + [T_e] * j + list(xs)
                val = bracket(args, self.dims)
                if not is_zero(val):
                    out = add(out, scale(val, Fraction(1, math.factorial(i) * math.factorial(j))))
        return out

    # closed forms ----------------------------------------------------------
    def closed_form(self, xs: Sequence[Elem]) -> Elem:
        """The explicit l_1, l_2 and l_m (m >= 3) expressions, extended multilinearly."""
        k = len(xs)
        self._check_k(k)
        out = zero_elem(self.dims)
        for combo in _expand_homog(xs):
            out = add(out, self._closed_homog(combo))
        return out

    def _closed_homog(self, xs: Sequence[Elem]) -> Elem:
        dims, pi, T = self.dims, self.pi, self.T
        m = len(xs)
        ns = [_n_of(x) for x in xs]
        if m == 1:
            (f, th), n = xs[0], ns[0]
            first = -nr_bracket(pi, f)
            second = nr_bracket(nr_bracket(pi, T), th)
            if f:
                second = second + nested_bracket(f, [T] * n).scale(Fraction(1, math.factorial(n)))
            return (first, second)
        if m == 2:
            (f1, t1), (f2, t2) = xs
            n1, n2 = ns
            first = nr_bracket(f1, f2)
            if (n1 - 1) % 2:
                first = -first
            second = nr_bracket(nr_bracket(pi, t1), t2)
            if n1 >= 1:
                second = second + nr_bracket(nested_bracket(f1, [T] * (n1 - 1)), t2).scale(
                    Fraction(1, math.factorial(n1 - 1)))
            if n2 >= 1:
                term = nr_bracket(nested_bracket(f2, [T] * (n2 - 1)), t1).scale(Fraction(1, math.factorial(n2 - 1)))
                second = second + (term if (n1 * n2) % 2 == 0 else -term)
            return (first, second)
        second = Cochain(dims)
        for i in range(m):
            p = ns[i] + 1 - m
            if p < 0:
                continue
            fi = xs[i][0]
            others = [xs[j][1] for j in range(m) if j != i]
            term = nested_bracket(nested_bracket(fi, [T] * p), others).scale(Fraction(1, math.factorial(p)))
            alpha = ns[i] * sum(ns[:i])
            second = second + (term if alpha % 2 == 0 else -term)
        return (Cochain(dims), second)

    # checks -----------------------------------------------------------------
    def jacobi_defect(self, xs: Sequence[Elem]) -> Elem:
        """sum_i sum_{(i,n-i)-shuffles} eps l_{n-i+1}(l_i(..), ..) for homogeneous x's."""
        n = len(xs)
        degs = [elem_degree(x) for x in xs]
        if any(d is None for d in degs):
            raise ValueError("generalized Jacobi needs homogeneous inputs")
        out = zero_elem(self.dims)
        for i in range(1, n + 1):
            for sigma, _ in shuffles([i, n - i]):
                eps = koszul_sign(sigma, degs)
                inner = self.bracket([xs[s] for s in sigma[:i]])
                if is_zero(inner):
                    continue
                val = self.bracket([inner] + [xs[s] for s in sigma[i:]])
                out = add(out, val if eps > 0 else scale(val, -1))
        return out

    def mc_sum(self, beta: Elem, max_k: Optional[int] = None) -> Elem:
        """sum_k 1/k! l_k^alpha(beta, ..., beta)."""
        max_k = max_k or self.truncation_arity
        out = zero_elem(self.dims)
        for k in range(1, max_k + 1):
            val = self.bracket([beta] * k)
            out = add(out, scale(val, Fraction(1, math.factorial(k))))
        return out

    def d_sign_check(self, c: Elem, n: int) -> bool:
        """D(f, theta) = (-1)^{n-2} l_1^alpha(s^{-1} f, theta)."""
        from .cohomology import big_d
        l1 = self.bracket([c])
        d = big_d(self.op, c, n)
        return (scale(l1, (-1) ** n)) == d


def _n_of(x: Elem) -> int:
    f, th = x
    if f:
        return f.degree + 1
    if th:
        return th.degree + 2
    return 0


def _expand_homog(xs: Sequence[Elem]) -> Iterable[List[Elem]]:
    """Split each element by degree into homogeneous (f, theta) pieces."""
    pieces = []
    for x in xs:
        dims = x[0].dims
        by_deg = {}
        for kind, c in atoms(x):
            d = atom_degree((kind, c))
            f, th = by_deg.get(d, zero_elem(dims))
            by_deg[d] = (f + c, th) if kind == "s" else (f, th + c)
        pieces.append(list(by_deg.values()))

    def rec(i, acc):
        if i == len(pieces):
            yield list(acc)
            return
        for p in pieces[i]:
            acc.append(p)
            yield from rec(i + 1, acc)
            acc.pop()

    if all(pieces):
        yield from rec(0, [])


def random_element(dims, degree: int, rng: random.Random, density: float = 0.6, span: int = 3) -> Elem:
    """Random homogeneous element of the given degree."""
    n = degree + 2
    fkeys = rep_space(dims, n).keys if n >= 1 else []
    tkeys = hom_keys(dims, 0, degree + 1, True) if degree + 1 >= 1 else []

    def draw(keys):
        return Cochain(dims, {k: rng.randint(-span, span) for k in keys if rng.random() < density})

    return (draw(fkeys), draw(tkeys))


# ---------------------------------------------------------------------------
# strict extension 0 -> h -> s^{-1}L' (+) h -> s^{-1}L' -> 0


def sub_bracket(op: RelativeRBO, thetas: Sequence[Cochain]) -> Cochain:
    """Brackets on h induced by the inclusion: l_1 = [[pi,T],-], l_2 = [[pi,-],-], l_k = 0 otherwise."""
    pi = op.rep.pi()
    if len(thetas) == 1:
        return nr_bracket(nr_bracket(pi, op.cochain()), thetas[0])
    if len(thetas) == 2:
        return nr_bracket(nr_bracket(pi, thetas[0]), thetas[1])
    return Cochain(op.dims)


def quotient_bracket(op: RelativeRBO, fs: Sequence[Cochain]) -> Cochain:
    """Brackets on s^{-1}L': l_1 = -[pi, -], l_2(f1, f2) = (-1)^{|f1|}[f1, f2], l_k = 0 otherwise."""
    pi = op.rep.pi()
    if len(fs) == 1:
        return -nr_bracket(pi, fs[0])
    if len(fs) == 2:
        val = nr_bracket(fs[0], fs[1])
        return val if fs[0].degree is None or fs[0].degree % 2 == 0 else -val
    return Cochain(op.dims)


def strict_extension_check(op: RelativeRBO, samples: int = 5, seed: int = 0, max_arity: int = 3) -> Report:
    """iota and p commute with the brackets up to ``max_arity`` on random inputs, and p o iota = 0."""
    rng = random.Random(seed)
    L = TwistedLinfty(op, truncation_arity=max(max_arity, 1))
    dims = op.dims
    checks = {"p_iota_zero": True, "iota_morphism": True, "p_morphism": True}
    for _ in range(samples):
        for k in range(1, max_arity + 1):
            degs = [rng.randint(0, 1) for _ in range(k)]
            thetas = [random_element(dims, d, rng)[1] for d in degs]
            if k == 1:
                checks["p_iota_zero"] &= (Cochain(dims), thetas[0])[0].is_zero()
            lhs = (Cochain(dims), sub_bracket(op, thetas))
            rhs = L.bracket([(Cochain(dims), t) for t in thetas])
            checks["iota_morphism"] &= lhs == rhs
            xs = [random_element(dims, rng.randint(-1, 1), rng) for _ in range(k)]
            lhs_p = L.bracket(xs)[0]
            checks["p_morphism"] &= lhs_p == quotient_bracket(op, [x[0] for x in xs])
    return Report(all(checks.values()), None, checks)
