"""Polyvectors, the Schouten-Nijenhuis bracket, r-matrices and the triangular complex.

Pairing convention: <x_1 ^ ... ^ x_k, xi_1 ^ ... ^ xi_k> = det(<x_i, xi_j>), so
the basis e_I of wedge^k g is dual to e*_I for increasing I.  Every duality
below (r#, Psi, flat, Theta) is derived from :func:`pair`.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cohomology import (CochainComplex, CochainSpace, PairSpace, Space, big_d, ce_space, complex_ce,
                         d_ce, les_from_triple, LESReport)
from .foundation import ZERO, Matrix, Q, exterior_basis, solve, sort_with_sign
from .nrcore import Cochain
from .structures import LieAlgebra, RelativeRBO, Report, Representation, verify_relative_rbo

Key = Tuple[int, ...]


class Polyvector:
    """An element of wedge^k g stored on increasing index tuples."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Optional[Dict[Key, object]] = None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for t, v in (coeffs or {}).items():
            t = tuple(t)
            if len(t) != degree or any(not 0 <= i < dim for i in t):
                raise ValueError(f"index tuple {t} does not fit wedge^{degree} of a {dim}-dim space")
            if any(t[i] >= t[i + 1] for i in range(len(t) - 1)):
                raise ValueError(f"index tuple {t} must be strictly increasing")
            if not isinstance(v, Fraction) and not hasattr(v, "b"):
                v = Q(v)
            if v:
                clean[t] = v
        self.coeffs = clean

    @classmethod
    def from_terms(cls, dim: int, degree: int, terms) -> "Polyvector":
        """Accumulate ``(indices, coeff)`` pairs in any order, with the alternating sign."""
        acc: Dict[Key, object] = {}
        for idx, c in terms:
            t, s = sort_with_sign(idx)
            if t is None:
                continue
            acc[t] = acc.get(t, ZERO) + s * c
        return cls(dim, degree, acc)

    @classmethod
    def basis(cls, dim: int, *indices: int) -> "Polyvector":
        return cls.from_terms(dim, len(indices), [(indices, Fraction(1))])

    @classmethod
    def vector(cls, x: Sequence) -> "Polyvector":
        return cls(len(x), 1, {(i,): Q(c) for i, c in enumerate(x) if c})

    def _check(self, o: "Polyvector"):
        if self.dim != o.dim:
            raise ValueError("polyvectors over spaces of different dimension")

    def __add__(self, o: "Polyvector") -> "Polyvector":
        self._check(o)
        if o.degree != self.degree and o.coeffs and self.coeffs:
            raise ValueError("cannot add polyvectors of different degree")
        deg = self.degree if self.coeffs or not o.coeffs else o.degree
        out = dict(self.coeffs)
        for t, v in o.coeffs.items():
            out[t] = out.get(t, ZERO) + v
        return Polyvector(self.dim, deg, out)

    def __neg__(self) -> "Polyvector":
        return Polyvector(self.dim, self.degree, {t: -v for t, v in self.coeffs.items()})

    def __sub__(self, o: "Polyvector") -> "Polyvector":
        return self + (-o)

    def scale(self, c) -> "Polyvector":
        return Polyvector(self.dim, self.degree, {t: c * v for t, v in self.coeffs.items()})

    __rmul__ = scale

    def __eq__(self, o) -> bool:
        if not isinstance(o, Polyvector):
            return NotImplemented
        if not self.coeffs and not o.coeffs:
            return self.dim == o.dim
        return self.dim == o.dim and self.degree == o.degree and self.coeffs == o.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def wedge(self, o: "Polyvector") -> "Polyvector":
        self._check(o)
        terms = [(a + b, u * v) for a, u in self.coeffs.items() for b, v in o.coeffs.items()]
        return Polyvector.from_terms(self.dim, self.degree + o.degree, terms)

    def __repr__(self) -> str:
        return f"Polyvector(dim={self.dim}, degree={self.degree}, {self.coeffs})"


def pair(chi: Polyvector, covectors: Sequence[Sequence]) -> Fraction:
    """<chi, xi_1 ^ ... ^ xi_k> for dense covectors, by the determinant convention."""
    if len(covectors) != chi.degree:
        raise ValueError("pairing needs as many covectors as the degree")
    total = ZERO
    for t, c in chi.coeffs.items():
        # det of the k x k matrix <e_{t_i}, xi_j>
        k = len(t)
        det = ZERO
        for perm in itertools.permutations(range(k)):
            prod = Fraction(1)
            for i in range(k):
                prod *= Q(covectors[perm[i]][t[i]])
                if not prod:
                    break
            if prod:
                _, s = sort_with_sign(perm)
                det += s * prod
        total += c * det
    return total


def _pair_basis(chi: Polyvector, idx: Sequence[int]) -> Fraction:
    """<chi, e*_{i_1} ^ ... ^ e*_{i_k}> for basis covectors in any order."""
    t, s = sort_with_sign(idx)
    if t is None:
        return ZERO
    return s * chi.coeffs.get(t, ZERO)


# ---------------------------------------------------------------------------
# the Schouten-Nijenhuis bracket


def sn_bracket(a: Polyvector, b: Polyvector, alg: LieAlgebra, consts=None) -> Polyvector:
    """[X, Y]_SN = sum_{i,j} (-1)^{i+j} [x_i, y_j] ^ X_i^ ^ Y_j^ on decomposables.

    ``consts`` overrides the structure constants (any coefficient ring).
    """
    if a.dim != b.dim or a.dim != alg.dim:
        raise ValueError("dimension mismatch between polyvectors and the Lie algebra")
    c = alg.consts if consts is None else consts
    n = alg.dim
    deg = a.degree + b.degree - 1
    if a.degree == 0 or b.degree == 0:
        return Polyvector(n, max(deg, 0))
    terms = []
    for I, u in a.coeffs.items():
        for J, v in b.coeffs.items():
            uv = u * v
            for i, x in enumerate(I):
                restI = I[:i] + I[i + 1:]
                for j, y in enumerate(J):
                    restJ = J[:j] + J[j + 1:]
                    s = 1 if (i + j) % 2 == 0 else -1
                    for k in range(n):
                        ck = c[x][y][k]
                        if ck:
                            terms.append(((k,) + restI + restJ, s * uv * ck))
    return Polyvector.from_terms(n, deg, terms)


def cobracket(alg: LieAlgebra, r: Polyvector, x: Sequence) -> Polyvector:
    """delta_r(x) = [x, r]_SN."""
    return sn_bracket(Polyvector.vector(x), r, alg)


# ---------------------------------------------------------------------------
# r-matrices and dualities


def r_matrix(r: Polyvector) -> Matrix:
    """Skew matrix R with <r, xi ^ eta> = xi^T R eta."""
    if r.degree != 2 and r.coeffs:
        raise ValueError("an r-matrix is a bivector")
    ents = {}
    for (i, j), v in r.coeffs.items():
        ents[i, j] = v
        ents[j, i] = -v
    return Matrix(r.dim, r.dim, ents)


def r_sharp(alg: LieAlgebra, r: Polyvector) -> Matrix:
    """Matrix of r#: g* -> g, column a = r#(e*_a), with <r# xi, eta> = <r, xi ^ eta>."""
    if r.dim != alg.dim:
        raise ValueError("dimension mismatch")
    return r_matrix(r).transpose()


def cybe_check(alg: LieAlgebra, r: Polyvector) -> Report:
    """[r, r]_SN = 0, cross-checked against r# as a relative operator over the coadjoint action."""
    rr = sn_bracket(r, r, alg)
    op = RelativeRBO(Representation.coadjoint(alg), r_sharp(alg, r))
    rel = verify_relative_rbo(op)
    if rel.ok != rr.is_zero():
        raise AssertionError("CYBE verdict disagrees with the relative operator check on r#")
    witness = min(rr.coeffs) if rr.coeffs else None
    return Report(rr.is_zero(), witness, {"sn_zero": rr.is_zero(), "relative_rbo": rel.ok, "defect": rr})


class TriangularBialgebra:
    """A Lie algebra with a skew r-matrix; the CYBE is checked on construction."""

    def __init__(self, alg: LieAlgebra, r: Polyvector, check: bool = True):
        if r.dim != alg.dim:
            raise ValueError("dimension mismatch")
        if check and not cybe_check(alg, r):
            raise ValueError("r does not satisfy the classical Yang-Baxter equation")
        self.alg = alg
        self.r = r

    def relative(self) -> RelativeRBO:
        return RelativeRBO(Representation.coadjoint(self.alg), r_sharp(self.alg, self.r))

    def cobracket(self, x: Sequence) -> Polyvector:
        return cobracket(self.alg, self.r, x)


def _dims(n: int) -> Tuple[int, int]:
    return (n, n)


def psi(chi: Polyvector) -> Cochain:
    """Psi(chi) in Hom(wedge^k g*, g) for chi in wedge^{k+1} g, as a cochain on g (+) g*."""
    n = chi.dim
    k = chi.degree - 1
    dims = _dims(n)
    data = {}
    if k >= 0:
        for t in itertools.combinations(range(n), k):
            for i in range(n):
                v = _pair_basis(chi, t + (i,))
                if v:
                    data[tuple(n + a for a in t), i] = v
    return Cochain(dims, data)


def flat(theta: Cochain, k: Optional[int] = None) -> Polyvector:
    """Inverse of :func:`psi`; raises with a witness key when theta is not skew."""
    n = theta.dims[0]
    if k is None:
        ar = {len(t) for (t, _) in theta.data}
        if len(ar) > 1:
            raise ValueError("mixed arities")
        k = ar.pop() if ar else 1
    if k < 1:
        raise ValueError("flat needs arity at least one")
    for (t, o) in theta.data:
        if o >= n or any(i < n for i in t):
            raise ValueError(f"component {(t, o)} is not of the form wedge g* -> g")
    coeffs = {}
    for T in itertools.combinations(range(n), k + 1):
        coeffs[T] = theta.on_basis([n + a for a in T[:-1]])[T[-1]]
    chi = Polyvector(n, k + 1, coeffs)
    back = psi(chi)
    if back != theta:
        diff = (back - theta).data
        raise ValueError(f"not in the image of Psi; first mismatch at {min(diff)}")
    return chi


def f_star(f: Cochain, n: Optional[int] = None) -> Cochain:
    """f* with <f*(x_1..x_{n-1}, xi), x_n> = -<xi, f(x_1..x_n)>, on g (+) g*."""
    ng = f.dims[0]
    if n is None:
        ar = f.arities()
        n = max(ar) if ar else 0
    data = {}
    for I in itertools.combinations(range(ng), n - 1):
        for b in range(ng):
            val = f.on_basis(I + (b,))
            for a in range(ng):
                if val[a]:
                    data[I + (ng + a,), ng + b] = -val[a]
    return Cochain(_dims(ng), data)


def _lift_g(f: Cochain) -> Cochain:
    ng = f.dims[0]
    return Cochain(_dims(ng), dict(f.data))


def lift(f: Cochain, n: Optional[int] = None) -> Cochain:
    """(f, f*) as a cochain of the Lie algebra with its coadjoint representation."""
    return _lift_g(f) + f_star(f, n)


def _g_part(F: Cochain) -> Cochain:
    ng = F.dims[0]
    return Cochain((ng, 0), {k: v for k, v in F.data.items() if k[1] < ng and all(i < ng for i in k[0])})


def theta_map(alg: LieAlgebra, r: Polyvector, f: Cochain, n: Optional[int] = None,
              method: str = "explicit") -> Polyvector:
    """Theta f in wedge^{n+1} g.

    explicit: <Theta f, xi_1..xi_{n+1}> = sum_i (-1)^{i+1} <xi_i, f(r# xi_1 .. ^i .. r# xi_{n+1})>.
    bracket: Psi^{-1} h_{r#}(f, f*).
    """
    from .cohomology import h_T
    ng = alg.dim
    if n is None:
        ar = f.arities()
        if not ar:
            raise ValueError("cannot infer the degree of a zero cochain; pass n")
        n = max(ar)
    R = r_sharp(alg, r)
    cols = [R.column(a) for a in range(ng)]

    def ex():
        coeffs = {}
        for K in itertools.combinations(range(ng), n + 1):
            tot = ZERO
            for i in range(n + 1):
                args = [cols[K[j]] for j in range(n + 1) if j != i]
                val = f.evaluate(args)
                tot += (1 if i % 2 == 0 else -1) * val[K[i]]
            coeffs[K] = tot
        return Polyvector(ng, n + 1, coeffs)

    def br():
        op = TriangularBialgebra(alg, r, check=False).relative()
        return flat(h_T(op, lift(f, n), n, "bracket"), n)

    if method == "explicit":
        return ex()
    if method == "bracket":
        return br()
    if method == "both":
        a, b = ex(), br()
        if a != b:
            raise AssertionError("Theta: closed form and bracket route disagree")
        return a
    raise ValueError(f"unknown method {method!r}")


def tensor_action(r: Polyvector, N: Matrix) -> Polyvector:
    """(id (x) N + N (x) id)(r) as a bivector."""
    R = r_matrix(r)
    A = R @ N.transpose() + N @ R
    return Polyvector(r.dim, 2, {(i, j): A[i, j] for i in range(r.dim) for j in range(i + 1, r.dim)})


def d_r(alg: LieAlgebra, r: Polyvector, chi: Polyvector, check: bool = True) -> Polyvector:
    """d_r chi = [r, chi]_SN."""
    if check and not cybe_check(alg, r):
        raise ValueError("r is not an r-matrix")
    return sn_bracket(r, chi, alg)


# ---------------------------------------------------------------------------
# the triangular complex


class PolySpace(Space):
    """Coordinates on wedge^k g."""

    def __init__(self, dim: int, k: int):
        self.n = dim
        self.k = k
        self.keys = exterior_basis(k, dim) if k >= 1 else []
        self.index = {t: i for i, t in enumerate(self.keys)}
        self.dim = len(self.keys)

    def to_vec(self, chi: Polyvector) -> List[Fraction]:
        vec = [ZERO] * self.dim
        for t, v in chi.coeffs.items():
            if t not in self.index:
                raise ValueError(f"polyvector component {t} outside wedge^{self.k}")
            vec[self.index[t]] = v
        return vec

    def from_vec(self, vec: Sequence) -> Polyvector:
        return Polyvector(self.n, self.k, {t: v for t, v in zip(self.keys, vec) if v})


def tlb_space(ng: int, n: int) -> Space:
    """Hom(wedge^n g, g) (+) wedge^n g; the polyvector part starts in degree 2."""
    dims = (ng, 0)
    if n <= 0:
        return PairSpace(CochainSpace(dims, []), PolySpace(ng, 0))
    return PairSpace(ce_space(dims, n), PolySpace(ng, n if n >= 2 else 0))


def d_tlb(alg: LieAlgebra, r: Polyvector, c: Tuple[Cochain, Polyvector], n: int,
          method: str = "explicit") -> Tuple[Cochain, Polyvector]:
    """(f, chi) |-> (d_CE f, Theta f + d_r chi).

    ``method="bracket"`` lifts (f, chi) to ((f, f*), Psi chi) over the coadjoint
    representation, applies the relative coboundary and projects back.
    """
    f, chi = c
    ng = alg.dim
    dims = (ng, 0)
    if n < 1:
        return (Cochain(dims), Polyvector(ng, 0))
    if n == 1 and chi:
        raise ValueError("1-cochains have no polyvector component")

    def ex():
        df = d_ce(alg, f, n, "explicit")
        th = theta_map(alg, r, f, n) if f else Polyvector(ng, n + 1)
        if n >= 2 and chi:
            th = th + sn_bracket(r, chi, alg)
        return (df, th)

    def br():
        op = TriangularBialgebra(alg, r, check=False).relative()
        F = lift(f, n)
        Th = psi(chi) if (n >= 2 and chi) else Cochain(_dims(ng))
        dF, dTh = big_d(op, (F, Th), n, "bracket")
        g = _g_part(dF)
        if lift(g, n + 1) != dF:
            raise AssertionError("lifted coboundary left the image of f -> (f, f*)")
        return (g, flat(dTh, n))

    if method == "explicit":
        return ex()
    if method == "bracket":
        return br()
    if method == "both":
        a, b = ex(), br()
        if a[0] != b[0] or a[1] != b[1]:
            raise AssertionError("D_TLB: closed form and bracket route disagree")
        return a
    raise ValueError(f"unknown method {method!r}")


def complex_tlb(alg: LieAlgebra, r: Polyvector, method: str = "explicit") -> CochainComplex:
    return CochainComplex("tlb", lambda n: tlb_space(alg.dim, n), lambda n, c: d_tlb(alg, r, c, n, method))


def complex_dr(alg: LieAlgebra, r: Polyvector) -> CochainComplex:
    """(wedge^n g, d_r) for n >= 2."""
    def space(n):
        return PolySpace(alg.dim, n if n >= 2 else 0)

    return CochainComplex("dr", space, lambda n, chi: sn_bracket(r, chi, alg))


def tlb_cohomology(alg: LieAlgebra, r: Polyvector, degree: int):
    if not cybe_check(alg, r):
        raise ValueError("r is not an r-matrix")
    return complex_tlb(alg, r).cohomology(degree)


def tlb_les_check(alg: LieAlgebra, r: Polyvector, max_degree: int = 3) -> LESReport:
    """Exactness of H(wedge g, d_r) -> H_TLB -> H_CE -> H(wedge g, d_r) with connecting map [f] |-> [Theta f]."""
    if not cybe_check(alg, r):
        raise ValueError("r is not an r-matrix")
    ng = alg.dim
    dims = (ng, 0)
    sub, mid, quo = complex_dr(alg, r), complex_tlb(alg, r), complex_ce(alg, augmented=False)
    return les_from_triple(
        sub, mid, quo,
        lambda n, chi: (Cochain(dims), chi),
        lambda n, c: c[0],
        lambda n, f: theta_map(alg, r, f, n) if n >= 1 else Polyvector(ng, 1),
        max_degree)


# ---------------------------------------------------------------------------
# deformations


def _dual_consts(alg: LieAlgebra, omega1: Cochain):
    from .deformation import Dual
    n = alg.dim
    c = [[[Dual(alg.consts[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    for ((i, j), k), v in omega1.data.items():
        c[i][j][k] = c[i][j][k] + Dual(0, v)
        c[j][i][k] = c[j][i][k] - Dual(0, v)
    return c


def first_order_expansion(alg: LieAlgebra, r: Polyvector, omega1: Cochain, X1: Polyvector) -> Dict[str, object]:
    """t-coefficients of the Jacobiator of mu + t omega1 and of [r + tX1, r + tX1]_SN over it."""
    from .deformation import Dual
    n = alg.dim
    c = _dual_consts(alg, omega1)
    jac = {}
    for i, j, k in itertools.combinations(range(n), 3):
        vec = [Dual() for _ in range(n)]
        for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
            for m in range(n):
                if c[a][b][m]:
                    for p in range(n):
                        vec[p] = vec[p] + c[a][b][m] * c[m][d][p]
        first = [x.b for x in vec]
        if any(first):
            jac[i, j, k] = first
    rt = Polyvector(n, 2, {t: Dual(r.coeffs.get(t, ZERO), X1.coeffs.get(t, ZERO))
                           for t in set(r.coeffs) | set(X1.coeffs)})
    rr = sn_bracket(rt, rt, alg, c)
    cybe1 = Polyvector(n, 3, {t: v.b for t, v in rr.coeffs.items()})
    return {"jacobi": jac, "cybe": cybe1}


def tlb_deform(alg: LieAlgebra, r: Polyvector, omega1: Cochain, X1: Polyvector) -> Report:
    """Cocycle test D_TLB(omega1, X1) = 0, asserted against the first-order expansion."""
    df, dchi = d_tlb(alg, r, (omega1, X1), 2)
    cocycle = df.is_zero() and dchi.is_zero()
    exp = first_order_expansion(alg, r, omega1, X1)
    direct = not exp["jacobi"] and exp["cybe"].is_zero()
    if direct != cocycle:
        raise AssertionError("cocycle test disagrees with the first-order expansion")
    return Report(cocycle, None, {"jacobi": not exp["jacobi"], "cybe": exp["cybe"].is_zero(),
                                  "defect": (df, dchi)})


def tlb_equivalent(alg: LieAlgebra, r: Polyvector, d1: Tuple[Cochain, Polyvector],
                   d2: Tuple[Cochain, Polyvector]) -> Optional[Matrix]:
    """N in gl(g) with D_TLB(N) = d2 - d1, or None."""
    cx = complex_tlb(alg, r)
    sp = cx.space(2)
    target = [b - a for a, b in zip(sp.to_vec(d1), sp.to_vec(d2))]
    sol = solve(cx.matrix(1), target)
    if sol is None:
        return None
    f, _ = cx.space(1).from_vec(sol)
    N = Matrix(alg.dim, alg.dim, {(o, t[0]): v for (t, o), v in f.data.items()})
    got = d_tlb(alg, r, (f, Polyvector(alg.dim, 0)), 1)
    if sp.to_vec(got) != target:
        raise AssertionError("equivalence witness fails substitution")
    return N
