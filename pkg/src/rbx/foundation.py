"""Exact scalars, exact linear algebra over Q, and sign combinatorics.

Everything here works on :class:`fractions.Fraction`; no floating point is
ever produced.  Basis enumeration orders are lexicographic and are part of
the public contract, since cohomology matrices downstream depend on them.
"""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

Scalar = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use 'p/q' strings")
    return Fraction(x)


def fmt(x: Fraction) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Sparse matrices


class Matrix:
    """Sparse exact matrix; ``entries`` maps ``(row, col)`` to a nonzero Fraction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], Fraction]] = None):
        self.rows = rows
        self.cols = cols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry {(i, j)} outside {rows}x{cols}")
            v = Q(v)
            if v:
                clean[i, j] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ents = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    ents[i, j] = Q(v)
        return cls(nrows, ncols, ents)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Sequence]) -> "Matrix":
        ents = {}
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise ValueError("column length mismatch")
            for i, v in enumerate(col):
                if v:
                    ents[i, j] = Q(v)
        return cls(nrows, len(columns), ents)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self.entries.get(key, ZERO)

    def to_rows(self) -> List[List[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column(self, j: int) -> List[Fraction]:
        col = [ZERO] * self.rows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
            by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
            for (k, j), v in other.entries.items():
                by_row.setdefault(k, []).append((j, v))
            acc: Dict[Tuple[int, int], Fraction] = {}
            for (i, k), a in self.entries.items():
                for j, b in by_row.get(k, ()):
                    acc[i, j] = acc.get((i, j), ZERO) + a * b
            return Matrix(self.rows, other.cols, acc)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [ZERO] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] += v * vec[j]
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, ZERO) + v
        return Matrix(self.rows, self.cols, acc)

    def scale(self, c) -> "Matrix":
        c = Q(c)
        return Matrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        ents = dict(self.entries)
        for (i, j), v in other.entries.items():
            ents[i, j + self.cols] = v
        return Matrix(self.rows, self.cols + other.cols, ents)

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_rows(m: Matrix) -> List[Dict[int, int]]:
    rows: Dict[int, Dict[int, Fraction]] = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
    out = []
    for r in rows.values():
        den = math.lcm(*(v.denominator for v in r.values()))
        out.append({j: int(v * den) for j, v in r.items()})
    return out


def rank(m: Matrix) -> int:
    """Exact rank by fraction-free elimination on integer rows.

    Rows are scaled to integers and the pivot is the entry of smallest
    absolute value in the active column, which keeps coefficient growth down.
    """
    rows = [r for r in _integer_rows(m) if r]
    r = 0
    while rows:
        # column carrying the smallest-magnitude nonzero entry
        best = None
        for idx, row in enumerate(rows):
            for j, v in row.items():
                key = (abs(v), j)
                if best is None or key < best[0]:
                    best = (key, idx, j)
        _, pidx, pcol = best
        prow = rows.pop(pidx)
        pv = prow[pcol]
        new_rows = []
        for row in rows:
            a = row.get(pcol)
            if a is None:
                new_rows.append(row)
                continue
            combined: Dict[int, int] = {}
            for j in set(row) | set(prow):
                val = pv * row.get(j, 0) - a * prow.get(j, 0)
                if val:
                    combined[j] = val
            if combined:
                g = math.gcd(*combined.values())
                if g > 1:
                    combined = {j: v // g for j, v in combined.items()}
                new_rows.append(combined)
        rows = new_rows
        r += 1
    return r


def rref(m: Matrix) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = m.to_rows()
    pivots: List[int] = []
    prow = 0
    for c in range(m.cols):
        piv = None
        for i in range(prow, m.rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[prow], a[piv] = a[piv], a[prow]
        inv = 1 / a[prow][c]
        a[prow] = [v * inv for v in a[prow]]
        for i in range(m.rows):
            if i != prow and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[prow])]
        pivots.append(c)
        prow += 1
        if prow == m.rows:
            break
    return a, pivots


def kernel_basis(m: Matrix) -> List[List[Fraction]]:
    """Basis of the null space, one vector per free column, in column order."""
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [ZERO] * m.cols
        v[free] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][free]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence) -> Optional[List[Fraction]]:
    """Some exact x with ``m @ x == b``, or None if the system is inconsistent."""
    b = [Q(x) for x in b]
    if len(b) != m.rows:
        raise ValueError(f"rhs has length {len(b)}, matrix has {m.rows} rows")
    aug = m.hstack(Matrix.from_columns(m.rows, [b]))
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [ZERO] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][m.cols]
    return x


def span_rank(vectors: Sequence[Sequence], dim: int) -> int:
    if not vectors:
        return 0
    return rank(Matrix.from_columns(dim, vectors))


def in_span(v: Sequence, vectors: Sequence[Sequence], dim: int) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    return solve(Matrix.from_columns(dim, vectors), v) is not None


# ---------------------------------------------------------------------------
# Permutations, shuffles and signs


def perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct sortable items."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    order = {v: i for i, v in enumerate(sorted(perm))}
    p = [order[v] for v in perm]
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def shuffles(block_sizes: Sequence[int]) -> List[Tuple[Tuple[int, ...], int]]:
    """All (i_1,...,i_k)-shuffles of {0,...,n-1} with their permutation signs.

    A shuffle is returned as the tuple ``(sigma(0), ..., sigma(n-1))``; it is
    increasing on every block.  The count equals the multinomial coefficient.
    """
    sizes = tuple(block_sizes)
    if any(s < 0 for s in sizes):
        raise ValueError("block sizes must be nonnegative")
    return list(_shuffles(sizes))


@functools.lru_cache(maxsize=None)
def _shuffles(sizes: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    n = sum(sizes)
    out = []

    def rec(remaining: Tuple[int, ...], k: int, acc: Tuple[int, ...]):
        if k == len(sizes):
            out.append(acc)
            return
        for block in itertools.combinations(remaining, sizes[k]):
            rest = tuple(x for x in remaining if x not in block)
            rec(rest, k + 1, acc + block)

    rec(tuple(range(n)), 0, ())
    return tuple((s, perm_sign(s)) for s in out)


def multinomial(block_sizes: Sequence[int]) -> int:
    n = sum(block_sizes)
    out = math.factorial(n)
    for s in block_sizes:
        out //= math.factorial(s)
    return out


def koszul_sign(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of ``v_1...v_n = eps * v_sigma(1)...v_sigma(n)`` (0-based sigma).

    Only the parity of the degrees matters: every inversion between two odd
    elements contributes a factor -1.
    """
    if len(sigma) != len(degrees):
        raise ValueError("one degree per slot required")
    sign = 1
    n = len(sigma)
    for a in range(n):
        da = degrees[sigma[a]] & 1
        if not da:
            continue
        for b in range(a + 1, n):
            if sigma[a] > sigma[b] and degrees[sigma[b]] & 1:
                sign = -sign
    return sign


def sort_with_sign(indices: Sequence[int]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Sort indices of an alternating argument list.

    Returns ``(sorted, sign)``, or ``(None, 0)`` when an index repeats.
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


def graded_sort(indices: Sequence[int], degrees: Sequence[int]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Sort graded-symmetric arguments (basis indices with given degrees).

    Swapping neighbours costs ``(-1)^{|a||b|}``.  A repeated odd basis vector
    makes the product vanish and yields ``(None, 0)``.
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            if degrees[idx[j - 1]] & 1 and degrees[idx[j]] & 1:
                sign = -sign
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b and degrees[a] & 1:
            return None, 0
    return tuple(idx), sign


def exterior_basis(k: int, dim: int) -> List[Tuple[int, ...]]:
    """Strictly increasing k-tuples over range(dim), lexicographic."""
    if k < 0 or k > dim:
        return []
    return list(itertools.combinations(range(dim), k))


def graded_sym_basis(k: int, degrees: Sequence[int]) -> List[Tuple[int, ...]]:
    """Weakly increasing k-tuples; odd-degree indices may not repeat."""
    out = []
    for combo in itertools.combinations_with_replacement(range(len(degrees)), k):
        if all(not (a == b and degrees[a] & 1) for a, b in zip(combo, combo[1:])):
            out.append(combo)
    return out


def iter_shuffle_splits(items: Sequence, sizes: Sequence[int]) -> Iterator[Tuple[List[Tuple], int]]:
    """Split ``items`` into consecutive shuffle blocks, yielding (blocks, sign)."""
    for sigma, sign in shuffles(sizes):
        blocks = []
        pos = 0
        for s in sizes:
            blocks.append(tuple(items[sigma[p]] for p in range(pos, pos + s)))
            pos += s
        yield blocks, sign
