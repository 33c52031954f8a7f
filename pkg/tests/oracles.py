"""Brute-force reference computations that share no code with the library.

Everything here is written from the textbook formulas with sympy matrices and
plain dictionaries, so it can serve as an independent check.
"""

import itertools

import sympy


def bracket(consts, x, y):
    n = len(consts)
    return [sum(x[i] * y[j] * consts[i][j][k] for i in range(n) for j in range(n)) for k in range(n)]


def consts_from(n, table):
    c = [[[0] * n for _ in range(n)] for _ in range(n)]
    for (i, j), out in table.items():
        for k, v in out.items():
            c[i][j][k] = v
            c[j][i][k] = -v
    return c


def _sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
            elif seq[i] == seq[j]:
                return 0
    return s


def _eval_alt(f, n_dim, idx):
    """f given on sorted tuples as a dict tuple -> list, extended alternatingly."""
    s = _sign(idx)
    if s == 0:
        return [0] * n_dim
    return [s * v for v in f.get(tuple(sorted(idx)), [0] * n_dim)]


def ce_matrix(consts, n):
    """Matrix of the Chevalley-Eilenberg differential C^n(g, g) -> C^{n+1}(g, g).

    (df)(x_0..x_n) = sum_i (-1)^i [x_i, f(..^i..)] + sum_{i<j} (-1)^{i+j} f([x_i,x_j], ..^i..^j..)
    """
    d = len(consts)
    unit = [[1 if a == b else 0 for a in range(d)] for b in range(d)]
    src = [(t, o) for t in itertools.combinations(range(d), n) for o in range(d)]
    dst = [(t, o) for t in itertools.combinations(range(d), n + 1) for o in range(d)]
    M = sympy.zeros(len(dst), len(src))
    for col, (t0, o0) in enumerate(src):
        f = {t0: unit[o0]}

        def fval(args):
            # args are basis indices or dense vectors; expand linearly
            out = [0] * d
            dense = [unit[a] if isinstance(a, int) else a for a in args]
            for combo in itertools.product(range(d), repeat=len(dense)):
                c = 1
                for a, v in zip(combo, dense):
                    c *= v[a]
                    if not c:
                        break
                if c:
                    val = _eval_alt(f, d, combo)
                    out = [p + c * q for p, q in zip(out, val)]
            return out

        for row, (t1, o1) in enumerate(dst):
            xs = list(t1)
            tot = [0] * d
            for i in range(n + 1):
                rest = xs[:i] + xs[i + 1:]
                v = bracket(consts, unit[xs[i]], fval(rest))
                tot = [p + (-1) ** i * q for p, q in zip(tot, v)]
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    rest = [x for k, x in enumerate(xs) if k not in (i, j)]
                    v = fval([bracket(consts, unit[xs[i]], unit[xs[j]])] + rest)
                    tot = [p + (-1) ** (i + j) * q for p, q in zip(tot, v)]
            M[row, col] = tot[o1]
    return M


def ce_betti(consts, n):
    """dim H^n(g, g) with C^0 = g and d x = -[., x] (rank is sign independent)."""
    d = len(consts)
    dn = ce_matrix(consts, n)
    zdim = dn.shape[1] - dn.rank()
    if n == 0:
        return zdim
    if n == 1:
        d0 = sympy.Matrix([[consts[b][a][o] for a in range(d)] for b in range(d) for o in range(d)])
        return zdim - d0.rank()
    return zdim - ce_matrix(consts, n - 1).rank()


def rb_h1(consts, T):
    """dim of {f in gl(g): f is a derivation and f T = T f}; degree 0 of this complex is zero."""
    d = len(consts)
    syms = sympy.symbols(f"f0:{d * d}")
    F = sympy.Matrix(d, d, syms)
    Tm = sympy.Matrix(T)
    unit = [[1 if a == b else 0 for a in range(d)] for b in range(d)]
    eqs = []
    for i in range(d):
        for j in range(i + 1, d):
            lhs = F * sympy.Matrix(bracket(consts, unit[i], unit[j]))
            rhs = sympy.Matrix(bracket(consts, list(F[:, i]), unit[j])) + sympy.Matrix(bracket(consts, unit[i], list(F[:, j])))
            eqs += list(lhs - rhs)
    eqs += list(F * Tm - Tm * F)
    A, _ = sympy.linear_eq_to_matrix([sympy.expand(e) for e in eqs], syms)
    return d * d - A.rank()


def sn_bivectors(consts, r, s):
    """[x^y, u^v] for bivectors given as dicts (i, j) -> coeff with i < j; returns trivector dict."""
    d = len(consts)
    unit = [[1 if a == b else 0 for a in range(d)] for b in range(d)]
    out = {}

    def add_wedge(vec, a, b, c):
        for k, val in enumerate(vec):
            if not val:
                continue
            s = _sign((k, a, b))
            if s:
                key = tuple(sorted((k, a, b)))
                out[key] = out.get(key, 0) + s * c * val

    for (x, y), c1 in r.items():
        for (u, v), c2 in s.items():
            c = c1 * c2
            add_wedge(bracket(consts, unit[x], unit[u]), y, v, c)
            add_wedge(bracket(consts, unit[x], unit[v]), y, u, -c)
            add_wedge(bracket(consts, unit[y], unit[u]), x, v, -c)
            add_wedge(bracket(consts, unit[y], unit[v]), x, u, c)
    return {k: v for k, v in out.items() if v}


def pair_bivector(r, xi, eta):
    """<r, xi ^ eta> with the determinant convention."""
    return sum(c * (xi[i] * eta[j] - xi[j] * eta[i]) for (i, j), c in r.items())


def theta_degree1(r, N, d):
    """Theta N for N in gl(g), from <Theta N, xi1^xi2> = <xi1, N r#xi2> - <xi2, N r#xi1>."""
    unit = [[1 if a == b else 0 for a in range(d)] for b in range(d)]
    Nm = sympy.Matrix(N)

    def rsharp(xi):
        return [pair_bivector(r, xi, unit[b]) for b in range(d)]

    out = {}
    for i, j in itertools.combinations(range(d), 2):
        a = (Nm * sympy.Matrix(rsharp(unit[j])))[i]
        b = (Nm * sympy.Matrix(rsharp(unit[i])))[j]
        if a - b:
            out[i, j] = a - b
    return out


def lierep_d1_rank_adjoint(consts):
    """Rank of the degree-one differential of the pair (g, ad) on gl(g) (+) gl(g).

    Its kernel is {(N, S): N is a derivation and [S, ad x] = ad(N x) for all x}.
    """
    d = len(consts)
    ns = sympy.symbols(f"n0:{d * d}")
    ss = sympy.symbols(f"s0:{d * d}")
    N = sympy.Matrix(d, d, ns)
    S = sympy.Matrix(d, d, ss)
    unit = [[1 if a == b else 0 for a in range(d)] for b in range(d)]

    def ad(x):
        return sympy.Matrix([[sum(x[i] * consts[i][j][k] for i in range(d)) for j in range(d)] for k in range(d)])

    eqs = []
    for i in range(d):
        for j in range(i + 1, d):
            lhs = N * sympy.Matrix(bracket(consts, unit[i], unit[j]))
            rhs = sympy.Matrix(bracket(consts, list(N[:, i]), unit[j])) + sympy.Matrix(bracket(consts, unit[i], list(N[:, j])))
            eqs += list(lhs - rhs)
    for i in range(d):
        eqs += list(S * ad(unit[i]) - ad(unit[i]) * S - ad(list(N[:, i])))
    A, _ = sympy.linear_eq_to_matrix([sympy.expand(e) for e in eqs], list(ns) + list(ss))
    return A.rank()
