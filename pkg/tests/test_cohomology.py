import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

import oracles
from conftest import make_aff1, make_heis3, make_sl2
from rbx.cohomology import (
    big_d, big_d_direct, build_complex, ce_space, complex_ce, complex_lierep,
    complex_rb, complex_rrb, d_ce, d_rb, delta, embed_rb, h_T, les_check, omega,
    op_space, partial, project_rb, rep_space,
)
from rbx.foundation import Matrix, rank
from rbx.nrcore import Cochain, endomorphism_cochain, operator_cochain
from rbx.structures import RBO, LieAlgebra, RelativeRBO, Representation

T0 = Matrix.from_rows([[1, 0], [0, 0]])
T_NIL = Matrix.from_rows([[1, 1], [-1, -1]])


def aff_op(T=T0):
    return RelativeRBO(Representation.adjoint(make_aff1()), T)


def random_vec(rng, n, span=2):
    return [Fraction(rng.randint(-span, span)) for _ in range(n)]


def sympy_rank(m: Matrix) -> int:
    return sympy.Matrix(m.rows, m.cols, lambda i, j: m[i, j]).rank() if m.rows and m.cols else 0


def test_space_shapes():
    dims = (2, 2)
    assert rep_space(dims, 0).dim == 0
    assert rep_space(dims, 1).dim == 4 + 4
    assert op_space(dims, 1).dim == 0
    assert op_space(dims, 2).dim == 2 * 2
    cx = complex_rrb(aff_op())
    assert cx.space(0).dim == 0
    assert cx.space(1).dim == 8


def test_d_ce_basic():
    for alg in (make_aff1(), make_sl2(), make_heis3()):
        ident = endomorphism_cochain((alg.dim, 0), Matrix.identity(alg.dim))
        assert d_ce(alg, ident, 1) == alg.mu()
        assert d_ce(alg, alg.mu(), 2).is_zero()
    aff = make_aff1()
    der = endomorphism_cochain((2, 0), Matrix.from_rows([[0, 0], [0, 1]]))
    assert d_ce(aff, der, 1).is_zero()
    with pytest.raises(ValueError):
        d_ce(aff, Cochain((2, 0)), 0)


@pytest.mark.parametrize("make", [make_aff1, make_sl2, make_heis3])
def test_ce_matrix_rank_matches_oracle(make):
    alg = make()
    cx = complex_ce(alg)
    for n in (1, 2):
        assert rank(cx.matrix(n)) == oracles.ce_matrix(alg.consts, n).rank()


@pytest.mark.parametrize("make", [make_aff1, make_sl2, make_heis3])
def test_ce_betti_matches_oracle(make):
    alg = make()
    cx = complex_ce(alg)
    for n in range(3):
        assert cx.cohomology(n).betti == oracles.ce_betti(alg.consts, n)


@pytest.mark.parametrize("make", [make_aff1, make_sl2, make_heis3])
def test_lierep_d1_rank_matches_oracle(make):
    alg = make()
    d1 = complex_lierep(Representation.adjoint(alg)).matrix(1)
    assert rank(d1) == oracles.lierep_d1_rank_adjoint(alg.consts)


def test_aff1_adjoint_numbers():
    cx = complex_ce(make_aff1())
    assert cx.cohomology(1).betti == 0
    assert cx.cohomology(2).betti == 0
    d1 = build_complex("lierep", Representation.adjoint(make_aff1())).matrix(1)
    assert (d1.rows, d1.cols) == (10, 8)
    assert oracles.lierep_d1_rank_adjoint(make_aff1().consts) == 5
    assert rank(d1) == sympy_rank(d1) == 5


def test_partial_examples():
    rep = Representation.adjoint(make_aff1())
    S = Matrix.from_rows([[1, 2], [0, -1]])
    f = endomorphism_cochain((2, 2), None, S)
    val = partial(rep, f, 1, "both")
    # on (x, v): rho(x) S v - S rho(x) v
    for i in range(2):
        for a in range(2):
            expect = (rep.rho[i] @ S - S @ rep.rho[i]).column(a)
            got = val.on_basis([i, 2 + a])[2:]
            assert got == expect
    assert partial(rep, rep.pi(), 2, "both").is_zero()


def test_delta_examples():
    op = aff_op()
    zero_op = aff_op(Matrix.zeros(2, 2))
    rng = random.Random(1)
    for n in (2, 3):
        sp = op_space((2, 2), n)
        th = sp.from_vec(random_vec(rng, sp.dim))
        assert delta(zero_op, th, n, "both").is_zero()
    assert delta(op, op.cochain(), 2, "both").is_zero()
    # the three sums written out for n = 2 on (e0, e1)
    alg, rep = op.alg, op.rep
    for rows in ([[1, 0], [0, 1]], [[0, 1], [1, 0]], [[2, -1], [3, 1]]):
        Th = Matrix.from_rows(rows)
        val = delta(op, operator_cochain((2, 2), Th), 2, "both")
        v1, v2 = [1, 0], [0, 1]
        T = op.T
        terms = [
            alg.bracket(T @ v1, Th @ v2),
            [-x for x in alg.bracket(T @ v2, Th @ v1)],
            T @ rep.act(Th @ v2, v1),
            [-x for x in T @ rep.act(Th @ v1, v2)],
            [-x for x in Th @ [p - q for p, q in zip(rep.act(T @ v1, v2), rep.act(T @ v2, v1))]],
        ]
        hand = [sum(t[k] for t in terms) for k in range(2)]
        assert val.on_basis([2, 3])[:2] == hand


def test_h_t_examples():
    op = aff_op()
    rng = random.Random(2)
    sp = rep_space((2, 2), 2)
    f = sp.from_vec(random_vec(rng, sp.dim))
    assert h_T(aff_op(Matrix.zeros(2, 2)), f, 2, "both").is_zero()
    assert h_T(op, op.rep.pi(), 2, "both").is_zero()
    mu_only = make_aff1().mu(2)
    assert h_T(op, mu_only, 2, "both").on_basis([2, 3]) == [0] * 4


def test_big_d_degree_one():
    op = aff_op()
    N = Matrix.from_rows([[1, 2], [3, 4]])
    S = Matrix.from_rows([[0, 1], [-1, 2]])
    f = endomorphism_cochain((2, 2), N, S)
    df, dth = big_d(op, (f, Cochain((2, 2))), 1, "both")
    assert df == partial(op.rep, f, 1)
    # the operator part is proportional to T S - N T
    shape = operator_cochain((2, 2), op.T @ S - N @ op.T)
    assert dth == shape or dth == -shape
    assert big_d(op, (Cochain((2, 2)), Cochain((2, 2))), 2) == (Cochain((2, 2)), Cochain((2, 2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_big_d_direct_matches(n):
    op = aff_op(T_NIL)
    rng = random.Random(n)
    sp = complex_rrb(op).space(n)
    for _ in range(5):
        c = sp.from_vec(random_vec(rng, sp.dim))
        assert big_d(op, c, n, "both") == big_d_direct(op, c, n)


def test_omega_examples():
    aff = make_aff1()
    rng = random.Random(3)
    for n in (1, 2):
        sp = ce_space((2, 0), n)
        f = sp.from_vec(random_vec(rng, sp.dim))
        out = omega(RBO(aff, Matrix.identity(2)), f, n, "both")
        assert out == f.scale((-1) ** n * (1 - n))
        assert omega(RBO(aff, Matrix.zeros(2, 2)), f, n, "both").is_zero()
    assert omega(RBO(aff, T0), aff.mu(), 2, "both").is_zero()


def test_d_rb_degree_one():
    rb = RBO(make_aff1(), T0)
    F = Matrix.from_rows([[1, -1], [2, 0]])
    f = endomorphism_cochain((2, 0), F)
    df, dth = d_rb(rb, (f, Cochain((2, 0))), 1, "both")
    assert df == d_ce(rb.alg, f, 1)
    comm = F @ T0 - T0 @ F
    assert dth == endomorphism_cochain((2, 0), comm).scale(-1)


def test_rb_h1_and_kernel():
    rb = RBO(make_aff1(), T0)
    cx = complex_rb(rb)
    h1 = cx.cohomology(1)
    assert h1.betti == 1 == oracles.rb_h1(make_aff1().consts, [[1, 0], [0, 0]])
    # the kernel is spanned by e1 |-> e1
    (f, th) = h1.representatives[0]
    assert set(f.data) == {((1,), 1)}


def test_embed_project_roundtrip():
    rng = random.Random(4)
    for n in (1, 2, 3):
        f = ce_space((2, 0), n).from_vec(random_vec(rng, ce_space((2, 0), n).dim))
        th = ce_space((2, 0), n - 1).from_vec(random_vec(rng, ce_space((2, 0), n - 1).dim)) if n >= 2 else Cochain((2, 0))
        back = project_rb(embed_rb(f, th, n))
        assert back == (f, th)
    bad = (Cochain((2, 2), {((0, 2), 3): 1}), Cochain((2, 2)))
    with pytest.raises(ValueError):
        project_rb(bad)


def test_subcomplex_property():
    rb = RBO(make_aff1(), T_NIL)
    rng = random.Random(5)
    for n in (1, 2, 3):
        sp = complex_rb(rb).space(n)
        f, th = sp.from_vec(random_vec(rng, sp.dim))
        img = big_d(rb.as_relative(), embed_rb(f, th, n), n)
        df, dth = d_rb(rb, (f, th), n, "explicit")
        assert img == embed_rb(df, dth, n + 1)


def test_both_methods_build_every_matrix():
    op = aff_op()
    rb = RBO(make_aff1(), T0)
    for kind, s in [("ce", make_sl2()), ("lierep", op.rep), ("oop", op), ("rrb", op), ("rb", rb)]:
        cx = build_complex(kind, s, "both")
        for n in range(4):
            cx.matrix(n)
    with pytest.raises(ValueError):
        build_complex("nope", op)


@pytest.mark.parametrize("kind", ["ce", "lierep", "oop", "rrb", "rb"])
def test_d_squared_zero(kind):
    op = aff_op()
    s = {"ce": make_sl2(), "lierep": op.rep, "oop": op, "rrb": op, "rb": RBO(make_aff1(), T0)}[kind]
    cx = build_complex(kind, s)
    for n in range(4):
        assert cx.check_d_squared(n)


def test_cohomology_report_invariants():
    cx = complex_rrb(aff_op())
    for n in range(4):
        rep = cx.cohomology(n)
        assert rep.betti == rep.dim_cocycles - rep.dim_coboundaries >= 0
        for v in rep.rep_vectors:
            assert not any(cx.matrix(n) @ v)
        # no nontrivial combination of representatives is a coboundary
        if rep.rep_vectors:
            dprev = cx.matrix(n - 1)
            cols = [dprev.column(j) for j in range(dprev.cols)]
            assert rank(Matrix.from_columns(cx.space(n).dim, cols + rep.rep_vectors)) == rep.dim_coboundaries + rep.betti
    d1 = cx.matrix(1)
    j = next(j for j in range(d1.cols) if any(d1.column(j)))
    with pytest.raises(ValueError):
        cx.class_coordinates(1, [1 if i == j else 0 for i in range(d1.cols)])


def test_les_exact():
    assert les_check("rrb", aff_op(), 3).ok
    assert les_check("rb", RBO(make_aff1(), T0), 3).ok
    rep = les_check("rrb", aff_op(Matrix.zeros(2, 2)), 2)
    assert rep.ok


def conjugate(alg: LieAlgebra, P: sympy.Matrix) -> LieAlgebra:
    """The same Lie algebra written in the basis given by the columns of P."""
    n = alg.dim
    Pi = P.inv()
    br = {}
    for i in range(n):
        for j in range(i + 1, n):
            xi = [P[k, i] for k in range(n)]
            xj = [P[k, j] for k in range(n)]
            v = Pi * sympy.Matrix(alg.bracket(xi, xj))
            vals = {k: Fraction(str(v[k])) for k in range(n) if v[k] != 0}
            if vals:
                br[i, j] = vals
    return LieAlgebra(n, br)


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_betti_basis_independent(vals):
    P = sympy.Matrix(2, 2, vals)
    if P.det() == 0:
        return
    alg2 = conjugate(make_aff1(), P)
    Tm = P.inv() * sympy.Matrix([[1, 0], [0, 0]]) * P
    T2 = Matrix.from_rows([[Fraction(str(Tm[i, j])) for j in range(2)] for i in range(2)])
    op2 = RelativeRBO(Representation.adjoint(alg2), T2)
    a = [complex_rrb(aff_op()).cohomology(n).betti for n in range(3)]
    b = [complex_rrb(op2).cohomology(n).betti for n in range(3)]
    assert a == b
