import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import make_aff1, make_heis3, make_sl2
from rbx.fileformat import example
from rbx.foundation import Matrix, graded_sym_basis
from rbx.homotopy import (
    SYM, SYMTENSOR, DGLieAlgebra, GradedMap, GradedSpace, HomotopyRBO, LinftyAlgebra,
    PreLieInfty, VData, adjoint_rep, bigger_linfty, derived_bracket, derived_brackets,
    derived_jacobi_defect, desuspend_lie, desuspend_prelie, desuspend_rbo, desuspend_rep,
    exp_twist, graded_mc_diagonal, graded_mn_bracket, graded_nr_bracket, h_projection,
    identity_is_strict_rbo, invertible_correspondence, left_mult_rep, mc_series, phi, quillen,
    semidirect, solve_prelie_family, strict_rbo_to_prelie, subadjacent, twist_by_T, twist_report,
    vdata_from_rep, verify_homotopy_rbo, verify_linfty, verify_linfty_rep, verify_prelie,
)
from rbx.nrcore import courant_bracket, operator_cochain
from rbx.structures import (
    LieAlgebra, RelativeRBO, Representation, mc_check, prelie_from_rbo, subadjacent_lie, verify_lie,
    verify_relative_rbo, verify_rep,
)

T0 = Matrix.from_rows([[1, 0], [0, 0]])


def rand_map(rng, sp, weights, deg, flavor=SYM, density=0.5, ins_filter=None, out_filter=None):
    data = {}
    for k in weights:
        if flavor == SYM:
            keys = graded_sym_basis(k, sp.degrees)
        else:
            keys = [s + (l,) for s in graded_sym_basis(k - 1, sp.degrees) for l in range(sp.dim)]
        for t in keys:
            if ins_filter and not ins_filter(t):
                continue
            for o in range(sp.dim):
                if out_filter and not out_filter(o):
                    continue
                if sp.degrees[o] - sum(sp.degrees[i] for i in t) == deg and rng.random() < density:
                    data[t, o] = rng.randint(-2, 2)
    return GradedMap(sp, data, flavor)


def two_term():
    return GradedSpace([-1, 0])


# -- graded spaces and maps ------------------------------------------------


def test_graded_space_basics():
    sp = GradedSpace.from_dims({0: 2, -1: 1})
    assert sp.degrees == [-1, 0, 0]
    assert sp.dim == 3 and sp.dims() == {-1: 1, 0: 2}
    assert sp.shift(-1).degrees == [-2, -1, -1]
    assert sp.direct_sum(GradedSpace([1])).degrees == [-1, 0, 0, 1]


def test_graded_symmetry_of_values():
    sp = GradedSpace([-1, 0, 1])
    f = GradedMap.from_values(sp, [((1, 0), 0, 1)])
    # x1 (deg 0) past x0 (deg -1): sign +1
    assert f.on_basis([0, 1]) == {0: 1}
    g = GradedMap.from_values(sp, [((2, 0), 1, 1)])
    # both odd: the swap costs a sign
    assert g.on_basis([0, 2]) == {1: -1}
    assert GradedMap.from_values(sp, [((0, 0), 1, 1)]).is_zero()


def test_degree_bookkeeping():
    sp = GradedSpace([-1, 0, 1])
    f = GradedMap(sp, {((0, 1), 2): 1})
    assert f.degree() == 1 - (-1 + 0)
    mixed = f + GradedMap(sp, {((1,), 1): 1})
    assert mixed.degree() is None and sorted(mixed.degrees()) == [0, 2]


# -- brackets --------------------------------------------------------------


def test_weight_one_commutator():
    rng = random.Random(0)
    sp = GradedSpace([-1, 0, 0, 1])
    for _ in range(10):
        df, dg = rng.randint(-1, 1), rng.randint(-1, 1)
        f, g = rand_map(rng, sp, [1], df), rand_map(rng, sp, [1], dg)
        F = Matrix(sp.dim, sp.dim, {(o, t[0]): v for (t, o), v in f.data.items()})
        G = Matrix(sp.dim, sp.dim, {(o, t[0]): v for (t, o), v in g.data.items()})
        comm = F @ G - (G @ F).scale(-1 if df * dg % 2 else 1)
        br = graded_nr_bracket(f, g)
        assert Matrix(sp.dim, sp.dim, {(o, t[0]): v for (t, o), v in br.data.items()}) == comm
        brm = graded_mn_bracket(GradedMap(sp, f.data, SYMTENSOR), GradedMap(sp, g.data, SYMTENSOR))
        assert Matrix(sp.dim, sp.dim, {(o, t[0]): v for (t, o), v in brm.data.items()}) == comm


@given(st.integers(0, 10**6))
def test_graded_nr_lie_axioms(seed):
    rng = random.Random(seed)
    sp = GradedSpace([-1, 0, 1])
    degs = [rng.randint(-1, 1) for _ in range(3)]
    f, g, h = (rand_map(rng, sp, [1, 2], d, density=0.4) for d in degs)
    sgn = -1 if degs[0] * degs[1] % 2 else 1
    assert graded_nr_bracket(g, f) == graded_nr_bracket(f, g).scale(-sgn)
    lhs = graded_nr_bracket(f, graded_nr_bracket(g, h))
    rhs = graded_nr_bracket(graded_nr_bracket(f, g), h) + graded_nr_bracket(g, graded_nr_bracket(f, h)).scale(sgn)
    assert lhs == rhs


@given(st.integers(0, 10**6))
def test_graded_mn_lie_axioms(seed):
    rng = random.Random(seed)
    sp = two_term()
    degs = [rng.randint(0, 1) for _ in range(3)]
    f, g, h = (rand_map(rng, sp, [1, 2], d, SYMTENSOR, density=0.5) for d in degs)
    a, b = degs[0], degs[1]
    assert graded_mn_bracket(g, f) == graded_mn_bracket(f, g).scale(-((-1) ** (a * b)))
    lhs = graded_mn_bracket(f, graded_mn_bracket(g, h))
    rhs = graded_mn_bracket(graded_mn_bracket(f, g), h) + graded_mn_bracket(g, graded_mn_bracket(f, h)).scale((-1) ** (a * b))
    assert lhs == rhs


@given(st.integers(0, 10**6))
def test_phi_homomorphism(seed):
    rng = random.Random(seed)
    sp = two_term()
    a, b = rng.randint(0, 1), rng.randint(0, 1)
    f = rand_map(rng, sp, [1, 2, 3], a, SYMTENSOR)
    g = rand_map(rng, sp, [1, 2], b, SYMTENSOR)
    assert phi(graded_mn_bracket(f, g)) == graded_nr_bracket(phi(f), phi(g))


def test_phi_examples():
    sp = two_term()
    assert phi(GradedMap.zero(sp, SYMTENSOR)).is_zero()
    # classical binary product in degree -1: Phi gives x |> y - y |> x
    table = prelie_from_rbo(RelativeRBO(Representation.adjoint(make_aff1()), T0))
    pre = desuspend_prelie(table)
    sub = phi(pre.r)
    assert sub.on_basis([0, 1]) == {1: 1}
    assert sub == desuspend_lie(subadjacent_lie(table)).l


def test_phi_requires_symtensor():
    with pytest.raises(ValueError):
        phi(GradedMap.zero(two_term(), SYM))


# -- L-infinity algebras and representations -------------------------------


def test_verify_linfty_examples():
    assert verify_linfty(LinftyAlgebra(GradedSpace([-1, 0]))).ok
    for make in (make_aff1, make_sl2, make_heis3):
        assert verify_linfty(desuspend_lie(make())).ok
    broken = LieAlgebra(3, {(0, 1): {0: 1}, (0, 2): {1: 1}, (1, 2): {0: 1}})
    assert not verify_linfty(desuspend_lie(broken)).ok


@given(st.integers(0, 10**6))
def test_jacobi_routes_agree_on_random_brackets(seed):
    # verify_linfty raises if the shuffle-sum route and the NR route disagree
    rng = random.Random(seed)
    sp = GradedSpace([-1, 0, 1][: rng.randint(2, 3)])
    l = rand_map(rng, sp, [1, 2, 3], 1, density=0.4)
    rep = verify_linfty(LinftyAlgebra(sp, l), max_arity=4)
    br = graded_nr_bracket(l, l)
    assert rep.ok == all(not br.component(k) for k in range(1, 5))


def test_quillen_two_term():
    dg = DGLieAlgebra(GradedSpace([0, 1]), {(0, 1): {1: 1}}, {0: {1: 1}})
    L = quillen(dg)
    assert L.space.degrees == [-1, 0]
    assert verify_linfty(L).ok
    assert graded_nr_bracket(L.l, L.l).is_zero()
    with pytest.raises(ValueError):
        DGLieAlgebra(GradedSpace([0, 1]), {(0, 1): {0: 1}})


def test_reps_and_semidirect():
    for make in (make_aff1, make_sl2):
        rep = desuspend_rep(Representation.adjoint(make()))
        assert verify_linfty_rep(rep).ok
        assert verify_linfty(semidirect(rep)).ok
    zero = desuspend_rep(Representation.trivial(make_aff1(), 2))
    sd = semidirect(zero)
    assert sd.l == GradedMap(sd.space, dict(desuspend_lie(make_aff1()).l.data))
    badrep = Representation(make_aff1(), 2, [Matrix.from_rows([[1, 0], [0, 0]]), Matrix.from_rows([[0, 0], [1, 0]])])
    assert not verify_rep(badrep).ok
    assert not verify_linfty_rep(desuspend_rep(badrep)).ok
    L = example("dgla-2term").graded.linfty
    assert verify_linfty_rep(adjoint_rep(L)).ok


# -- V-data and derived brackets --------------------------------------------


def test_vdata_and_derived_brackets():
    rep = desuspend_rep(Representation.adjoint(make_aff1()))
    vd = vdata_from_rep(rep)
    rng = random.Random(1)
    samples = [rand_map(rng, rep.W, [1, 2], d) for d in (-1, 0, 1)]
    assert vd.check(samples).ok
    T = desuspend_rbo(RelativeRBO(Representation.adjoint(make_aff1()), T0)).T
    assert vd.in_h(T)
    assert derived_brackets(vd, 1, [T]) == vd.P(graded_nr_bracket(vd.Delta, T))
    with pytest.raises(ValueError):
        derived_bracket(vd, [rep.delta()])
    with pytest.raises(ValueError):
        derived_brackets(vd, 2, [T])
    zero_vd = VData(rep.W, vd.P, GradedMap.zero(rep.W))
    assert derived_bracket(zero_vd, [T, T]).is_zero()


def test_derived_bracket_matches_classical():
    ad = Representation.adjoint(make_aff1())
    rng = random.Random(2)
    for _ in range(6):
        T = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
        hop = desuspend_rbo(RelativeRBO(ad, T))
        vd = vdata_from_rep(hop.rep)
        classical = courant_bracket(operator_cochain((2, 2), T), operator_cochain((2, 2), T), ad.pi())
        assert derived_bracket(vd, [hop.T, hop.T]) == GradedMap(vd.space, dict(classical.data))


def test_derived_jacobi():
    rep = adjoint_rep(example("dgla-2term").graded.linfty)
    vd = vdata_from_rep(rep)
    rng = random.Random(3)
    P = vd.P
    for n in (1, 2, 3):
        xs = [P(rand_map(rng, rep.W, [1, 2], rng.randint(-1, 1))) for _ in range(n)]
        xs = [x for x in xs if x.degree() is not None]
        if len(xs) == n:
            assert derived_jacobi_defect(vd, xs).is_zero()


def test_bigger_linfty():
    rep = desuspend_rep(Representation.adjoint(make_aff1()))
    W = rep.W
    vd = VData(W, h_projection(W, 2), GradedMap.zero(W))
    big = bigger_linfty(vd)
    x = desuspend_lie(make_aff1()).l
    x = GradedMap(W, dict(x.data))
    f, a = big.bracket([(x, GradedMap.zero(W)), (x, GradedMap.zero(W))])
    # l_2(s^-1 x, s^-1 x) = (-1)^{|x|} [x, x] with |x| = 1
    assert f == -graded_nr_bracket(x, x) and a.is_zero()
    vd2 = vdata_from_rep(rep)
    with pytest.raises(ValueError):
        bigger_linfty(vd2, in_lprime=lambda k: False, basis=[GradedMap(W, {((0,), 0): 1})])


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_graded_mc_diagonal_matches_mc_check(vals):
    T = Matrix.from_rows([vals[:2], vals[2:]])
    ad = Representation.adjoint(make_aff1())
    g = graded_mc_diagonal(ad, T)
    c = mc_check(ad, T)
    assert g == {"lierep": c.checks["lierep"], "operator": c.checks["operator"]}


def test_graded_mc_diagonal_broken_bracket():
    broken = LieAlgebra(3, {(0, 1): {0: 1}, (0, 2): {1: 1}, (1, 2): {0: 1}})
    rep = Representation(broken, 0, [Matrix.zeros(0, 0)] * 3)
    assert graded_mc_diagonal(rep, Matrix.zeros(3, 0)) == {"lierep": False, "operator": True}


# -- homotopy Rota-Baxter operators -----------------------------------------


def test_hrbo_trivial_cases():
    rep = desuspend_rep(Representation.adjoint(make_aff1()))
    assert verify_homotopy_rbo(HomotopyRBO(rep, {})).ok
    ab = desuspend_rep(Representation.trivial(LieAlgebra.abelian(2), 2))
    rng = random.Random(4)
    for _ in range(5):
        T = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
        assert verify_homotopy_rbo(HomotopyRBO.from_matrix(ab, T)).ok


def test_hrbo_classical_dictionary():
    ad = Representation.adjoint(make_aff1())
    for vals in itertools.product([-1, 0, 1], repeat=4):
        T = Matrix.from_rows([vals[:2], vals[2:]])
        op = RelativeRBO(ad, T)
        h = verify_homotopy_rbo(desuspend_rbo(op))
        assert h.ok == verify_relative_rbo(op).ok
        if not h.ok:
            assert h.checks["direct"][1] and not h.checks["direct"][2]


def test_hrbo_p_max_guard():
    op = desuspend_rbo(RelativeRBO(Representation.adjoint(make_aff1()), T0))
    bound = op.certified_bound()
    verify_homotopy_rbo(op, bound)
    with pytest.raises(ValueError):
        verify_homotopy_rbo(op, bound + 1)


def test_hrbo_non_strict_registry_example():
    hop = example("dgla-2term").graded.op
    assert not hop.is_strict()
    rep = verify_homotopy_rbo(hop)
    assert rep.ok and all(rep.checks["mc"].values())
    assert twist_report(hop).ok


def test_hrbo_direct_vs_mc_random():
    rng = random.Random(5)
    rep = example("dgla-2term").graded.rep
    V = rep.vspace
    g = rep.alg.space
    for _ in range(15):
        T = {}
        for k in (1, 2, 3):
            for t in graded_sym_basis(k, V.degrees):
                for o in range(g.dim):
                    if g.degrees[o] == sum(V.degrees[i] for i in t) and rng.random() < 0.5:
                        T[t, o] = rng.randint(-1, 1)
        # verify_homotopy_rbo raises when the direct and MC routes disagree
        r = verify_homotopy_rbo(HomotopyRBO(rep, T))
        assert r.checks["direct"] == r.checks["mc"]


def test_exp_twist_nilpotent():
    op = example("dgla-2term").graded.op
    D = op.rep.delta()
    e = exp_twist(D, op.T)
    assert mc_series(op) == vdata_from_rep(op.rep).P(e - D)


def test_twist_classical_subadjacent():
    op = RelativeRBO(Representation.adjoint(make_aff1()), T0)
    tw = twist_by_T(desuspend_rbo(op))
    assert tw.l == desuspend_lie(subadjacent_lie(prelie_from_rbo(op))).l
    assert twist_report(desuspend_rbo(op)).ok
    # T = 0: only the restriction of the action survives
    rep = desuspend_rep(Representation.adjoint(make_aff1()))
    z = twist_by_T(HomotopyRBO(rep, {}))
    assert z.l.is_zero()


# -- pre-Lie infinity --------------------------------------------------------


def test_zero_prelie():
    p = PreLieInfty(two_term())
    assert verify_prelie(p).ok
    assert subadjacent(p).l.is_zero()
    assert identity_is_strict_rbo(p).ok


def test_classical_prelie_graded():
    op = RelativeRBO(Representation.adjoint(make_aff1()), T0)
    pre = desuspend_prelie(prelie_from_rbo(op))
    assert verify_prelie(pre).ok
    assert subadjacent(pre).l == desuspend_lie(subadjacent_lie(prelie_from_rbo(op))).l
    assert verify_linfty_rep(left_mult_rep(pre)).ok
    assert identity_is_strict_rbo(pre).ok


def test_prelie_with_ternary_product():
    pre = example("prelie-r3").graded.prelie
    assert pre.r.component(3)
    assert verify_prelie(pre).ok
    assert verify_linfty(subadjacent(pre)).ok
    assert verify_linfty_rep(left_mult_rep(pre)).ok
    assert identity_is_strict_rbo(pre).ok


def test_solver_finds_ternary_solution():
    sp = GradedSpace([-1, 0, 1])
    gens = [
        GradedMap(sp, {((0,), 1): 1}, SYMTENSOR),
        GradedMap(sp, {((0, 1), 1): 1}, SYMTENSOR),
        GradedMap(sp, {((1, 0), 1): 1}, SYMTENSOR),
        GradedMap(sp, {((0, 1, 1), 1): 1}, SYMTENSOR),
    ]
    sols = solve_prelie_family(sp, gens, grid=(0, 1), require=lambda c: c[3] != 0)
    assert (1, 1, 1, 1) in sols
    for c in sols:
        r = GradedMap.zero(sp, SYMTENSOR)
        for ci, g in zip(c, gens):
            r = r + g.scale(ci)
        assert graded_mn_bracket(r, r).is_zero()


def test_non_prelie_rejected():
    sp = two_term()
    # r_1 = d with d(x0) = x1, plus a binary product that d does not differentiate
    r = GradedMap(sp, {((0,), 1): 1, ((0, 1), 1): 1}, SYMTENSOR)
    p = PreLieInfty(sp, r)
    assert not verify_prelie(p).ok
    with pytest.raises(ValueError):
        subadjacent(p)
    with pytest.raises(ValueError):
        PreLieInfty(sp, GradedMap(sp, {((0,), 0): 1}, SYMTENSOR))


def test_strict_rbo_to_prelie():
    ad = Representation.adjoint(make_aff1())
    op = RelativeRBO(ad, T0)
    pre = strict_rbo_to_prelie(desuspend_rbo(op))
    assert pre.r == desuspend_prelie(prelie_from_rbo(op)).r
    zero = strict_rbo_to_prelie(HomotopyRBO(desuspend_rep(ad), {}))
    assert zero.r.is_zero()
    with pytest.raises(ValueError):
        strict_rbo_to_prelie(example("dgla-2term").graded.op)
    with pytest.raises(ValueError):
        strict_rbo_to_prelie(desuspend_rbo(RelativeRBO(ad, Matrix.from_rows([[0, 0], [0, 1]]))))


def test_invertible_correspondence_roundtrip():
    pre = example("prelie-r3").graded.prelie
    rep = left_mult_rep(pre)
    op = HomotopyRBO.from_matrix(rep, Matrix.identity(pre.space.dim))
    back = invertible_correspondence(op)
    assert back.r == pre.r
    assert phi(back.r) == subadjacent(pre).l
    with pytest.raises(ValueError):
        invertible_correspondence(HomotopyRBO(rep, {}))


# -- desuspension round trip -------------------------------------------------


@pytest.mark.parametrize("name", ["abelian-3", "aff1", "aff1-T0", "aff1-nil", "heis3", "sl2", "sl2-r-he"])
def test_desuspension_preserves_verdicts(name):
    s = example(name)
    assert verify_linfty(desuspend_lie(s.alg)).ok == verify_lie(s.alg).ok
    rep = s.representation()
    assert verify_linfty_rep(desuspend_rep(rep)).ok == verify_rep(rep).ok
    if s.T is not None:
        op = s.relative()
        assert verify_homotopy_rbo(desuspend_rbo(op)).ok == verify_relative_rbo(op).ok
