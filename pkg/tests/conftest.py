import random
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from rbx.foundation import Matrix
from rbx.structures import LieAlgebra, RBO, RelativeRBO, Representation

settings.register_profile(
    "exact",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def make_aff1() -> LieAlgebra:
    return LieAlgebra(2, {(0, 1): {1: 1}}, name="aff1")


def make_sl2() -> LieAlgebra:
    # basis h, e, f
    return LieAlgebra(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, name="sl2")


def make_heis3() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): {2: 1}}, name="heis3")


T0_ROWS = [[1, 0], [0, 0]]


@pytest.fixture
def aff1():
    return make_aff1()


@pytest.fixture
def sl2():
    return make_sl2()


@pytest.fixture
def heis3():
    return make_heis3()


@pytest.fixture
def aff1_T0():
    alg = make_aff1()
    return RelativeRBO(Representation.adjoint(alg), Matrix.from_rows(T0_ROWS))


@pytest.fixture
def aff1_rb():
    return RBO(make_aff1(), Matrix.from_rows(T0_ROWS))


@pytest.fixture
def rng():
    return random.Random(20261016)


def rand_frac(rng: random.Random, span: int = 2) -> Fraction:
    return Fraction(rng.randint(-span, span))


def random_cochain(dims, arity, rng: random.Random, nnz: int = 5, span: int = 3):
    """A sparse random cochain of the given arity on g (+) V."""
    import itertools

    from rbx.nrcore import Cochain

    n = dims[0] + dims[1]
    keys = list(itertools.combinations(range(n), arity))
    data = {}
    if not keys:
        return Cochain(dims)
    for _ in range(nnz):
        data[rng.choice(keys), rng.randrange(n)] = Fraction(rng.randint(-span, span))
    return Cochain(dims, data)
