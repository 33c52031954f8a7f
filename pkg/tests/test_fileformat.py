import json
from fractions import Fraction

import pytest

from rbx.bialgebra import Polyvector, cybe_check
from rbx.fileformat import (
    REGISTRY_NAMES, ParseError, dumps, emit, example, examples_registry, load, loads, parse,
)
from rbx.homotopy import verify_homotopy_rbo, verify_linfty, verify_linfty_rep, verify_prelie
from rbx.structures import verify_lie, verify_relative_rbo, verify_rep


def _same(a, b):
    assert emit(a) == emit(b)


@pytest.mark.parametrize("name", REGISTRY_NAMES)
def test_round_trip(name, tmp_path):
    s = example(name)
    text = dumps(s)
    _same(loads(text), s)
    p = tmp_path / f"{name}.json"
    p.write_text(text)
    _same(load(str(p)), s)


@pytest.mark.parametrize("name", REGISTRY_NAMES)
def test_registry_entries_verify(name):
    s = example(name)
    if s.alg is not None:
        assert verify_lie(s.alg).ok
        assert verify_rep(s.representation()).ok
    if s.T is not None:
        assert verify_relative_rbo(s.relative()).ok
    if s.r is not None:
        assert cybe_check(s.alg, s.r).ok
    g = s.graded
    if g is not None:
        if g.linfty is not None:
            assert verify_linfty(g.linfty).ok
        if g.rep is not None:
            assert verify_linfty_rep(g.rep).ok
        if g.op is not None:
            assert verify_homotopy_rbo(g.op).ok
        if g.prelie is not None:
            assert verify_prelie(g.prelie).ok


def test_registry_listing():
    assert [s.name for s in examples_registry()] == REGISTRY_NAMES
    with pytest.raises(KeyError):
        example("no-such-thing")


def test_abelian_family():
    s = example("abelian-5")
    assert s.alg.dim == 5 and not any(any(v.values()) for v in s.alg.brackets().values())


def test_specific_entries():
    s = example("sl2-r-he")
    assert s.r == Polyvector.basis(3, 0, 1)
    t = example("aff1-T0")
    assert t.T.to_rows() == [[1, 0], [0, 0]]
    assert not example("dgla-2term").graded.op.is_strict()
    assert example("prelie-r3").graded.prelie.r.component(3)


def test_rationals_as_strings():
    s = loads('{"lie": {"dim": 2, "brackets": {"[0,1]": {"1": "1/2"}}}}')
    assert s.alg.brackets()[0, 1][1] == Fraction(1, 2)
    assert '"1/2"' in dumps(s)


@pytest.mark.parametrize("text", [
    '{"lie": {"dim": 2, "brackets": {"[0,1]": {"1": 0.5}}}}',
    '{"lie": {"dim": 2, "brackets": {"[0,1]": {"1": 1.0}}}}',
    '{"lie": {"dim": 2, "brackets": {"[0,2]": {"1": 1}}}}',
    '{"lie": {"dim": 2, "brackets": {"0,1": {"1": 1}}}}',
    '{"lie": {"dim": 2}, "operator": [[1, 0]]}',
    '{"lie": {"dim": 2}, "rep": {"kind": "matrices", "dim": 1, "matrices": [[[1]]]}}',
    '{"lie": {"dim": 2}, "rep": {"kind": "weird"}}',
    '{"format": 7}',
    '{"field": "real"}',
    '{"operator": [[1]]}',
    '[1, 2]',
    '{"lie": ',
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        loads(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        loads('{"lie": {"dim": 2, "brackets": {"[0,1]": {"1": 0.25}}}}')
    assert "$.lie.brackets" in str(e.value)


def test_emit_is_json_with_no_floats():
    for s in examples_registry():
        text = json.dumps(emit(s))

        def walk(x):
            assert not isinstance(x, float)
            if isinstance(x, dict):
                for v in x.values():
                    walk(v)
            elif isinstance(x, list):
                for v in x:
                    walk(v)
        walk(json.loads(text))
        _same(parse(json.loads(text)), s)
