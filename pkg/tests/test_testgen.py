import json

import pytest

from hypergi.errors import EmptySuite
from hypergi.lang import Delete, Observation, apply_edit, parse
from hypergi.lang.ast import expr_vars
from hypergi.testgen import FunctionalSuite, fail_rate, generate_functional_tests
from hypergi.subjects import load_subject


def test_leakfree_oracle():
    p, policy = load_subject("leakfree")
    suite = generate_functional_tests(p, policy, 10, seed=1)
    assert len(suite) == 10
    assert len({tuple(t.input.items()) for t in suite.tests}) == 10
    for t in suite.tests:
        assert t.expected == Observation.of(t.input["a"] + t.input["b"])
        assert t.input["h"] == 1


def test_small_space_is_enumerated():
    p, policy = load_subject("underflow")
    suite = generate_functional_tests(p, policy, 100, seed=2)
    assert [t.input["pos"] for t in suite.tests] == list(range(16))
    assert all(t.input["h"] == 2 for t in suite.tests)


def test_regeneration_is_identical():
    p, policy = load_subject("triangle")
    a = generate_functional_tests(p, policy, 40, seed=3)
    b = generate_functional_tests(p, policy, 40, seed=3)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    c = generate_functional_tests(p, policy, 40, seed=4)
    assert a.to_json() != c.to_json()


def test_fail_rate_of_original_is_zero():
    for name in ("triangle", "atalk", "underflow"):
        p, policy = load_subject(name)
        assert fail_rate(p, generate_functional_tests(p, policy, 50, seed=5)) == 0.0


def test_constant_variant_fails():
    p, policy = load_subject("leakfree")
    suite = generate_functional_tests(p, policy, 20, seed=6)
    zero = parse("#policy high h : 1..8\n#policy low a : 1..8\n#policy low b : 1..8\nreturn 0;\n")
    assert fail_rate(zero, suite) == 1.0


def test_atalk_fix_keeps_behaviour():
    p, policy = load_subject("atalk")
    suite = generate_functional_tests(p, policy, 200, seed=7)
    pad = next(i for i, s in enumerate(p.statements) if getattr(s, "target", None) == "pad")
    assert fail_rate(apply_edit(p, Delete(pad)), suite) == 0.0


def test_fail_rate_is_exact_fraction():
    p, policy = load_subject("underflow")
    suite = generate_functional_tests(p, policy, 16, seed=8)
    leak = next(i for i, s in enumerate(p.statements) if getattr(s, "expr", None) is not None and "h" in expr_vars(s.expr))
    assert leak == 4
    # positions 4..15 take the secret-dependent branch
    assert fail_rate(apply_edit(p, Delete(leak)), suite) == 12 / 16


def test_json_round_trip_and_errors():
    p, policy = load_subject("triangle")
    suite = generate_functional_tests(p, policy, 5, seed=9)
    data = suite.to_json()
    assert set(data) == {"subject", "seed", "tests"}
    assert set(data["tests"][0]["expected"]) == {"kind", "values"}
    again = FunctionalSuite.from_json(json.loads(json.dumps(data)))
    assert again.tests == suite.tests
    with pytest.raises(EmptySuite):
        fail_rate(p, FunctionalSuite([], 0, "x"))
    with pytest.raises(ValueError):
        generate_functional_tests(p, policy, 0, seed=1)
