import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypergi.errors import EditError, ParseError, PolicyError
from hypergi.lang import (
    ERR,
    NORET,
    TIMEOUT,
    CopyOf,
    Delete,
    Insert,
    NewFor,
    NewIf,
    Observation,
    Replace,
    SynthAssign,
    apply_edit,
    edit_from_json,
    edit_to_json,
    execute,
    list_statements,
    parse,
    render,
    runner,
)
from hypergi.subjects import load_subject, subject_names

from strategies import bindings, programs


def run_both(p, binding, budget=10_000):
    walked = execute(p, binding, budget)
    compiled = runner(p)(*(binding[n] for n in p.input_names), budget=budget)
    assert walked == compiled
    return walked


# --- parse -----------------------------------------------------------------


def test_parse_minimal_subject():
    p = parse("#policy high h : 1..8\n#policy low a : 1..8\nreturn a;\n")
    assert len(p.policy.high_inputs) == 1
    assert len(p.policy.low_inputs) == 1
    assert list_statements(p) == [0]
    assert p.policy.canonical_secret == {"h": 1}


@pytest.mark.parametrize(
    "policy, fragment",
    [
        ("#policy high h : 8..1\n#policy low a : 1..8\n", "empty domain"),
        ("#policy high h : 1..8\n#policy low h : 1..8\n", "duplicate"),
        ("#policy secret h : 1..8\n#policy low a : 1..8\n", "unknown role"),
        ("#policy low a : 1..8\n", "missing high"),
        ("#policy high h : 1..8\n", "missing low"),
        ("#policy high h 1..8\n#policy low a : 1..8\n", "malformed"),
    ],
)
def test_policy_errors(policy, fragment):
    with pytest.raises(PolicyError, match=fragment):
        parse(policy + "return 0;\n")


@pytest.mark.parametrize(
    "body, line, col",
    [
        ("x = ;", 3, 5),
        ("if (a) { x = 1;", 3, 16),
        ("return a\n", 4, 1),
        ("x = 1 $ 2;", 3, 7),
        ("for i in 1 { }", 3, 12),
    ],
)
def test_parse_error_positions(prog, body, line, col):
    with pytest.raises(ParseError) as info:
        prog(body)
    assert (info.value.line, info.value.col) == (line + 1, col)


def test_spans_and_comments(prog):
    p = prog("// leading comment\nx = 1; // trailing\n  return x;\n")
    assert [s.span for s in p.statements] == [(5, 1), (6, 3)]


def test_precedence(prog):
    p = prog("return 1 + 2 * 3, (1 + 2) * 3, 7 - 2 - 1, 0 || 1 && 0, -2 * 3, 2 < 3 == 1;")
    assert execute(p, {"h": 0, "a": 0, "b": 0}) == Observation.of(7, 9, 4, 0, -6, 1)


def test_triangle_statement_count():
    p, policy = load_subject("triangle")
    assert len(p.input_names) == 3
    assert len(p.statements) == 8
    assert list_statements(p) == list(range(8))


def test_preorder_ids(prog):
    p = prog("if (a == b) { x = 1; } return x;")
    kinds = [type(s).__name__ for s in p.statements]
    assert list_statements(p) == [0, 1, 2]
    assert kinds == ["If", "Assign", "Return"]


# --- render ----------------------------------------------------------------


@pytest.mark.parametrize("name", subject_names())
def test_render_round_trip_subjects(name):
    p, _ = load_subject(name)
    text = render(p)
    assert parse(text, name=name) == p
    assert render(p) == text


def test_render_negative_literals(prog):
    p = prog("x = -5; y = -(5); z = a - -3; w = -(-2); return -9223372036854775808;")
    assert parse(render(p), name=p.name) == p
    assert execute(p, {"h": 0, "a": 0, "b": 0}) == Observation.of(-(2**63))


@settings(max_examples=300, deadline=None)
@given(programs)
def test_render_round_trip_random(p):
    assert parse(render(p), name=p.name) == p


# --- execute ---------------------------------------------------------------


def test_triangle_hand_traces():
    p, _ = load_subject("triangle")
    assert run_both(p, {"h": 3, "a": 3, "b": 3}) == Observation.of(3)
    assert run_both(p, {"h": 5, "a": 3, "b": 4}) == Observation.of(1)
    assert run_both(p, {"h": 4, "a": 3, "b": 4}) == Observation.of(2)


def test_division_by_zero_is_err(prog):
    assert run_both(prog("x = 1/0; return x;"), {"h": 1, "a": 1, "b": 1}) == Observation(ERR)
    assert run_both(prog("return a % (b - b);"), {"h": 1, "a": 1, "b": 1}) == Observation(ERR)


def test_missing_return_is_noret(prog):
    assert run_both(prog("y = a;"), {"h": 1, "a": 1, "b": 1}) == Observation(NORET)


def test_unassigned_reads_zero(prog):
    assert run_both(prog("return q + 1;"), {"h": 1, "a": 1, "b": 1}) == Observation.of(1)


def test_step_budget_timeout(prog):
    p = prog("for i in 1 .. 1000000 { x = x + 1; } return x;")
    assert run_both(p, {"h": 1, "a": 1, "b": 1}, budget=100) == Observation(TIMEOUT)
    # loop entry (1) + 3 iterations x (tick + body) + return
    q = prog("for i in 1 .. 3 { x = x + i; } return x;")
    assert run_both(q, {"h": 1, "a": 1, "b": 1}, budget=8) == Observation.of(6)
    assert run_both(q, {"h": 1, "a": 1, "b": 1}, budget=7) == Observation(TIMEOUT)


def test_wrapping_arithmetic(prog):
    p = prog("return a * 9223372036854775807, 9223372036854775807 + 1, -9223372036854775808 / -1;")
    assert run_both(p, {"h": 0, "a": 2, "b": 0}) == Observation.of(-2, -(2**63), -(2**63))


def test_c_style_division(prog):
    p = prog("return a / b, a % b, -a / b, -a % b, a / -b;")
    assert run_both(p, {"h": 0, "a": 7, "b": 2}) == Observation.of(3, 1, -3, -1, -3)


def test_short_circuit(prog):
    p = prog("return a != 0 && 1 / a, a == 0 || 1 / a;")
    assert run_both(p, {"h": 0, "a": 0, "b": 0}) == Observation.of(0, 1)
    q = prog("return a == 0 && 1 / a;")
    assert run_both(q, {"h": 0, "a": 0, "b": 0}) == Observation(ERR)


def test_loop_bounds_evaluated_once(prog):
    p = prog("n = 3; for i in 1 .. n { n = n + 1; c = c + 1; } return c, i, n;")
    assert run_both(p, {"h": 0, "a": 0, "b": 0}) == Observation.of(3, 3, 6)


def test_missing_input_rejected(prog):
    with pytest.raises(ValueError):
        execute(prog("return a;"), {"a": 1})


@settings(max_examples=300, deadline=None)
@given(programs, bindings)
def test_compiled_matches_walker(p, binding):
    first = run_both(p, binding, budget=200)
    assert execute(p, binding, 200) == first


def test_observation_order():
    obs = [Observation(TIMEOUT), Observation.of(2), Observation(ERR), Observation.of(1, 5), Observation(NORET)]
    assert sorted(obs) == [Observation.of(1, 5), Observation.of(2), Observation(ERR), Observation(NORET), Observation(TIMEOUT)]


# --- edits -----------------------------------------------------------------


def test_delete_last_return_gives_noret():
    p, policy = load_subject("triangle")
    q = apply_edit(p, Delete(7))
    assert len(q.statements) == 7
    assert execute(q, {"h": 5, "a": 3, "b": 4}) == Observation(NORET)
    assert execute(q, {"h": 3, "a": 3, "b": 3}) == Observation.of(3)
    assert len(p.statements) == 8  # original untouched


def test_delete_only_return_gives_noret_everywhere():
    p, policy = load_subject("locdemo")
    q = apply_edit(p, Delete(2))
    grid = [{"h": h, "a": a, "b": b} for h in range(1, 5) for a in range(1, 5) for b in range(1, 5)]
    assert {execute(q, g) for g in grid} == {Observation(NORET)}


def test_delete_removes_subtree_and_renders_without_it():
    p, _ = load_subject("triangle")
    q = apply_edit(p, Delete(3))
    assert len(q.statements) == 4
    assert "if" not in render(q)


def test_replace_identity():
    p, _ = load_subject("triangle")
    for i in range(len(p.statements)):
        assert apply_edit(p, Replace(i, i)) == p


def test_insert_copies_donor(prog):
    p = prog("x = a; y = b; return x, y;")
    q = apply_edit(p, Insert(0, 2))
    assert render(q).count("x = a;") == 2
    assert len(q.statements) == 4


def test_new_if_counts(prog):
    p = prog("x = a; return x;")
    q = apply_edit(p, NewIf("a", "<", "b", SynthAssign("x", 0), 1))
    assert len(q.statements) == len(p.statements) + 2
    assert "if (a < b) {\n  x = 0;\n}" in render(q)


def test_new_if_before_first_statement(prog):
    p = prog("x = a; return x;")
    with pytest.raises(EditError):
        # x is not yet assigned at statement 0
        apply_edit(p, NewIf("a", "==", "b", SynthAssign("x", 0), 0))
    q = apply_edit(p, NewIf("a", "==", "b", CopyOf(0), 0))
    assert len(q.statements) == 4


def test_new_for(prog):
    p = prog("x = 0; y = 1; return x;")
    q = apply_edit(p, NewFor("x", 3, SynthAssign("y", "x"), 2))
    assert "for x in 1 .. 3 {\n  y = x;\n}" in render(q)
    assert execute(q, {"h": 0, "a": 0, "b": 0}) == Observation.of(3)


@pytest.mark.parametrize(
    "edit",
    [
        Delete(9),
        Replace(0, 9),
        Insert(9, 0),
        NewIf("nope", "==", "a", CopyOf(0), 1),
        NewIf("a", "=~", "a", CopyOf(0), 1),
        NewIf("a", "==", "a", CopyOf(9), 1),
        NewIf("a", "==", "a", SynthAssign("h", 0), 1),
        NewIf("a", "==", "a", SynthAssign("x", 2), 1),
        NewFor("h", 2, CopyOf(0), 1),
        NewFor("x", 5, CopyOf(0), 1),
        NewFor("x", 2, SynthAssign("x", "later"), 1),
    ],
)
def test_invalid_edits(prog, edit):
    p = prog("x = a; later = 1; return x;")
    with pytest.raises(EditError):
        apply_edit(p, edit)


def test_nested_target(prog):
    p = prog("if (a) { x = 1; } else { y = 2; z = 3; } return x;")
    q = apply_edit(p, Delete(3))
    assert render(q).count("=") == 2
    r = apply_edit(p, Replace(1, 3))
    assert "if (a) {\n  z = 3;\n} else" in render(r)


@pytest.mark.parametrize(
    "edit",
    [Delete(1), Replace(2, 0), Insert(1, 2), NewIf("a", ">=", "x", CopyOf(0), 2),
     NewFor("x", 4, SynthAssign("x", 1), 1)],
)
def test_edit_json_round_trip(edit):
    assert edit_from_json(edit_to_json(edit)) == edit


@settings(max_examples=200, deadline=None)
@given(programs, st.lists(st.tuples(st.integers(0, 4), st.integers(0, 20), st.integers(0, 20)), max_size=6))
def test_edits_preserve_round_trip(p, ops):
    for kind, i, j in ops:
        n = len(p.statements)
        if n == 0:
            break
        edit = [Delete(i % n), Replace(i % n, j % n), Insert(j % n, i % n),
                NewIf("a", "<", "b", CopyOf(j % n), i % n), NewFor("x", 1 + j % 4, CopyOf(j % n), i % n)][kind]
        try:
            p = apply_edit(p, edit)
        except EditError:
            continue
        assert parse(render(p), name=p.name) == p
        assert list_statements(p) == list(range(len(p.statements)))
