import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import formulas
from admrules.syntax import (BOT, TOP, And, Imp, MRule, Not, Or, ParseError, RuleFileError, Var,
                             apply_substitution, big_and, big_or, compose, fresh_variable,
                             parse_formula, parse_rule, read_rules)

p, q, r = Var("p"), Var("q"), Var("r")


@pytest.mark.parametrize("text, tree", [
    ("p | q", Or(p, q)),
    ("~p -> (q | r)", Imp(Not(p), Or(q, r))),
    ("p -> q -> r", Imp(p, Imp(q, r))),
    ("(p -> q) -> r", Imp(Imp(p, q), r)),
    ("p & q | r", Or(And(p, q), r)),
    ("p | q & r", Or(p, And(q, r))),
    ("~p & q", And(Not(p), q)),
    ("p | q | r", Or(Or(p, q), r)),
    ("0 -> 1", Imp(BOT, TOP)),
    ("~~p", Not(Not(p))),
])
def test_parse_formula(text, tree):
    assert parse_formula(text) == tree


def test_operator_sugar_builds_same_trees():
    assert (~p >> (q | r)) == parse_formula("~p -> q | r")
    assert (p & q) == And(p, q)


@pytest.mark.parametrize("text, pos", [
    ("p &", 3),
    ("(p", 2),
    ("p $ q", 2),
    ("", 0),
    ("p q", 2),
    ("0p", 0),
])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert e.value.pos == pos


def test_dp_rule_text():
    rule = parse_rule("p | q / p, q")
    assert rule.premises == frozenset({Or(p, q)})
    assert rule.conclusions == frozenset({p, q})
    assert not rule.is_single_conclusion


def test_harrop_rule_text():
    rule = parse_rule("~p -> (q|r) / (~p -> q) | (~p -> r)")
    assert rule.premises == frozenset({Imp(Not(p), Or(q, r))})
    assert rule.conclusions == frozenset({Or(Imp(Not(p), q), Imp(Not(p), r))})
    assert rule.is_single_conclusion


def test_empty_sides():
    assert parse_rule("/ 0") == MRule((), (BOT,))
    assert parse_rule("/") == MRule((), ())
    assert str(parse_rule("/ 0")) == "/ 0"


def test_rule_needs_exactly_one_slash():
    with pytest.raises(ParseError):
        parse_rule("p -> q")
    with pytest.raises(ParseError):
        parse_rule("p / q / r")


def test_rules_are_sets():
    assert parse_rule("p, p, q / r") == parse_rule("q, p / r")


@given(formulas())
def test_print_parse_round_trip(f):
    assert parse_formula(str(f)) == f


@given(st.lists(formulas(max_leaves=5), max_size=3), st.lists(formulas(max_leaves=5), max_size=3))
def test_rule_round_trip(prem, concl):
    rule = MRule(prem, concl)
    assert parse_rule(str(rule)) == rule


def test_big_and_big_or_conventions():
    assert big_and([]) == TOP
    assert big_or([]) == BOT
    assert big_and([p]) == p
    assert big_or([q, p]) == Or(p, q)


def test_q_bottom_substitution_shape():
    gamma, delta = And(p, Imp(p, q)), Or(q, r)
    x = Var("q0")
    rule = MRule([Or(gamma, x)], [Or(delta, x)])
    out = apply_substitution({"q0": BOT}, rule)
    assert out == MRule([Or(gamma, BOT)], [Or(delta, BOT)])


@given(formulas())
def test_identity_substitution(f):
    assert apply_substitution({}, f) == f
    assert apply_substitution({v: Var(v) for v in f.vars}, f) == f


def test_composition_example():
    first, second = {"p": q}, {"q": r}
    f = And(p, q)
    step = apply_substitution(second, apply_substitution(first, f))
    assert step == apply_substitution({"p": r, "q": r}, f) == And(r, r)
    assert compose(first, second) == {"p": r, "q": r}


@given(formulas(), st.dictionaries(st.sampled_from("pqr"), formulas(max_leaves=4), max_size=3),
       st.dictionaries(st.sampled_from("pqr"), formulas(max_leaves=4), max_size=3))
def test_composition_law(f, s1, s2):
    assert apply_substitution(compose(s1, s2), f) == apply_substitution(s2, apply_substitution(s1, f))


def test_fresh_variable():
    assert fresh_variable(parse_rule("p | q / p, q")) == "q0"
    assert fresh_variable(MRule([Var(f"q{i}") for i in range(6)], [])) == "q6"
    assert fresh_variable(MRule((), ())) == "q0"
    assert fresh_variable([parse_rule("q0 / q1"), parse_rule("q2 / p")]) == "q3"


@given(st.lists(formulas(variables=("p", "q0", "q1")), min_size=1, max_size=3))
def test_fresh_variable_is_fresh(fs):
    v = fresh_variable(MRule(fs, []))
    assert all(v not in f.vars for f in fs)


def test_read_rules(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text("# comment\nbasis m\n\np | q / p, q  # DP\n~~p / p\n")
    got = list(read_rules(path))
    assert [ln for ln, _ in got] == [4, 5]
    assert got[1][1] == parse_rule("~~p / p")


def test_read_rules_error_has_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("p / p\np & / q\n")
    with pytest.raises(RuleFileError) as e:
        list(read_rules(path))
    assert e.value.lineno == 2
