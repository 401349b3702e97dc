import pytest
from hypothesis import given, settings

from monadrec.catalog import THEORY_NAMES, theory
from monadrec.presentation import (
    LetterMap,
    ParseError,
    classify_equations,
    leaf,
    match,
    node,
    parse_letter_map,
    parse_presentation,
    parse_term,
    print_presentation,
    replace_leaves,
    show,
    var,
)

from strategies import terms

MONOID = theory("monoid")


@pytest.mark.parametrize("name", THEORY_NAMES)
def test_bundled_theories_round_trip(name):
    p = theory(name)
    q = parse_presentation(print_presentation(p))
    assert q == p


@settings(max_examples=200, deadline=None)
@given(terms({"dot": 2, "e": 0, "inv": 1}, "abc", 8))
def test_show_parse_round_trip(t):
    assert parse_term(show(t), {"dot": 2, "e": 0, "inv": 1}) == t


@given(terms({"dot": 2}, "ab", 6))
def test_size_counts_operation_nodes(t):
    s = show(t)
    assert t.size == s.count("(")


def test_constants_parse_as_nodes():
    t = parse_term("(dot e a)", MONOID.arity)
    assert t.args[0] == node("e") and t.args[1] == leaf("a")
    assert t.size == 2


@pytest.mark.parametrize("text, line, col", [
    ("ops: dot/2\neq: (dot ?x ?y = ?x", 2, None),
    ("ops: dot/2\neq: (dot ?x) = ?x", 2, None),
    ("ops: dot/2, dot/2", 1, None),
    ("ops: dot/2\neq: (dot a ?x) = ?x", 2, None),
    ("ops: dot\n", 1, None),
    ("oops: dot/2", 1, 1),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_presentation(text)
    assert info.value.line == line
    if col is not None:
        assert info.value.col == col


def test_unknown_operation_in_term():
    with pytest.raises(ParseError):
        parse_term("(mul a b)", MONOID.arity)


def test_letter_map_parse_and_preimage():
    f = parse_letter_map("a->c, b->c")
    assert f.source == ("a", "b") and f.target == ("c",)
    assert f.surjective and list(f.preimage("c")) == ["a", "b"]
    g = LetterMap.from_dict({"a": "a"}, "ab")
    assert not g.surjective and list(g.preimage("b")) == []


def test_letter_map_rejects_values_outside_target():
    with pytest.raises((ValueError, ParseError)):
        parse_letter_map("a->z", ["c"])


def test_match_and_substitution():
    pat = parse_term("(dot ?x (dot ?y ?x))", MONOID.arity)
    t = parse_term("(dot a (dot b a))", MONOID.arity)
    b = match(pat, t)
    assert b == {"?x": leaf("a"), "?y": leaf("b")}
    assert match(pat, parse_term("(dot a (dot b b))", MONOID.arity)) is None
    assert replace_leaves(pat, b) == t


def test_variables_are_marked():
    assert var("x").is_var and not leaf("x").is_var


def test_size_preservation_flags():
    assert theory("balanced_assoc").size_preserving()
    assert theory("semigroup").size_preserving()
    assert not MONOID.size_preserving()


def test_classification_report_mentions_each_equation():
    rep = classify_equations(theory("group"))
    assert len(rep.per_equation) == len(theory("group").equations)
    assert classify_equations(theory("semigroup")).all_regular_linear
    assert not rep.all_regular_linear
