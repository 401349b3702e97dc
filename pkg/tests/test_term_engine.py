from collections import Counter
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadrec.catalog import theory
from monadrec.finite_algebra import search_models
from monadrec.presentation import leaf, node, parse_term
from monadrec.term_engine import (
    ResourceError,
    build,
    check_rewrite_chain,
    decide_equal,
    exact_class,
    prove_equal,
    rename,
    replay_proofs,
)

from strategies import terms


def word(t):
    if t.is_leaf:
        return (t.head,)
    if t.head == "e":
        return ()
    return sum((word(a) for a in t.args), ())


def group_word(t):
    # freely reduced word over letters and their formal inverses
    if t.is_leaf:
        return ((t.head, 1),)
    if t.head == "e":
        return ()
    if t.head == "inv":
        return tuple((x, -k) for x, k in reversed(group_word(t.args[0])))
    out = []
    for item in group_word(t.args[0]) + group_word(t.args[1]):
        if out and out[-1] == (item[0], -item[1]):
            out.pop()
        else:
            out.append(item)
    return tuple(out)


ORACLES = {
    "monoid": word,
    "semigroup": word,
    "commutative_monoid": lambda t: Counter(word(t)),
    "semilattice": lambda t: frozenset(word(t)),
}


@lru_cache(maxsize=None)
def free(name, alphabet, bound):
    return build(theory(name), alphabet, bound)


@pytest.mark.parametrize("name", sorted(ORACLES))
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_bounded_equality_matches_normal_forms(name, data):
    p = theory(name)
    F = free(name, "ab", 5)
    gen = terms(p.arity, "ab", 4)
    t, s = data.draw(gen), data.draw(gen)
    assert bool(decide_equal(F, t, s)) == (ORACLES[name](t) == ORACLES[name](s))


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_group_equalities_are_sound(data):
    p = theory("group")
    F = free("group", "ab", 5)
    gen = terms(p.arity, "ab", 3)
    t, s = data.draw(gen), data.draw(gen)
    if decide_equal(F, t, s):
        assert group_word(t) == group_word(s)


def test_group_inverse_of_product():
    F = free("group", "ab", 6)
    t = parse_term("(inv (dot a b))", F.presentation.arity)
    s = parse_term("(dot (inv b) (inv a))", F.presentation.arity)
    assert decide_equal(F, t, s)


@pytest.mark.parametrize("name", ["monoid", "band", "group"])
def test_equal_classes_agree_in_every_small_model(name):
    p = theory(name)
    F = free(name, "ab", 4)
    models = search_models(p, 2)
    for c in range(F.num_classes):
        members = F.members(c, 4)
        for A in models:
            for env in ({"a": 0, "b": 1}, {"a": 1, "b": 1}):
                assert len({A.evaluate(t, env) for t in members}) == 1


@pytest.mark.parametrize("name, size", [("semilattice", 3), ("band", 6)])
def test_locally_finite_free_algebras_saturate(name, size):
    F = build(theory(name), "ab", 5)
    assert F.saturated and F.definitive and F.num_classes == size


def test_unsaturated_is_not_definitive():
    F = build(theory("monoid"), "ab", 4)
    assert not F.saturated
    v = decide_equal(F, leaf("a"), leaf("b"))
    assert not v and not v.definitive and v.bound == 4


def test_size_preserving_theory_is_definitive():
    F = build(theory("semigroup"), "ab", 4)
    assert F.definitive and not F.saturated


def test_representatives_are_members_of_their_class():
    F = free("monoid", "ab", 5)
    for c in range(F.num_classes):
        assert F.class_of(F.representative(c)) == c
    assert F.class_of(node("e")) == F.class_of(parse_term("(dot e e)", F.presentation.arity))


def test_proof_log_replays():
    assert replay_proofs(free("monoid", "ab", 4))
    assert replay_proofs(free("band", "ab", 4))


def test_prove_equal_and_rewrite_chain():
    p = theory("group")
    t = parse_term("(dot a (dot (inv a) b))", p.arity)
    assert prove_equal(p, t, leaf("b"))
    q = theory("semigroup")
    chain = [parse_term(x, q.arity) for x in
             ("(dot (dot a b) c)", "(dot a (dot b c))")]
    assert check_rewrite_chain(q, chain)
    assert not check_rewrite_chain(q, [chain[0], parse_term("(dot b (dot a c))", q.arity)])


def test_exact_class_of_a_word_counts_bracketings():
    p = theory("semigroup")
    t = parse_term("(dot a (dot b (dot c d)))", p.arity)
    members, complete = exact_class(p, t, t.size)
    assert complete and len(members) == 5  # Catalan number


def test_rename_applies_letter_map():
    t = parse_term("(dot a b)")
    assert rename({"a": "c", "b": "c"}, t) == parse_term("(dot c c)")


def test_node_budget_raises():
    with pytest.raises(ResourceError):
        build(theory("group"), "abc", 7, node_budget=1000)
