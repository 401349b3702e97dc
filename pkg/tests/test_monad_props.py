import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadrec import monad_props as mp
from monadrec.catalog import span, theory
from monadrec.presentation import LetterMap, ParseError, leaf, node, parse_term, show
from monadrec.recognition import outcome_fields


def w(o):
    return outcome_fields(o)


# ------------------------------------------------------------ weak pullbacks


def test_group_wpb_witness():
    o = mp.check_weak_pullback_preservation(theory("group"), span("empty-ab-c"))
    assert o.name == "Refuted"
    assert w(o)["t"] == "e" and w(o)["r"] == "(dot a (inv b))"


def test_x3_x2_wpb_witness():
    o = mp.check_weak_pullback_preservation(theory("x3_x2"), span("ab-cd-z"))
    assert o.name == "Refuted"
    assert (w(o)["t"], w(o)["r"]) == ("(dot a b)", "(dot c (dot d c))")


def test_monoid_preserves_small_weak_pullbacks():
    p = theory("monoid")
    spans = list(mp.small_spans(2, 2))
    assert len(spans) == 58
    for s in spans[::5]:
        assert mp.check_weak_pullback_preservation(p, s, 3, 4).name == "Verified", str(s)


def test_span_parsing():
    s = mp.parse_span("X: a\nY: b c\nZ: z\nf: a->z\ng: b->z c->z\n")
    assert s.pullback == (("a", "b"), ("a", "c"))
    P, pi1, pi2 = s.projections()
    assert P == ["<a,b>", "<a,c>"] and pi1("<a,c>") == "a" and pi2("<a,c>") == "c"
    with pytest.raises(ParseError):
        mp.parse_span("X: a\nY: b\nZ: z\nf: a->q\ng: b->z\n")
    with pytest.raises(ParseError):
        mp.parse_span("X: a\nY: b\nZ: z\nf: a->z\n")


def test_witness_key_prefers_small_terms():
    small, big = parse_term("(dot a b)"), parse_term("(dot a (dot b a))")
    assert mp.witness_key(small) < mp.witness_key(big)
    assert mp.witness_key(leaf("a")) < mp.witness_key(leaf("b"))


# ------------------------------------------------------ unit and multiplication


def test_semilattice_unit_square_fails():
    o = mp.check_unit_cartesian(theory("semilattice"), LetterMap.from_dict({"a": "c", "b": "c"}))
    assert o.name == "Refuted" and w(o)["t"] == "(dot a b)" and w(o)["unit"] == "c"


def test_monoid_unit_square_holds():
    o = mp.check_unit_cartesian(theory("monoid"), LetterMap.from_dict({"a": "c", "b": "c"}), bound=4)
    assert o.name == "Verified"


def test_epi_only_rejects_non_surjective_maps():
    with pytest.raises(ValueError):
        mp.check_unit_cartesian(theory("monoid"), LetterMap.from_dict({"a": "a"}, "ab"), True)


def test_xyyz_multiplication_square_fails():
    f = LetterMap.from_dict({"a1": "a", "a2": "a", "b": "b", "c": "c"})
    assert mp.check_mult_cartesian(theory("xyyz"), f).name == "Refuted"


def test_two_unary_multiplication_fails_for_an_inclusion():
    o = mp.check_mult_cartesian(theory("two_unary_fge"), LetterMap.from_dict({"a": "a"}, "ab"))
    assert o.name == "Refuted" and w(o)["theta"] == "(f [(f b)])"


def test_monoid_multiplication_square_holds():
    o = mp.check_mult_cartesian(theory("monoid"), LetterMap.from_dict({"a": "c", "b": "c"}))
    assert o.name == "Verified"


# ------------------------------------------------------------ Jacobs law


def subset(xs):
    return leaf(mp.subset_letter(xs))


def chain(items):
    t = items[-1]
    for x in reversed(items[:-1]):
        t = node("dot", x, t)
    return t


SUBSETS = st.lists(st.sets(st.sampled_from("ab"), min_size=1), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(SUBSETS)
def test_jacobs_law_on_words_is_the_product_of_choices(sets):
    t = chain([subset(s) for s in sets])
    got = {tuple(show(x).replace("(dot ", "").replace(")", "").split())
           for x in mp.eval_jacobs_law(theory("semigroup"), "ab", t)}
    want = set(itertools.product(*[sorted(s) for s in sets]))
    assert got == want


@settings(max_examples=30, deadline=None)
@given(SUBSETS)
def test_jacobs_law_on_bags_is_the_set_of_choice_multisets(sets):
    p = theory("commutative_monoid")
    t = chain([subset(s) for s in sets])
    got = {frozenset(Counter(show(x).replace("(dot ", "").replace(")", "").split()).items())
           for x in mp.eval_jacobs_law(p, "ab", t)}
    want = {frozenset(Counter(c).items()) for c in itertools.product(*[sorted(s) for s in sets])}
    assert got == want


def test_subset_letters_must_be_subsets():
    with pytest.raises(ValueError):
        mp.eval_jacobs_law(theory("monoid"), "ab", leaf("{a,z}"))


def test_distributive_law_axioms_for_monoid():
    res = mp.check_distributive_law_axioms(theory("monoid"), ["a", "b"])
    assert sorted(res) == ["a", "b", "c", "d", "monotone"]
    assert all(o.name == "Verified" for o in res.values())


def test_band_breaks_axiom_b():
    res = mp.check_distributive_law_axioms(theory("band"), ["a", "b"])
    assert res["b"].name == "Refuted"


# ------------------------------------------------------------ Mal'cev terms


@pytest.mark.parametrize("name", ["group", "boolean_algebra"])
def test_malcev_terms_found_and_verified(name):
    p = theory(name)
    t = mp.find_malcev_term(p)
    assert t is not None and mp.verify_malcev(p, t)


def test_monoid_has_no_shallow_malcev_term():
    res = mp.malcev_search(theory("monoid"), 3)
    assert res.term is None and res.exhaustive


def test_verify_rejects_a_projection():
    assert not mp.verify_malcev(theory("group"), parse_term("?x"))


# ------------------------------------------------------------ local finiteness


@pytest.mark.parametrize("name, gens, size", [("band", 2, 6), ("semilattice", 3, 7),
                                              ("semilattice", 1, 1), ("band", 1, 1)])
def test_locally_finite_sizes(name, gens, size):
    o = mp.detect_local_finiteness(theory(name), gens)
    assert isinstance(o, mp.Finite) and o.size == size


def test_monoid_is_not_detected_finite():
    assert mp.detect_local_finiteness(theory("monoid"), 1, (1, 2, 3)).name == "Unknown"


# ------------------------------------------------------------ certifier


def test_certifier_separates_and_abstains():
    c = mp.Certifier(theory("monoid"))
    assert c.distinct(parse_term("(dot a b)"), parse_term("(dot b a)"))
    assert c.distinct(parse_term("(dot a (dot b c))"), parse_term("(dot (dot a b) c)")) is None
