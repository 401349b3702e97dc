from functools import lru_cache

import pytest
from hypothesis import given, settings

from monadrec.catalog import algebra, theory
from monadrec.cli import load_language
from monadrec.finite_algebra import check_satisfies, search_models
from monadrec.presentation import LetterMap, leaf, node
from monadrec.recognition import (
    FixtureError,
    RecognizedLanguage,
    boolean_op,
    complex_algebra,
    cross_check,
    direct_image_bruteforce,
    direct_image_malcev,
    direct_image_powerset,
    inverse_image,
    member,
    outcome_fields,
    refute_recognizability,
    validate_witness,
)
from monadrec.term_engine import build, rename

from strategies import terms

MONOID = theory("monoid")
WORDS = terms(MONOID.arity, "ab", 6)


def word(t):
    if t.is_leaf:
        return t.head
    return "".join(word(a) for a in t.args)


def chain(letters):
    if not letters:
        return node("e")
    t = leaf(letters[-1])
    for x in reversed(letters[:-1]):
        t = node("dot", leaf(x), t)
    return t


@lru_cache(maxsize=None)
def abstar():
    return load_language("abstar")


def is_abstar(w):
    return len(w) % 2 == 0 and w == "ab" * (len(w) // 2)


@settings(max_examples=200, deadline=None)
@given(WORDS)
def test_abstar_fixture_recognizes_ab_star(t):
    assert member(abstar(), t) == is_abstar(word(t))


@settings(max_examples=150, deadline=None)
@given(WORDS)
def test_boolean_operations(t):
    L = abstar()
    A = L.algebra
    M = RecognizedLanguage.make(A, L.h0, {A.element("a"), A.element("ba")})  # ends in a
    ends_a = word(t).endswith("a") and ("aa" not in word(t)) and ("bb" not in word(t))
    assert member(boolean_op("complement", L), t) != member(L, t)
    assert member(boolean_op("union", L, M), t) == (member(L, t) or member(M, t))
    assert member(boolean_op("intersection", L, M), t) == (member(L, t) and member(M, t))
    assert member(M, t) == ends_a


@settings(max_examples=100, deadline=None)
@given(terms(MONOID.arity, "xy", 5))
def test_inverse_image_commutes_with_renaming(t):
    f = LetterMap.from_dict({"x": "a", "y": "b"})
    assert member(inverse_image(abstar(), f), t) == member(abstar(), rename(f, t))


def test_powerset_image_of_ab_star_is_even_length_words():
    cand, outcome = direct_image_powerset(abstar(), LetterMap.from_dict({"a": "c", "b": "c"}), 6)
    assert outcome.name == "Verified" and outcome_fields(outcome)["bound"] == 6
    for n in range(12):
        assert member(cand, chain("c" * n)) == (n % 2 == 0)


def test_powerset_refutes_group_at_complex_algebra():
    L = load_language("z2_odd")
    cand, outcome = direct_image_powerset(L, LetterMap.from_dict({"a": "c", "b": "c"}))
    assert cand is None and outcome.name == "Refuted"
    w = outcome_fields(outcome)
    assert w["stage"] == "complex algebra"
    assert w["assignment"] == (("?x", "{0,1}"),)


@pytest.mark.parametrize("name", ["semigroup", "band", "semilattice"])
def test_complex_algebras_of_small_models(name):
    # subsets of a model of a linear theory form a model again
    for A in search_models(theory(name), 2):
        P = complex_algebra(A)
        assert P.size == 3
        if name != "band":
            assert check_satisfies(P)


def test_powerset_requires_surjection():
    with pytest.raises(ValueError):
        direct_image_powerset(abstar(), LetterMap.from_dict({"a": "c", "b": "c"}, "cd"))


def test_cross_check_rejects_a_candidate_missing_classes():
    f = LetterMap.from_dict({"a": "c", "b": "c"})
    F = build(MONOID, ["c"], 4)
    brute = direct_image_bruteforce(abstar(), f, F, 2)
    A = algebra("abstar_monoid")
    empty = RecognizedLanguage.make(A, {"c": 0}, ())
    assert cross_check(empty, brute, F, "test").name == "Refuted"


def test_bruteforce_image_classes():
    f = LetterMap.from_dict({"a": "c", "b": "c"})
    F = build(MONOID, ["c"], 5)
    brute = direct_image_bruteforce(abstar(), f, F, 2)
    lengths = sorted(len(word(F.representative(c)).replace("e", "")) for c in brute.classes)
    assert lengths == [0, 2, 4, 6]  # c^6 has five dot nodes


def test_malcev_image_on_boolean_collapse():
    A = algebra("ba_one_generator")
    L = RecognizedLanguage.make(A, {"a": A.element("g"), "b": A.element("ng")}, {A.element("g")})
    cand, outcome, _ = direct_image_malcev(L, LetterMap.from_dict({"a": "c", "b": "c"}), 3)
    assert outcome.name == "Verified"
    assert cand.algebra.size == 1 and cand.accept == frozenset({0})


# ------------------------------------------------------------ refuter


def anbn(t):
    w = word(t).replace("e", "")
    n = len(w) // 2
    return w == "a" * n + "b" * n


def family(n):
    return chain("a" * n)


def discriminator(n, m):
    return node("dot", family(n), chain("b" * n)), node("dot", family(m), chain("b" * n))


@pytest.mark.parametrize("size", [1, 2, 3])
def test_refuter_defeats_every_small_monoid(size):
    for A in search_models(MONOID, size):
        for va in range(size):
            cand = RecognizedLanguage.make(A, {"a": va, "b": 0}, ())
            w = refute_recognizability(cand, family, discriminator, anbn)
            assert validate_witness(cand, w, anbn)
            assert w.n < w.m <= size + 1


def test_refuter_reports_a_broken_oracle():
    A = search_models(MONOID, 2)[0]
    cand = RecognizedLanguage.make(A, {"a": 0, "b": 0}, ())
    with pytest.raises(FixtureError):
        refute_recognizability(cand, family, discriminator, lambda t: True)


def test_witness_validation_catches_tampering():
    A = search_models(MONOID, 2)[-1]
    cand = RecognizedLanguage.make(A, {"a": 1, "b": 0}, ())
    w = refute_recognizability(cand, family, discriminator, anbn)
    assert not validate_witness(cand, w, lambda t: not anbn(t))


@pytest.mark.parametrize("name", ["abstar", "z2_odd", "marked_words", "balanced_assoc",
                                  "not_quite_malcev"])
def test_language_files_load(name):
    L = load_language(name)
    assert check_satisfies(L.algebra) and L.accept
