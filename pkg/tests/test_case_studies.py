import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadrec.case_studies import burnside, counterexamples as cx, lattice as lat, reader
from monadrec.case_studies.noncases import (
    bag_image_member,
    bag_word,
    run_noncases,
    seminearring_image_member,
    seminearring_normal_form,
)
from monadrec.case_studies.powerset_squared import pair_product, powerset_squared_algebra
from monadrec.case_studies.studies import CASES, run_case
from monadrec.catalog import theory
from monadrec.finite_algebra import check_satisfies, search_models
from monadrec.presentation import LetterMap, leaf, node, parse_term
from monadrec.recognition import RecognizedLanguage, member
from monadrec.term_engine import build

from strategies import terms

# ------------------------------------------------------------ free lattices


def lattice_terms(alphabet="pqrs", max_size=9):
    @st.composite
    def build_term(draw, budget=max_size):
        if budget == 0 or draw(st.booleans()) and budget < max_size:
            return lat.gen(draw(st.sampled_from(alphabet)))
        left = draw(st.integers(0, budget - 1))
        a = draw(build_term(left))
        b = draw(build_term(budget - 1 - left))
        return draw(st.sampled_from([lat.join, lat.meet]))(a, b)

    return build_term()


def n5():
    # 0 < a < c < 1, 0 < b < 1
    up = {0: {0, 1, 2, 3, 4}, 1: {1, 3, 4}, 2: {2, 4}, 3: {3, 4}, 4: {4}}
    leq = lambda x, y: y in up[x]
    sup = lambda x, y: min((z for z in up[x] & up[y]), key=lambda z: len(up[z]) * -1)
    inf = lambda x, y: max((z for z in range(5) if leq(z, x) and leq(z, y)),
                           key=lambda z: len(up[z]) * -1)
    return leq, sup, inf


def evaluate(t, env, sup, inf):
    if t.kind == lat.GEN:
        return env[t.name]
    vals = [evaluate(k, env, sup, inf) for k in t.kids]
    op = sup if t.kind == lat.JOIN else inf
    out = vals[0]
    for v in vals[1:]:
        out = op(out, v)
    return out


def small_lattices():
    leq, sup, inf = n5()
    yield range(5), leq, sup, inf
    M = lat.diamond_lattice()
    yield (range(5), lambda x, y: M.op("join", x, y) == y,
           lambda x, y: M.op("join", x, y), lambda x, y: M.op("meet", x, y))
    yield range(3), lambda x, y: x <= y, max, min


@settings(max_examples=300, deadline=None)
@given(lattice_terms(), lattice_terms())
def test_whitman_order_is_sound_in_small_lattices(s, t):
    if not lat.whitman_leq(s, t):
        return
    for carrier, leq, sup, inf in small_lattices():
        gens = sorted(s.generators() | t.generators())
        for vals in itertools.product(carrier, repeat=len(gens)):
            env = dict(zip(gens, vals))
            assert leq(evaluate(s, env, sup, inf), evaluate(t, env, sup, inf))


@settings(max_examples=300, deadline=None)
@given(lattice_terms(), lattice_terms(), lattice_terms())
def test_whitman_order_is_a_partial_order(s, t, u):
    assert lat.whitman_leq(s, s)
    if lat.whitman_leq(s, t) and lat.whitman_leq(t, u):
        assert lat.whitman_leq(s, u)
    if lat.whitman_leq(s, t) and lat.whitman_leq(t, s):
        assert lat.lattice_canonical_form(s) == lat.lattice_canonical_form(t)


@settings(max_examples=300, deadline=None)
@given(lattice_terms())
def test_canonical_form_idempotent_and_equal(t):
    c = lat.lattice_canonical_form(t)
    assert lat.lattice_canonical_form(c) == c and lat.is_canonical(c)
    assert lat.lattice_equal(c, t) and c.size <= t.size


@settings(max_examples=100, deadline=None)
@given(lattice_terms(max_size=5))
def test_term_conversion_round_trips(t):
    assert lat.lattice_equal(lat.from_term(lat.to_term(t)), t)


def test_lattice_laws():
    p, q = lat.gen("p"), lat.gen("q")
    assert lat.lattice_equal(lat.join(p, lat.meet(p, q)), p)
    assert lat.lattice_equal(lat.meet(p, lat.join(p, q)), p)
    assert not lat.whitman_leq(p, q)
    # distributivity fails in the free lattice
    r = lat.gen("r")
    lhs = lat.meet(p, lat.join(q, r))
    rhs = lat.join(lat.meet(p, q), lat.meet(p, r))
    assert lat.whitman_leq(rhs, lhs) and not lat.whitman_leq(lhs, rhs)


def test_order_chain():
    (t1, mid, t2), checks = lat.lattice_order_chain()
    assert all(checks.values()), checks


def test_free_lattice_on_two_generators_has_four_elements():
    assert len(lat.lattice_elements("pq", 6)) == 4


def test_lattice_image_matches_bruteforce():
    A = lat.chain_lattice(3)
    L = RecognizedLanguage.make(A, {"a": 0, "b": 2}, {1, 2})
    img = lat.lattice_direct_image(L, LetterMap.from_dict({"a": "c", "b": "c"}), 4, 1)
    assert img.outcome.name == "Verified"


def test_as_lattice_rejects_non_lattices():
    with pytest.raises(ValueError):
        lat.as_lattice(lat.chain_lattice(3).with_cell("join", 1, 0))


# ------------------------------------------------------------ reader monad


def test_eventually_constant_words_normalize():
    w = reader.EventuallyConstantWord(("a", "b", "b"), "b")
    assert w == reader.EventuallyConstantWord(("a",), "b")
    assert [w.at(i) for i in (1, 2, 9)] == ["a", "b", "b"]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000))
def test_reader_recognizer_matches_rectangles(seed):
    rng = random.Random(seed)
    alphabet = "abc"[: rng.randint(1, 3)]
    cons = {i: "".join(sorted(set(rng.sample(alphabet, rng.randint(1, len(alphabet))))))
            for i in rng.sample(range(1, 4), rng.randint(0, 2))}
    L = reader.RectangularLanguage.make(alphabet, cons)
    R = reader.reader_recognizer(L)
    w = reader.random_word(rng, alphabet)
    assert R.member(w) == all(w.at(i) in z for i, z in L.constraints)


def test_reader_em_axioms():
    L = reader.RectangularLanguage.make("ab", {1: "a", 3: "b"})
    assert reader.check_em_axioms(reader.reader_recognizer(L), 100)


def test_reader_image_and_surjectivity():
    L = reader.RectangularLanguage.make("abc", {2: "ab"})
    assert reader.reader_image_agrees([L], LetterMap.from_dict({"a": "x", "b": "y", "c": "y"}))
    with pytest.raises(ValueError):
        reader.reader_direct_image([L], LetterMap.from_dict({"a": "x", "b": "x", "c": "x"}, "xy"))


# ------------------------------------------------------------ x^3 = x^2 words


@pytest.mark.parametrize("n", range(1, 8))
def test_squarefree_counts_match_brute_force(n):
    def square(w):
        return any(w[i:i + k] == w[i + k:i + 2 * k]
                   for k in range(1, len(w) // 2 + 1) for i in range(len(w) - 2 * k + 1))

    brute = ["".join(w) for w in itertools.product("abc", repeat=n) if not square("".join(w))]
    assert sorted(burnside.squarefree_words("abc", n)) == sorted(brute)


def test_cube_steps_shrink_cubes():
    steps = set(burnside.cube_square_steps("aaab"))
    assert "aab" in steps
    assert burnside.has_square("abab") and not burnside.has_square("abc")


def test_burnside_membership():
    assert isinstance(burnside.burnside_member("ab0ab0ab0"), burnside.Member)
    r = burnside.burnside_member("ab0ba0ab0")
    assert isinstance(r, burnside.NonMember) and r.definitive


def test_gamma01_closure_small():
    n, bad = burnside.check_gamma01_closure(7)
    assert n > 0 and bad == []


# ------------------------------------------------------------ counterexamples


@pytest.mark.parametrize("name", sorted(cx.COUNTEREXAMPLES))
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_fixture_recognizers_match_source_oracles(name, data):
    case = cx.COUNTEREXAMPLES[name]
    L = case.language()
    t = data.draw(terms(case.presentation.arity, L.alphabet, 7))
    assert member(L, t) == case.source_member(t)


@pytest.mark.parametrize("name", sorted(cx.COUNTEREXAMPLES))
def test_families_and_contexts_split_the_image(name):
    case = cx.COUNTEREXAMPLES[name]
    for n in range(1, 5):
        for m in range(n + 1, 6):
            t_in, t_out = case.discriminator(n, m)
            assert case.image_member(t_in) and not case.image_member(t_out)


def test_marked_normal_form_is_an_invariant():
    p = theory("marked_words")
    F = build(p, ["a", "b"], 4)
    for c in range(F.num_classes):
        forms = {cx.marked_normal_form(t) for t in F.members(c, 4)}
        assert len(forms) == 1


def test_nqm_normal_form_respects_provable_equality():
    p = theory("not_quite_malcev")
    F = build(p, ["a", "b"], 3)
    for c in range(F.num_classes):
        forms = {cx.nqm_normal_form(t) for t in F.members(c, 3)}
        assert len(forms) == 1


def test_balanced_spines_are_singletons():
    t = cx.balanced_left_spine(2)
    assert cx.balanced_source_member(t)
    assert not cx.balanced_source_member(cx.balanced_left_spine(2, core="a"))


def test_marked_word_rejects_extra_marks():
    with pytest.raises(ValueError):
        cx.MarkedWord.make("ab", {"a": 2})
    assert str(cx.MarkedWord.make("aab", {"a": 1})) == "a_ a b"


def test_sweep_refutes_size_two_marked_models():
    res = cx.sweep_candidates(cx.COUNTEREXAMPLES["marked_words"], 2)
    assert res.probes == res.validated and not res.failures


# ------------------------------------------------------------ non-letter maps


def test_bag_oracle():
    ab = node("dot", leaf("a"), leaf("b"))
    assert bag_image_member(ab) and not bag_image_member(bag_word(2))


def test_seminearring_right_distributivity_only():
    p = theory("seminearring")
    left = parse_term("(dot (plus a b) c)", p.arity)
    right = parse_term("(dot a (plus b c))", p.arity)
    assert seminearring_normal_form(left) == seminearring_normal_form(
        parse_term("(plus (dot a c) (dot b c))", p.arity))
    assert len(seminearring_normal_form(right)) == 1
    img = parse_term("(plus (dot a b) (dot a b))", p.arity)
    assert seminearring_image_member(img)


@pytest.mark.parametrize("name", ["bag_kleisli", "seminearring"])
def test_noncases(name):
    assert run_noncases(name, 2).passed


# ------------------------------------------------------------ pair algebra


def test_pair_algebra_of_small_xyyz_models():
    p = theory("xyyz")
    for A in search_models(p, 2):
        P, index = powerset_squared_algebra(A)
        assert check_satisfies(P)
        full = frozenset(range(A.size))
        assert P.op("dot", index[(full, full)], index[(full, full)]) in index.values()


def test_pair_product_components():
    A = search_models(theory("xyyz"), 2)[0]
    s = frozenset({0})
    first, second = pair_product(A, s, s, s, s)
    assert first <= second


# ------------------------------------------------------------ worked examples


@pytest.mark.parametrize("name", sorted(CASES))
def test_worked_examples(name):
    rep = run_case(name)
    assert rep.passed, [c for c in rep.claims if not c.passed]
