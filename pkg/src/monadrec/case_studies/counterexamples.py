"""Three recognizable languages whose images along a letter map are not recognizable.

For each one this module provides the exact membership oracle of the image,
the infinite term family and the context that defeat any finite recognizer,
and sweeps that run the pigeonhole refuter against every small candidate.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable

from ..catalog import algebra, theory
from ..finite_algebra import FiniteAlgebra, lazy_sweep, search_model_families
from ..presentation import LetterMap, Term, leaf, node
from ..recognition import (
    RecognizedLanguage,
    RefutationWitness,
    refute_recognizability,
    validate_witness,
)
from ..term_engine import exact_class


def right_chain(op: str, items: list) -> Term:
    out = items[-1]
    for x in reversed(items[:-1]):
        out = node(op, x, out)
    return out


# ------------------------------------------------------------ marked words


@dataclass(frozen=True)
class MarkedWord:
    """A nonempty word with a multiset of marks, each mark on some occurrence."""

    word: tuple
    marks: tuple  # sorted (letter, count), zero counts omitted

    def __post_init__(self):
        if not self.word:
            raise ValueError("marked words are nonempty")
        have = Counter(self.word)
        for x, k in self.marks:
            if k > have[x]:
                raise ValueError(f"{k} marks on {x!r} but only {have[x]} occurrences")

    @classmethod
    def make(cls, word, marks) -> "MarkedWord":
        return cls(tuple(word), tuple(sorted((x, k) for x, k in Counter(marks).items() if k)))

    def __str__(self) -> str:
        left = dict(self.marks)
        out = []
        for x in self.word:
            if left.get(x, 0):
                left[x] -= 1
                out.append(x + "_")
            else:
                out.append(x)
        return " ".join(out)


def marked_normal_form(t: Term) -> MarkedWord:
    """``dot`` concatenates and adds marks, ``o`` erases every mark, a letter is marked."""
    if t.is_leaf:
        return MarkedWord.make((t.head,), {t.head: 1})
    if t.head == "dot":
        a, b = (marked_normal_form(x) for x in t.args)
        return MarkedWord.make(a.word + b.word, Counter(dict(a.marks)) + Counter(dict(b.marks)))
    if t.head == "o":
        a = marked_normal_form(t.args[0])
        return MarkedWord.make(a.word, {})
    raise ValueError(f"unexpected operation {t.head!r}")


def marked_source_member(t: Term) -> bool:
    """``a_ b a_ b ... a_ b``: the word is ``(ab)^n`` with only the a's marked."""
    w = marked_normal_form(t)
    n = len(w.word) // 2
    return (n >= 1 and w.word == ("a", "b") * n and w.marks == (("a", n),))


def marked_image_member(t: Term) -> bool:
    """Image along ``a, b -> c``: ``c^{2n}`` with exactly ``n`` marks."""
    w = marked_normal_form(t)
    n = len(w.word) // 2
    return n >= 1 and w.word == ("c",) * (2 * n) and w.marks == (("c", n),)


def marked_family(n: int) -> Term:
    return right_chain("dot", [leaf("c")] * n)


def marked_context(n: int, u: Term) -> Term:
    return node("dot", u, node("o", marked_family(n)))


# ------------------------------------------------------- balanced associativity


def balanced_left_spine(n: int, left: str = "a", right: str = "b", core: str = "c") -> Term:
    """``a . (X . b)`` nested ``n`` times around ``c``."""
    t = leaf(core)
    for _ in range(n):
        t = node("dot", leaf(left), node("dot", t, leaf(right)))
    return t


def balanced_source_member(t: Term) -> bool:
    """Singleton classes: the term itself must be a spine with ``n >= 1``."""
    n = (t.size) // 2
    return n >= 1 and t == balanced_left_spine(n)


def balanced_family(n: int) -> Term:
    """``a . (a . ( ... (a . c)))`` with ``n`` copies of ``a``."""
    return right_chain("dot", [leaf("a")] * n + [leaf("c")])


def balanced_context(n: int, u: Term) -> Term:
    for _ in range(n):
        u = node("dot", u, leaf("a"))
    return u


def _leaf_word(t: Term) -> tuple:
    if t.is_leaf:
        return (t.head,)
    return sum((_leaf_word(a) for a in t.args), ())


def balanced_image_member(t: Term) -> bool:
    """Image along ``a, b -> a``: the class of ``t`` holds a spine with ``b`` read as ``a``.

    The equation keeps the leaf word and the size, so classes are finite and
    explored completely.
    """
    w = _leaf_word(t)
    n = (len(w) - 1) // 2
    if n < 1 or w != ("a",) * n + ("c",) + ("a",) * n:
        return False
    target = balanced_left_spine(n, "a", "a")
    if t == target:
        return True
    terms, complete = exact_class(theory("balanced_assoc"), t, t.size, limit=2_000_000)
    if not complete:
        raise RuntimeError("balanced class exploration did not finish")
    return target in terms


# -------------------------------------------------------- not-quite-Mal'cev


def nqm_normal_form(t: Term) -> Term:
    """Rewrite ``p(x,x,y) -> s(y)`` and ``p(y,x,x) -> s(y)`` innermost.

    Both rules shrink terms and their only overlap ``p(x,x,x)`` gives
    ``s(x)`` either way, so normal forms decide equality.
    """
    if t.is_leaf:
        return t
    args = tuple(nqm_normal_form(a) for a in t.args)
    if t.head == "p":
        x, y, z = args
        if x == y:
            return node("s", z)
        if y == z:
            return node("s", x)
    return node(t.head, *args)


def _nqm_inner(u: Term, mid: str) -> bool:
    # normal form of p(y1, mid, y2) for some y1, y2 over the target alphabet
    if u.head == "s" and not u.is_leaf:
        return True
    return (u.head == "p" and not u.is_leaf and u.args[1] == leaf(mid)
            and u.args[0] != leaf(mid) and u.args[2] != leaf(mid))


def nqm_source_member(t: Term) -> bool:
    u = nqm_normal_form(t)
    if u.is_leaf or u.head != "p" or u.args[0] != leaf("a"):
        return False
    P1, P2 = u.args[1:]
    return (P1.head == "p" and not P1.is_leaf and P1.args[1] == leaf("b")
            and leaf("b") not in (P1.args[0], P1.args[2])
            and P2.head == "p" and not P2.is_leaf and P2.args[1] == leaf("c")
            and leaf("c") not in (P2.args[0], P2.args[2]))


def nqm_image_member(t: Term) -> bool:
    """Image along ``b, c -> d``: ``s(a)``, or ``p(a, P1, P2)`` with distinct inner parts."""
    u = nqm_normal_form(t)
    if u == node("s", leaf("a")):
        return True
    if u.is_leaf or u.head != "p" or u.args[0] != leaf("a"):
        return False
    P1, P2 = u.args[1:]
    return P1 != P2 and _nqm_inner(P1, "d") and _nqm_inner(P2, "d")


def nqm_family(n: int) -> Term:
    """``s^n(a)``: pairwise distinct, as the integers with ``p(x,y,z) = x-y+z+1`` show."""
    t = leaf("a")
    for _ in range(n):
        t = node("s", t)
    return t


def nqm_context(n: int, u: Term) -> Term:
    return node("p", node("s", nqm_family(n)), node("s", u), leaf("a"))


# ----------------------------------------------------------------- catalog


@dataclass(frozen=True)
class Counterexample:
    name: str
    theory: str
    algebra: str
    source_letters: dict  # letter -> element name
    accept: tuple
    letter_map: dict
    source_member: Callable
    image_member: Callable
    family: Callable
    context: Callable

    @property
    def presentation(self):
        return theory(self.theory)

    @property
    def f(self) -> LetterMap:
        return LetterMap.from_dict(self.letter_map)

    @property
    def gamma(self) -> tuple:
        return self.f.target

    def language(self) -> RecognizedLanguage:
        A = algebra(self.algebra)
        h0 = {x: A.element(v) for x, v in self.source_letters.items()}
        return RecognizedLanguage.make(A, h0, {A.element(v) for v in self.accept})

    def discriminator(self, n: int, m: int):
        return self.context(n, self.family(n)), self.context(n, self.family(m))


COUNTEREXAMPLES = {
    "marked_words": Counterexample(
        "marked_words", "marked_words", "marked_words", {"a": "AA", "b": "B_"}, ("AB",),
        {"a": "c", "b": "c"}, marked_source_member, marked_image_member,
        marked_family, marked_context),
    "balanced_assoc": Counterexample(
        "balanced_assoc", "balanced_assoc", "balanced_assoc",
        {"a": "a", "b": "b", "c": "c"}, ("L",), {"a": "a", "b": "a", "c": "c"},
        balanced_source_member, balanced_image_member, balanced_family, balanced_context),
    "not_quite_malcev": Counterexample(
        "not_quite_malcev", "not_quite_malcev", "not_quite_malcev",
        {"a": "0", "b": "5", "c": "6"}, ("3",), {"a": "a", "b": "d", "c": "d"},
        nqm_source_member, nqm_image_member, nqm_family, nqm_context),
}


def refute(case: Counterexample, candidate: RecognizedLanguage) -> RefutationWitness:
    return refute_recognizability(candidate, case.family, case.discriminator,
                                  case.image_member)


@dataclass(frozen=True)
class SweepResult:
    candidates: int  # recognizers covered, counting every completion of partial tables
    probes: int
    validated: int
    failures: tuple


def sweep_candidates(case: Counterexample, max_size: int = 3) -> SweepResult:
    return sweep(case.presentation, case.gamma, case.family, case.discriminator,
                 case.image_member, range(1, max_size + 1))


def sweep(p, gamma, family, discriminator, membership, sizes) -> SweepResult:
    """Refute every recognizer built from a model whose size is in ``sizes``.

    Models come as partial tables from the lazy search; one probe covers every
    completion of the cells it never read.  Accepting sets do not matter since
    the two discriminating terms get the same value.
    """
    covered = probes = ok = 0
    failures = []
    for size in sizes:
        for fam in search_model_families(p, size):
            for vals in itertools.product(range(size), repeat=len(gamma)):
                h0 = dict(zip(gamma, vals))

                def probe(B):
                    return refute_recognizability(RecognizedLanguage.make(B, h0, ()),
                                                  family, discriminator, membership)

                for A, w in lazy_sweep(fam, probe):
                    probes += 1
                    covered += size ** len(A.free_cells())
                    if validate_witness(RecognizedLanguage.make(A, h0, ()), w, membership):
                        ok += 1
                    else:
                        failures.append((A, h0, w))
    return SweepResult(covered, probes, ok, tuple(failures))


def fixture_recognizer_witnesses(case: Counterexample) -> list:
    """Refute the counterexample's own algebra under every assignment of the target letters."""
    A = algebra(case.algebra)
    out = []
    for vals in itertools.product(range(A.size), repeat=len(case.gamma)):
        cand = RecognizedLanguage.make(A, dict(zip(case.gamma, vals)), ())
        w = refute(case, cand)
        out.append((cand, w, validate_witness(cand, w, case.image_member)))
    return out


def table_mutants(A: FiniteAlgebra):
    """Every algebra differing from ``A`` in exactly one table cell."""
    for op in sorted(A.tables):
        for i, v in enumerate(A.tables[op]):
            for w in range(A.size):
                if w != v:
                    yield op, i, w, A.with_cell(op, i, w)
