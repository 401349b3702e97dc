"""Images along substitutions that are not letter-to-letter.

Two recognizable languages whose image under a Kleisli substitution (each
letter sent to a term) is not recognizable: ``a*`` among bags sent along
``a -> ab, b -> c``, and ``a b*`` among seminearring elements sent along
``a -> a + a``.  Images are computed by bounded brute force and every small
recognizer is defeated by the pigeonhole refuter.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from ..catalog import algebra, theory
from ..finite_algebra import FiniteAlgebra
from ..presentation import Term, leaf, node, replace_leaves
from ..recognition import RecognizedLanguage, member, refute_recognizability, validate_witness
from ..term_engine import build
from .counterexamples import right_chain, sweep


def kleisli_image_bruteforce(L: RecognizedLanguage, subst: Mapping[str, Term],
                             alphabet, bound: int, target_bound: int):
    """``(F_gamma, class ids)``: images of members of size ``<= bound`` that land within ``target_bound``."""
    p = L.algebra.presentation
    F_sigma = build(p, sorted(subst), bound)
    F_gamma = build(p, alphabet, target_bound)
    hits = set()
    for c in range(F_sigma.num_classes):
        rep = F_sigma.representative(c)
        if rep.size <= bound and member(L, rep):
            d = F_gamma.class_of(replace_leaves(rep, subst))
            if d is not None:
                hits.add(d)
    return F_gamma, hits


# --------------------------------------------------------------------- bags


def bag_counts(t: Term) -> Counter:
    out: Counter = Counter()
    stack = [t]
    while stack:
        u = stack.pop()
        if u.is_leaf:
            out[u.head] += 1
        else:
            stack.extend(u.args)
    return out


def bag_image_member(t: Term) -> bool:
    """``a^n b^n``: the image of ``a*`` under ``a -> ab, b -> c``."""
    k = bag_counts(t)
    return k["a"] == k["b"] and k["c"] == 0


def bag_word(n: int, letter: str = "a") -> Term:
    return node("e") if n == 0 else right_chain("dot", [leaf(letter)] * n)


def bag_context(n: int, u: Term) -> Term:
    return node("dot", u, bag_word(n, "b"))


def cyclic_counting(n: int) -> FiniteAlgebra:
    """``Z_n`` as a commutative monoid."""
    rng = range(n)
    return FiniteAlgebra(theory("commutative_monoid"), n,
                         {"dot": [(a + b) % n for a, b in itertools.product(rng, rng)], "e": [0]})


# ------------------------------------------------------------ seminearrings


ONE = ("1",)


def _mult(xs: tuple, ys: tuple) -> tuple:
    out = []
    for item in xs:
        if item == ONE:
            out.extend(ys)
        else:
            out.append((item[0], _mult(item[1], ys)))
    return tuple(out)


def seminearring_normal_form(t: Term) -> tuple:
    """A sum (tuple) of items; an item is ``ONE`` or ``(letter, sum)`` for ``letter . sum``.

    Vertical composition distributes only from the right, so a letter
    followed by a sum stays as it is.
    """
    if t.is_leaf:
        return ((t.head, (ONE,)),)
    if t.head == "zero":
        return ()
    if t.head == "one":
        return (ONE,)
    a, b = (seminearring_normal_form(x) for x in t.args)
    if t.head == "plus":
        return a + b
    if t.head == "dot":
        return _mult(a, b)
    raise ValueError(f"unexpected operation {t.head!r}")


def _chain(item) -> list | None:
    letters = []
    while item != ONE:
        letter, rest = item
        if len(rest) != 1:
            return None
        letters.append(letter)
        item = rest[0]
    return letters


def seminearring_image_member(t: Term) -> bool:
    """``a b^n + a b^n``: the image of ``a b*`` under ``a -> a + a``."""
    nf = seminearring_normal_form(t)
    if len(nf) != 2 or nf[0] != nf[1]:
        return False
    word = _chain(nf[0])
    return bool(word) and word[0] == "a" and all(x == "b" for x in word[1:])


def b_power(n: int) -> Term:
    return right_chain("dot", [leaf("b")] * n)


def _ab(n: int, tail: Term | None = None) -> Term:
    return node("dot", leaf("a"), tail if tail is not None else b_power(n))


def seminearring_context(n: int, u: Term) -> Term:
    return node("plus", _ab(n), _ab(n, u))


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class NoncaseReport:
    name: str
    image_classes: int
    oracle_agrees: bool
    candidates: int
    witnesses: tuple  # (label, RefutationWitness, valid)

    @property
    def passed(self) -> bool:
        return self.oracle_agrees and all(ok for _, _, ok in self.witnesses)


def _fixture_witnesses(fixtures, gamma, family, discriminator, membership):
    out = []
    for label, A in fixtures:
        for vals in itertools.product(range(A.size), repeat=len(gamma)):
            cand = RecognizedLanguage.make(A, dict(zip(gamma, vals)), ())
            w = refute_recognizability(cand, family, discriminator, membership)
            out.append((f"{label} {dict(zip(gamma, vals))}", w,
                        validate_witness(cand, w, membership)))
    return out


def run_noncases(name: str, max_model_size: int = 3) -> NoncaseReport:
    if name == "bag_kleisli":
        L = RecognizedLanguage.make(algebra("bag_max"), {"a": 0, "b": 1}, {0})
        subst = {"a": node("dot", leaf("a"), leaf("b")), "b": leaf("c")}
        gamma = ("a", "b", "c")
        F, hits = kleisli_image_bruteforce(L, subst, gamma, 3, 4)
        membership = bag_image_member

        def family(n):
            return bag_word(n)

        def discriminator(n, m):
            return bag_context(n, bag_word(n)), bag_context(n, bag_word(m))

        fixtures = [("Z3 counting", algebra("z3_counting")), ("Z4 counting", cyclic_counting(4)),
                    ("Z5 counting", cyclic_counting(5))]
        p = theory("commutative_monoid")
    elif name == "seminearring":
        L = RecognizedLanguage.make(algebra("ab_star_seminearring"),
                                    {"a": 2, "b": 3}, {2})
        subst = {"a": node("plus", leaf("a"), leaf("a")), "b": leaf("b")}
        gamma = ("a", "b")
        F, hits = kleisli_image_bruteforce(L, subst, gamma, 3, 4)
        membership = seminearring_image_member
        family = b_power

        def discriminator(n, m):
            return seminearring_context(n, b_power(n)), seminearring_context(n, b_power(m))

        fixtures = [("a b* recognizer", algebra("ab_star_seminearring"))]
        p = theory("seminearring")
    else:
        raise KeyError(f"unknown non-case {name!r}")
    agrees = all((c in hits) == membership(F.representative(c))
                 for c in range(F.num_classes) if F.representative(c).size <= 3)
    swept = sweep(p, gamma, family, discriminator, membership, range(1, max_model_size + 1))
    witnesses = _fixture_witnesses(fixtures, gamma, family, discriminator, membership)
    witnesses += [("search_models", w, False) for _, _, w in swept.failures]
    return NoncaseReport(name, len(hits), agrees, swept.candidates + len(witnesses),
                         tuple(witnesses) + (("search_models sweep", None, swept.validated == swept.probes),))
