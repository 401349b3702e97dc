"""Image recognizer for the theory ``x(y(yz)) = x(yz)`` on pairs of nonempty subsets."""

from __future__ import annotations

import itertools

from ..finite_algebra import AlgebraError, FiniteAlgebra, check_satisfies
from ..presentation import LetterMap
from ..recognition import Refuted, RecognizedLanguage, cross_check, direct_image_bruteforce
from ..term_engine import build


def _subsets(n: int) -> list:
    return [frozenset(x for x in range(n) if m >> x & 1) for m in range(1, 1 << n)]


def pair_product(A: FiniteAlgebra, left_a, right_a, left_b, right_b):
    """``(alpha_L, alpha_R) . (beta_L, beta_R)``.

    First component: ``a.b`` for ``a`` in alpha_L and ``b`` in beta_R.  Second:
    all ``a1.(a2.( ... (an.b)))`` with ``n >= 1``, every ``ai`` in alpha_L and
    ``b`` in beta_R.
    """
    first = frozenset(A.op("dot", a, b) for a in left_a for b in right_b)
    second = set(first)
    frontier = set(first)
    while frontier:
        nxt = {A.op("dot", a, r) for a in left_a for r in frontier} - second
        second |= nxt
        frontier = nxt
    return first, frozenset(second)


def powerset_squared_algebra(A: FiniteAlgebra, budget: int = 10_000) -> FiniteAlgebra:
    subs = _subsets(A.size)
    pairs = [(x, y) for x in subs for y in subs]
    if len(pairs) > budget:
        raise AlgebraError(f"pair algebra would have {len(pairs)} elements")
    index = {pq: i for i, pq in enumerate(pairs)}
    table = []
    for (al, ar), (bl, br) in itertools.product(pairs, pairs):
        table.append(index[pair_product(A, al, ar, bl, br)])

    def name(s):
        return "{" + ",".join(A.names[x] for x in sorted(s)) + "}"

    names = [f"({name(x)};{name(y)})" for x, y in pairs]
    return FiniteAlgebra(A.presentation, len(pairs), {"dot": table}, names), index


def powerset_squared_image(L: RecognizedLanguage, f: LetterMap, bound: int = 3,
                           margin: int = 1):
    """``(candidate, outcome)``; ``candidate`` is None when the pair algebra fails the equation."""
    if not f.surjective:
        raise ValueError("letter map must be surjective")
    A = L.algebra
    if set(A.presentation.arity) != {"dot"}:
        raise ValueError("expected the single binary operation dot")
    P, index = powerset_squared_algebra(A)
    sat = check_satisfies(P)
    if not sat:
        return None, Refuted((("check", "powerset-squared"), ("stage", "equation"),
                              ("assignment", tuple((x, P.names[v]) for x, v in sat.assignment))))
    h = L.h0
    h0 = {}
    for y in f.target:
        img = frozenset(h[x] for x in f.preimage(y))
        h0[y] = index[(img, img)]
    accept = {i for (left, _), i in index.items() if left & L.accept}
    candidate = RecognizedLanguage.make(P, h0, accept)
    F_gamma = build(A.presentation, f.target, bound)
    brute = direct_image_bruteforce(L, f, F_gamma, margin)
    return candidate, cross_check(candidate, brute, F_gamma, "powerset-squared")
