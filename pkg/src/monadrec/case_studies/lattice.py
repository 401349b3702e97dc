"""Free lattices: Whitman's order, canonical forms and direct images.

Lattice terms are n-ary and flattened, with children sorted by their printed
form and duplicates removed.  Sizes count binary operations, so a join of
``k`` children adds ``k - 1`` to the sizes of the children.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ..catalog import theory
from ..finite_algebra import FiniteAlgebra, check_satisfies, generated_subalgebra, product
from ..presentation import LetterMap, Term, leaf, node
from ..recognition import RecognizedLanguage, Refuted, Unknown, Verified, member

JOIN, MEET, GEN = "join", "meet", "gen"
_DUAL = {JOIN: MEET, MEET: JOIN}


class LatticeTerm:
    __slots__ = ("kind", "name", "kids", "_key", "_hash")

    def __init__(self, kind: str, name: str | None = None, kids: tuple = ()):
        self.kind = kind
        self.name = name
        self.kids = kids
        if kind == GEN:
            self._key = name
        else:
            self._key = "(" + kind + " " + " ".join(k._key for k in kids) + ")"
        self._hash = hash(self._key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeTerm) and self._key == other._key

    def __lt__(self, other) -> bool:
        return self._key < other._key

    def __str__(self) -> str:
        return self._key

    def __repr__(self) -> str:
        return f"LatticeTerm({self._key})"

    @property
    def size(self) -> int:
        if self.kind == GEN:
            return 0
        return len(self.kids) - 1 + sum(k.size for k in self.kids)

    def generators(self) -> set:
        if self.kind == GEN:
            return {self.name}
        return set().union(*(k.generators() for k in self.kids))


def gen(name: str) -> LatticeTerm:
    return LatticeTerm(GEN, name)


def _combine(kind: str, parts) -> LatticeTerm:
    flat = set()
    for t in parts:
        if t.kind == kind:
            flat.update(t.kids)
        else:
            flat.add(t)
    if not flat:
        raise ValueError(f"empty {kind}")
    if len(flat) == 1:
        return next(iter(flat))
    return LatticeTerm(kind, None, tuple(sorted(flat)))


def join(*parts: LatticeTerm) -> LatticeTerm:
    return _combine(JOIN, parts)


def meet(*parts: LatticeTerm) -> LatticeTerm:
    return _combine(MEET, parts)


@lru_cache(maxsize=1 << 20)
def whitman_leq(s: LatticeTerm, t: LatticeTerm) -> bool:
    """``s <= t`` in the free lattice.

    Joins on the left and meets on the right split into all of their parts.
    What remains is a generator or meet below a generator or join: a
    generator below a generator only when they coincide, and otherwise some
    meetand of ``s`` lies below ``t`` or ``s`` lies below some joinand of ``t``
    (Whitman's condition).
    """
    if s == t:
        return True
    if s.kind == JOIN:
        return all(whitman_leq(k, t) for k in s.kids)
    if t.kind == MEET:
        return all(whitman_leq(s, k) for k in t.kids)
    if s.kind == GEN and t.kind == GEN:
        return False
    if s.kind == MEET and any(whitman_leq(k, t) for k in s.kids):
        return True
    return t.kind == JOIN and any(whitman_leq(s, k) for k in t.kids)


def lattice_equal(s: LatticeTerm, t: LatticeTerm) -> bool:
    return whitman_leq(s, t) and whitman_leq(t, s)


def _below(kind: str, a: LatticeTerm, b: LatticeTerm) -> bool:
    # order in which ``a`` is redundant next to ``b`` inside a ``kind`` node
    return whitman_leq(a, b) if kind == JOIN else whitman_leq(b, a)


@lru_cache(maxsize=1 << 18)
def lattice_canonical_form(t: LatticeTerm) -> LatticeTerm:
    """Drop redundant joinands and meetands until none is left.

    A part below another part goes away; a part of the dual kind is replaced
    by one of its own children when that child already lies below the whole
    term (dually for meets).  Both moves keep the value and shrink the term.
    """
    if t.kind == GEN:
        return t
    kind = t.kind
    whole = _combine(kind, [lattice_canonical_form(k) for k in t.kids])
    while whole.kind == kind:
        parts = list(whole.kids)
        keep = [a for i, a in enumerate(parts)
                if not any(j != i and _below(kind, a, b) for j, b in enumerate(parts))]
        if len(keep) < len(parts):
            whole = _combine(kind, keep)
            continue
        replaced = None
        for i, a in enumerate(parts):
            if a.kind != _DUAL[kind]:
                continue
            for c in a.kids:
                if _below(kind, c, whole):
                    replaced = parts[:i] + [c] + parts[i + 1:]
                    break
            if replaced:
                break
        if replaced is None:
            break
        whole = _combine(kind, replaced)
    return whole


def is_canonical(t: LatticeTerm) -> bool:
    return lattice_canonical_form(t) == t


# ------------------------------------------------------------ conversions


def to_term(t: LatticeTerm) -> Term:
    """Right-nested binary term over ``join``/``meet``."""
    if t.kind == GEN:
        return leaf(t.name)
    kids = [to_term(k) for k in t.kids]
    out = kids[-1]
    for k in reversed(kids[:-1]):
        out = node(t.kind, k, out)
    return out


def from_term(t: Term) -> LatticeTerm:
    if t.is_leaf:
        return gen(t.head)
    if t.head not in (JOIN, MEET) or len(t.args) != 2:
        raise ValueError(f"not a lattice term: {t}")
    return _combine(t.head, [from_term(a) for a in t.args])


def rename_lattice(f, t: LatticeTerm) -> LatticeTerm:
    if t.kind == GEN:
        return gen(f(t.name))
    return _combine(t.kind, [rename_lattice(f, k) for k in t.kids])


def lattice_elements(alphabet, max_size: int) -> dict:
    """Canonical forms of all elements with a presentation of size ``<= max_size``.

    Maps each canonical form to the least size of a binary term for it.
    """
    best: dict = {}
    by_size: list = [[]]
    for x in sorted(alphabet):
        g = gen(x)
        best[g] = 0
        by_size[0].append(g)
    for n in range(1, max_size + 1):
        layer = []
        for i in range(n):
            j = n - 1 - i
            if j < i:
                break
            for s in by_size[i]:
                for t in by_size[j]:
                    for op in (join, meet):
                        c = lattice_canonical_form(op(s, t))
                        if c not in best:
                            best[c] = n
                            layer.append(c)
        by_size.append(layer)
    return best


def lattice_order_chain():
    """The witness ``t1 < (t1 v s) ^ t2 < t2`` with ``s`` incomparable to both ends."""
    p, q, s = gen("p"), gen("q"), gen("s")
    t1, t2 = meet(p, q), join(p, q)
    mid = meet(join(t1, s), t2)
    checks = {
        "t1 <= mid": whitman_leq(t1, mid),
        "not mid <= t1": not whitman_leq(mid, t1),
        "mid <= t2": whitman_leq(mid, t2),
        "not t2 <= mid": not whitman_leq(t2, mid),
        "s incomparable with t1": not whitman_leq(s, t1) and not whitman_leq(t1, s),
        "s incomparable with t2": not whitman_leq(s, t2) and not whitman_leq(t2, s),
        "canonical form keeps s": "s" in lattice_canonical_form(mid).generators(),
    }
    return (t1, mid, t2), checks


# ---------------------------------------------------------- direct images


def as_lattice(A: FiniteAlgebra) -> FiniteAlgebra:
    """``A`` re-read over the lattice signature, checked against its laws."""
    lat = theory("lattice")
    try:
        B = FiniteAlgebra(lat, A.size, {o: A.tables[o] for o in (JOIN, MEET)}, A.names)
    except KeyError:
        raise ValueError("recognizing algebra has no join/meet tables") from None
    if not check_satisfies(B):
        raise ValueError("recognizing algebra is not a lattice")
    return B


def _leq(A: FiniteAlgebra, a: int, b: int) -> bool:
    return A.op(JOIN, a, b) == b


def _fold(A: FiniteAlgebra, op: str, xs) -> int:
    xs = list(xs)
    out = xs[0]
    for x in xs[1:]:
        out = A.op(op, out, x)
    return out


@dataclass(frozen=True)
class LatticeImage:
    language: RecognizedLanguage
    trail: tuple
    outcome: object


def lattice_direct_image(L: RecognizedLanguage, f: LetterMap, bound: int = 5,
                         margin: int = 2) -> LatticeImage:
    """Recognizer for the image of ``L`` along ``f``, cross-checked by brute force.

    Each accepted value ``a`` reachable from the letters contributes the
    terms whose join-of-preimages value lies above ``a`` and whose
    meet-of-preimages value lies below ``a``.  Both values are tracked at
    once in the square of the recognizing lattice.
    """
    if not f.surjective:
        raise ValueError("letter map must be surjective")
    A = as_lattice(L.algebra)
    h = L.h0
    up = {y: _fold(A, JOIN, (h[x] for x in f.preimage(y))) for y in f.target}
    down = {y: _fold(A, MEET, (h[x] for x in f.preimage(y))) for y in f.target}
    _, reach = generated_subalgebra(A, h.values())
    points = sorted(set(L.accept) & set(reach))
    n = A.size
    AA = product(A, A)
    accept = set()
    trail = []
    for a in points:
        cells = {b * n + c for b in range(n) for c in range(n)
                 if _leq(A, a, b) and _leq(A, c, a)}
        accept |= cells
        trail.append(f"value {A.names[a]}: join-side value >= {A.names[a]} and "
                     f"meet-side value <= {A.names[a]} ({len(cells)} pairs)")
    skipped = sorted(set(L.accept) - set(reach))
    if skipped:
        trail.append("accepted values never reached: "
                     + ", ".join(A.names[a] for a in skipped))
    h0 = {y: up[y] * n + down[y] for y in f.target}
    candidate = RecognizedLanguage.make(AA, h0, accept)
    outcome = cross_check_lattice(candidate, L, f, bound, margin)
    return LatticeImage(candidate, tuple(trail), outcome)


def lattice_upward_image(L: RecognizedLanguage, f: LetterMap) -> RecognizedLanguage:
    """Image of an upward-closed language: one inverse image along the join side."""
    A = as_lattice(L.algebra)
    acc = set(L.accept)
    if any(_leq(A, a, b) and b not in acc for a in acc for b in range(A.size)):
        raise ValueError("accepting set is not upward closed")
    h = L.h0
    up = {y: _fold(A, JOIN, (h[x] for x in f.preimage(y))) for y in f.target}
    return RecognizedLanguage.make(L.algebra, up, acc)


def lattice_image_bruteforce(L: RecognizedLanguage, f: LetterMap, bound: int,
                             margin: int):
    """``(image elements, target elements)`` over canonical forms up to ``bound``."""
    target = lattice_elements(f.target, bound)
    source = lattice_elements(f.source, bound + margin)
    hits = set()
    for s in source:
        if member(L, to_term(s)):
            img = lattice_canonical_form(rename_lattice(f, s))
            if img in target:
                hits.add(img)
    return hits, target


def cross_check_lattice(candidate: RecognizedLanguage, L: RecognizedLanguage,
                        f: LetterMap, bound: int, margin: int):
    hits, target = lattice_image_bruteforce(L, f, bound, margin)
    complete = len(f.source) <= 2  # the free lattice on two generators has four elements
    missing, extra = [], []
    for t in sorted(target, key=lambda u: (target[u], str(u))):
        got = member(candidate, to_term(t))
        if t in hits and not got:
            missing.append(t)
        elif got and t not in hits:
            extra.append(t)
    info = (("check", "lattice"), ("bound", bound), ("margin", margin),
            ("elements", len(target)))
    if not missing and not extra:
        return Verified(info + (("complete", complete),))
    if missing:
        return Refuted((("check", "lattice"), ("term", str(missing[0])),
                        ("reason", "image element rejected by candidate")))
    if complete:
        return Refuted((("check", "lattice"), ("term", str(extra[0])),
                        ("reason", "candidate accepts an element outside the image")))
    return Unknown(info + (("term", str(extra[0])),
                           ("reason", "candidate accepts an element with no preimage found")))


def chain_lattice(n: int) -> FiniteAlgebra:
    """The ``n``-element chain ``0 < 1 < ... < n-1``."""
    rng = range(n)
    tables = {JOIN: [max(a, b) for a, b in itertools.product(rng, rng)],
              MEET: [min(a, b) for a, b in itertools.product(rng, rng)]}
    return FiniteAlgebra(theory("lattice"), n, tables)


def diamond_lattice() -> FiniteAlgebra:
    """``M3``: bottom, three atoms, top."""
    order = {(a, b) for a in range(5) for b in range(5)
             if a == b or a == 0 or b == 4}

    def sup(a, b):
        ups = [c for c in range(5) if (a, c) in order and (b, c) in order]
        return next(c for c in ups if all((c, d) in order for d in ups))

    def inf(a, b):
        downs = [c for c in range(5) if (c, a) in order and (c, b) in order]
        return next(c for c in downs if all((d, c) in order for d in downs))

    rng = range(5)
    tables = {JOIN: [sup(a, b) for a, b in itertools.product(rng, rng)],
              MEET: [inf(a, b) for a, b in itertools.product(rng, rng)]}
    return FiniteAlgebra(theory("lattice"), 5, tables, ["0", "x", "y", "z", "1"])
