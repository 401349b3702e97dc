"""The reader monad on eventually constant sequences.

A sequence ``prefix . tail^omega`` is stored with its prefix shortened as
far as the tail allows, so equal sequences have equal representations.
Positions are numbered from 1.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from ..presentation import LetterMap


@dataclass(frozen=True)
class EventuallyConstantWord:
    prefix: tuple
    tail: Hashable

    def __post_init__(self):
        p = tuple(self.prefix)
        while p and p[-1] == self.tail:
            p = p[:-1]
        object.__setattr__(self, "prefix", p)

    @classmethod
    def constant(cls, x) -> "EventuallyConstantWord":
        return cls((), x)

    def at(self, n: int):
        if n < 1:
            raise IndexError("positions start at 1")
        return self.prefix[n - 1] if n <= len(self.prefix) else self.tail

    def map(self, f) -> "EventuallyConstantWord":
        return EventuallyConstantWord(tuple(f(x) for x in self.prefix), f(self.tail))

    def __str__(self) -> str:
        return "".join(map(str, self.prefix)) + f"({self.tail})^w"


def diagonal(seq: EventuallyConstantWord) -> EventuallyConstantWord:
    """Multiplication: the ``n``-th letter of the ``n``-th sequence."""
    cut = max([len(seq.prefix)] + [len(w.prefix) for w in seq.prefix]
              + [len(seq.tail.prefix)]) + 1
    return EventuallyConstantWord(tuple(seq.at(n).at(n) for n in range(1, cut)),
                                  seq.tail.tail)


@dataclass(frozen=True)
class RectangularLanguage:
    alphabet: tuple
    constraints: tuple  # sorted (position, frozenset of letters)

    @classmethod
    def make(cls, alphabet: Iterable[str], constraints: Mapping[int, Iterable[str]] | None = None):
        alphabet = tuple(sorted(alphabet))
        cons = []
        for n, zs in sorted((constraints or {}).items()):
            zs = frozenset(zs)
            if n < 1:
                raise ValueError("positions start at 1")
            if not zs <= set(alphabet):
                raise ValueError(f"constraint at {n} uses letters outside the alphabet")
            if zs != set(alphabet):
                cons.append((n, zs))
        return cls(alphabet, tuple(cons))

    @property
    def positions(self) -> tuple:
        return tuple(n for n, _ in self.constraints)

    @property
    def nonempty(self) -> bool:
        return all(zs for _, zs in self.constraints)

    def member(self, w: EventuallyConstantWord) -> bool:
        return all(w.at(n) in zs for n, zs in self.constraints)

    def __str__(self) -> str:
        if not self.constraints:
            return "{}"
        return "{" + ", ".join(f"{n}:{''.join(sorted(zs))}" for n, zs in self.constraints) + "}"


def union_member(langs: Sequence[RectangularLanguage], w: EventuallyConstantWord) -> bool:
    return any(L.member(w) for L in langs)


def reader_direct_image(langs, f: LetterMap) -> list:
    """Image of a union of rectangular languages, one constraint set at a time."""
    if isinstance(langs, RectangularLanguage):
        langs = [langs]
    if not f.surjective:
        raise ValueError("letter map must be surjective: the image of a full "
                         "coordinate would no longer be full")
    out = []
    for L in langs:
        if set(L.alphabet) != set(f.source):
            raise ValueError("language alphabet differs from the map's source")
        if not L.nonempty:
            continue
        out.append(RectangularLanguage.make(
            f.target, {n: {f(x) for x in zs} for n, zs in L.constraints}))
    return out


@dataclass(frozen=True)
class ReaderRecognizer:
    """Carrier: functions from the constrained positions to letters."""

    alphabet: tuple
    positions: tuple
    accept: frozenset

    @property
    def carrier(self) -> list:
        return list(itertools.product(self.alphabet, repeat=len(self.positions)))

    def h(self, w: EventuallyConstantWord) -> tuple:
        return tuple(w.at(n) for n in self.positions)

    def act(self, seq: EventuallyConstantWord) -> tuple:
        """Structure map on a sequence of carrier elements: read off the diagonal."""
        return tuple(seq.at(n)[i] for i, n in enumerate(self.positions))

    def member(self, w: EventuallyConstantWord) -> bool:
        return self.h(w) in self.accept


def reader_recognizer(L: RectangularLanguage) -> ReaderRecognizer:
    if not L.nonempty:
        raise ValueError("a constrained position admits no letter")
    zs = dict(L.constraints)
    positions = L.positions
    accept = frozenset(g for g in itertools.product(L.alphabet, repeat=len(positions))
                       if all(g[i] in zs[n] for i, n in enumerate(positions)))
    return ReaderRecognizer(L.alphabet, positions, accept)


# ------------------------------------------------------------- sampling


def random_word(rng: random.Random, alphabet: Sequence, max_prefix: int = 6) -> EventuallyConstantWord:
    k = rng.randrange(max_prefix + 1)
    return EventuallyConstantWord(tuple(rng.choice(alphabet) for _ in range(k)),
                                  rng.choice(alphabet))


def check_em_axioms(R: ReaderRecognizer, samples: int = 200, seed: int = 0) -> bool:
    """Unit and associativity of ``act`` on random sequences of sequences."""
    rng = random.Random(seed)
    carrier = R.carrier
    for _ in range(samples):
        g = rng.choice(carrier)
        if R.act(EventuallyConstantWord.constant(g)) != g:
            return False
        inner = [random_word(rng, carrier, 4) for _ in range(rng.randrange(5) + 1)]
        outer = EventuallyConstantWord(tuple(inner[:-1]), inner[-1])
        if R.act(diagonal(outer)) != R.act(outer.map(R.act)):
            return False
    return True


def words_upto(alphabet: Sequence, prefix_len: int):
    for pre in itertools.product(sorted(alphabet), repeat=prefix_len):
        for t in sorted(alphabet):
            yield EventuallyConstantWord(pre, t)


def reader_image_bruteforce(langs: Sequence[RectangularLanguage], f: LetterMap,
                            prefix_len: int) -> set:
    """Images of all source words with a prefix of ``prefix_len`` letters."""
    out = set()
    for w in words_upto(f.source, prefix_len):
        if union_member(langs, w):
            out.add(w.map(f))
    return out


def reader_image_agrees(langs: Sequence[RectangularLanguage], f: LetterMap) -> bool:
    """Constructed image versus brute force on every target word up to the last constrained position."""
    cut = max([0] + [n for L in langs for n in L.positions]) + 1
    image = reader_direct_image(langs, f)
    brute = reader_image_bruteforce(langs, f, cut)
    built = {w for w in words_upto(f.target, cut) if union_member(image, w)}
    return brute == built
