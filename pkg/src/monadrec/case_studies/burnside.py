"""Words modulo ``xxx = xx`` over the alphabet ``{a, b, c, 0}``.

Words are plain strings.  One rewrite step replaces a factor ``uuu`` by
``uu`` or the other way round, for any nonempty ``u``.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass

DEFAULT_BASE = r"[abc]*0[abc]*0"
GAMMA = "abc"


@dataclass(frozen=True)
class Member:
    trace: tuple  # words from the input to a base word, one step apart

    name = "Member"


@dataclass(frozen=True)
class NonMember:
    definitive: bool
    explored: int
    reason: str

    name = "NonMember"


def cube_square_steps(w: str):
    """All words one ``uuu <-> uu`` step away from ``w``."""
    out = set()
    n = len(w)
    for i in range(n):
        for k in range(1, (n - i) // 2 + 1):
            u = w[i:i + k]
            if w[i + k:i + 2 * k] != u:
                continue
            out.add(w[:i + 2 * k] + u + w[i + 2 * k:])
            if w[i + 2 * k:i + 3 * k] == u:
                out.add(w[:i + 2 * k] + w[i + 3 * k:])
    out.discard(w)
    return out


def has_square(w: str) -> bool:
    n = len(w)
    return any(w[i:i + k] == w[i + k:i + 2 * k]
               for i in range(n) for k in range(1, (n - i) // 2 + 1))


def burnside_member(w: str, base: str | None = None, length_budget: int | None = None,
                    limit: int = 500_000):
    """Search the class of ``w`` for a word matching ``base``.

    Growing steps are only taken while the result fits ``length_budget``
    (default: ``len(w) + 3``).  A negative answer is definitive when ``w``
    has no square, or when the search never had to drop a word for length.
    """
    pattern = re.compile(base or DEFAULT_BASE)
    if length_budget is None:
        length_budget = len(w) + 3
    if length_budget < len(w):
        raise ValueError("length budget is shorter than the word")
    if pattern.fullmatch(w):
        return Member((w,))
    if not has_square(w):
        return NonMember(True, 1, "square-free: the class is a singleton")
    parent = {w: None}
    queue = deque([w])
    clipped = False
    while queue:
        u = queue.popleft()
        for v in cube_square_steps(u):
            if len(v) > length_budget:
                clipped = True
                continue
            if v in parent:
                continue
            parent[v] = u
            if pattern.fullmatch(v):
                trace = [v]
                while parent[trace[-1]] is not None:
                    trace.append(parent[trace[-1]])
                return Member(tuple(reversed(trace)))
            if len(parent) > limit:
                return NonMember(False, len(parent), "search limit reached")
            queue.append(v)
    if clipped:
        return NonMember(False, len(parent), f"no base word up to length {length_budget}")
    return NonMember(True, len(parent), "the whole class was explored")


def squarefree_words(alphabet: str = GAMMA, length: int = 1) -> list:
    """Every square-free word of exactly ``length`` letters, in lexicographic order."""
    if len(alphabet) != 3:
        raise ValueError("expected a three-letter alphabet")
    letters = sorted(alphabet)
    out: list = []

    def extend(w: str):
        if len(w) == length:
            out.append(w)
            return
        for x in letters:
            v = w + x
            n = len(v)
            if any(v[n - 2 * k:n - k] == v[n - k:] for k in range(1, n // 2 + 1)):
                continue
            extend(v)

    if length == 0:
        return [""]
    extend("")
    return out


def gamma01_words(max_len: int):
    """Words of ``[abc]*0[abc]*1`` up to ``max_len`` letters."""
    for n in range(2, max_len + 1):
        for pos in range(n - 1):
            for fill in itertools.product(GAMMA, repeat=n - 2):
                yield "".join(fill[:pos]) + "0" + "".join(fill[pos:]) + "1"


def check_gamma01_closure(max_len: int = 10):
    """``(words checked, violations)``: single steps never leave ``[abc]*0[abc]*1``."""
    pattern = re.compile(r"[abc]*0[abc]*1")
    count = 0
    bad = []
    for w in gamma01_words(max_len):
        count += 1
        for v in cube_square_steps(w):
            if not pattern.fullmatch(v):
                bad.append((w, v))
    return count, bad
