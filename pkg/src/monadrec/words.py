"""Word-level view of presentations built on an associative operation.

When a presentation contains associativity for a binary operation (plus,
optionally, a two-sided unit) and every other equation only uses that
operation, the unit and variables, its terms are words and its equations
are string rewriting rules whose variables range over words.  Equivalence
classes can then be explored exactly by breadth-first search, and a class
that never grows past a length cap is known completely.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .presentation import Presentation, Term, leaf, match, node, var


@dataclass(frozen=True)
class WordTheory:
    op: str
    unit: str | None
    rules: tuple  # (lhs, rhs) pairs of variable-name tuples

    def word(self, t: Term):
        """Letters of ``t`` left to right, or None if ``t`` is not a word term."""
        out: list = []
        stack = [t]
        while stack:
            u = stack.pop()
            if u.is_leaf:
                if u.is_var:
                    return None
                out.append(u.head)
            elif u.head == self.op:
                stack.extend(reversed(u.args))
            elif u.head == self.unit and not u.args:
                continue
            else:
                return None
        return tuple(out)

    def term(self, w) -> Term:
        """Right-nested term for a word; the empty word is the unit."""
        if not w:
            if self.unit is None:
                raise ValueError("empty word without a unit")
            return node(self.unit)
        t = leaf(w[-1])
        for x in reversed(w[:-1]):
            t = node(self.op, leaf(x), t)
        return t

    @property
    def allow_empty(self) -> bool:
        return self.unit is not None

    def neighbours(self, w: tuple) -> Iterator[tuple]:
        """Words one rule instance away from ``w``."""
        for lhs, rhs in self.rules:
            for a, b in ((lhs, rhs), (rhs, lhs)):
                for start in range(len(w) + 1):
                    for end, env in _match_at(a, w, start, {}, self.allow_empty):
                        if end == start and not a:
                            continue
                        image = tuple(x for v in b for x in env[v])
                        v2 = w[:start] + image + w[end:]
                        if v2 != w:
                            yield v2

    def closure(self, w: tuple, max_len: int, limit: int = 200_000):
        """``(words, complete)``: the class of ``w`` explored up to ``max_len``.

        ``complete`` is True when no rule instance ever led past the cap, so
        the returned set is the whole equivalence class.
        """
        seen = {w}
        queue = deque([w])
        complete = True
        while queue:
            u = queue.popleft()
            for v in self.neighbours(u):
                if len(v) > max_len:
                    complete = False
                    continue
                if v not in seen:
                    seen.add(v)
                    if len(seen) > limit:
                        return seen, False
                    queue.append(v)
        return seen, complete


def _match_at(pattern: tuple, w: tuple, pos: int, env: dict, allow_empty: bool):
    if not pattern:
        yield pos, dict(env)
        return
    v, rest = pattern[0], pattern[1:]
    if v in env:
        piece = env[v]
        if w[pos:pos + len(piece)] == piece:
            yield from _match_at(rest, w, pos + len(piece), env, allow_empty)
        return
    lo = 0 if allow_empty else 1
    for end in range(pos + lo, len(w) + 1):
        env[v] = w[pos:end]
        yield from _match_at(rest, w, end, env, allow_empty)
        del env[v]


def _var_word(t: Term, op: str, unit: str | None):
    if t.is_leaf:
        return (t.head,) if t.is_var else None
    if t.head == op:
        parts = [_var_word(a, op, unit) for a in t.args]
        if any(p is None for p in parts):
            return None
        return parts[0] + parts[1]
    if t.head == unit and not t.args:
        return ()
    return None


def word_theory(p: Presentation) -> WordTheory | None:
    """Recognise an associative presentation; None if it is not one."""
    arity = p.arity
    x, y, z = var("?x"), var("?y"), var("?z")
    for op, k in p.signature.operations:
        if k != 2:
            continue
        left = node(op, node(op, x, y), z)
        right = node(op, x, node(op, y, z))
        assoc = [i for i, eq in enumerate(p.equations)
                 if _same_up_to_renaming((eq.lhs, eq.rhs), (left, right))
                 or _same_up_to_renaming((eq.lhs, eq.rhs), (right, left))]
        if not assoc:
            continue
        unit = None
        unit_eqs: list = []
        for c in p.signature.constants():
            laws = [i for i, eq in enumerate(p.equations)
                    if any(_same_up_to_renaming((eq.lhs, eq.rhs), pair)
                           for pair in ((node(op, node(c), x), x), (x, node(op, node(c), x)),
                                        (node(op, x, node(c)), x), (x, node(op, x, node(c)))))]
            if len(laws) >= 2:
                unit, unit_eqs = c, laws
                break
        allowed = {op} | ({unit} if unit else set())
        if set(arity) - allowed:
            return None
        rules = []
        for i, eq in enumerate(p.equations):
            if i in assoc or i in unit_eqs:
                continue
            a, b = _var_word(eq.lhs, op, unit), _var_word(eq.rhs, op, unit)
            if a is None or b is None:
                return None
            rules.append((a, b))
        return WordTheory(op, unit, tuple(rules))
    return None


def _same_up_to_renaming(pair, pattern) -> bool:
    env = match(node("=", *pattern), node("=", *pair))
    if env is None:
        return False
    images = list(env.values())
    return all(t.is_var for t in images) and len(set(images)) == len(images)
