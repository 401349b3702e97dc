"""Bounded approximation of free algebras by congruence closure.

The universe ``U(bound)`` of ground terms with at most ``bound`` operation
nodes is never listed term by term.  Instead an e-graph holds one e-node per
(operation, child classes) combination whose cheapest realisation fits in the
bound; every term of the universe is then represented by construction.
Equation instances are found by e-matching both sides and joining matches on
shared variables, so an instance is merged exactly when both of its sides
are present.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .presentation import (
    LetterMap,
    Presentation,
    Term,
    leaf,
    match,
    node,
    replace_leaves,
    show,
    subterms,
    term_key,
    variables,
)

DEFAULT_BOUND = 7
DEFAULT_NODE_BUDGET = 400_000
INF = 1 << 30


class ResourceError(RuntimeError):
    pass


class BoundError(ValueError):
    pass


# ------------------------------------------------------------------ verdicts


@dataclass(frozen=True)
class Equal:
    def __bool__(self) -> bool:
        return True

    def __str__(self) -> str:
        return "Equal"


@dataclass(frozen=True)
class NotProvenEqual:
    bound: int
    definitive: bool = False

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        tag = "definitive" if self.definitive else "bound-relative"
        return f"NotProvenEqual(bound={self.bound}, {tag})"


# -------------------------------------------------------- monad structure


def unit(letter: str) -> Term:
    return leaf(letter)


def rename(f: LetterMap | Mapping[str, str], t: Term) -> Term:
    """Apply a letter map to every letter leaf (the functor action)."""
    table = f.as_dict() if isinstance(f, LetterMap) else dict(f)
    binding = {x: leaf(y) for x, y in table.items()}
    return replace_leaves(t, binding, strict=True)


def flatten(t: Term, binding: Mapping[str, Term]) -> Term:
    """Multiplication: substitute each handle leaf by its bound term."""
    return replace_leaves(t, binding, strict=True)


# ------------------------------------------------------------------ e-graph


class _EGraph:
    def __init__(self, presentation: Presentation, alphabet, bound: int,
                 node_budget: int):
        self.pres = presentation
        self.bound = bound
        self.budget = node_budget
        self.parent: list = []
        self.minsize: list = []
        self.hashcons: dict = {}  # (op, child ids) -> class id
        self.letter_class: dict = {}
        self.log: list = []  # (equation index, binding var -> class id)
        self.ops = sorted(presentation.signature.operations)
        for x in alphabet:
            self.letter_class[x] = self._new_class(0)

    def _new_class(self, size: int) -> int:
        self.parent.append(len(self.parent))
        self.minsize.append(size)
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.parent[b] = a
        return True

    # -- growth --------------------------------------------------------
    def grow(self, cap: int) -> int:
        """Add every missing e-node whose cheapest realisation fits in ``cap``."""
        buckets: dict = {}
        for c in range(len(self.parent)):
            if self.find(c) == c and self.minsize[c] <= cap:
                buckets.setdefault(self.minsize[c], []).append(c)
        added = 0
        for s in range(1, cap + 1):
            fresh = []
            for op, k in self.ops:
                for parts in _compositions(s - 1, k):
                    pools = [buckets.get(p, ()) for p in parts]
                    if any(not pool for pool in pools):
                        continue
                    for kids in itertools.product(*pools):
                        key = (op, kids)
                        if key in self.hashcons:
                            continue
                        c = self._new_class(s)
                        self.hashcons[key] = c
                        fresh.append(c)
                        added += 1
                        if len(self.hashcons) > self.budget:
                            raise ResourceError(
                                f"term universe at size bound {self.bound} exceeds "
                                f"the node budget of {self.budget}")
            if fresh:
                buckets.setdefault(s, []).extend(fresh)
        return added

    # -- congruence ----------------------------------------------------
    def rebuild(self) -> None:
        while True:
            table: dict = {}
            pending = []
            for (op, kids), c in self.hashcons.items():
                key = (op, tuple(self.find(k) for k in kids))
                c = self.find(c)
                other = table.get(key)
                if other is None:
                    table[key] = c
                elif self.find(other) != c:
                    pending.append((other, c))
            self.hashcons = table
            merged = False
            for a, b in pending:
                merged |= self.union(a, b)
            if not merged:
                self.hashcons = {k: self.find(c) for k, c in table.items()}
                return

    def recompute_minsize(self) -> None:
        roots = {self.find(c) for c in range(len(self.parent))}
        size = {c: INF for c in roots}
        for c in self.letter_class.values():
            size[self.find(c)] = 0
        changed = True
        while changed:
            changed = False
            for (op, kids), c in self.hashcons.items():
                s = 1 + sum(size[k] for k in kids)
                if s < size[c]:
                    size[c] = s
                    changed = True
        for c, s in size.items():
            self.minsize[c] = s

    # -- e-matching ----------------------------------------------------
    def index(self) -> None:
        self.by_op: dict = {}
        self.by_class_op: dict = {}
        for (op, kids), c in self.hashcons.items():
            self.by_op.setdefault(op, []).append((kids, c))
            self.by_class_op.setdefault((c, op), []).append(kids)
        self.roots = sorted({self.find(c) for c in range(len(self.parent))})

    def compile(self, pattern: Term, slots: dict):
        """Turn a pattern into a function (class, binding) -> bindings.

        Bindings are tuples indexed by ``slots``; None marks unbound.
        """
        if pattern.is_leaf:
            i = slots[pattern.head]

            def match_var(c, b):
                v = b[i]
                if v is None:
                    return [b[:i] + (c,) + b[i + 1:]]
                return [b] if v == c else []
            return match_var
        op = pattern.head
        kid_fns = [self.compile(a, slots) for a in pattern.args]

        def match_kids(kids, b):
            bs = [b]
            for fn, k in zip(kid_fns, kids):
                bs = [b2 for b1 in bs for b2 in fn(k, b1)]
                if not bs:
                    break
            return bs

        def match_node(c, b):
            out = []
            for kids in self.by_class_op.get((c, op), ()):
                out.extend(match_kids(kids, b))
            return out
        match_node.kids = match_kids
        return match_node

    def matches(self, pattern: Term, slots: dict):
        """All (class, binding tuple) pairs where ``pattern`` occurs."""
        empty = (None,) * len(slots)
        if pattern.is_var:
            i = slots[pattern.head]
            return [(c, empty[:i] + (c,) + empty[i + 1:]) for c in self.roots]
        fn = self.compile(pattern, slots)
        out = []
        for kids, c in self.by_op.get(pattern.head, ()):
            for b in fn.kids(kids, empty):
                out.append((c, b))
        return out

    def apply_equations(self) -> int:
        self.index()
        merges = []
        for idx, eq in enumerate(self.pres.equations):
            names = sorted(variables(eq.lhs) | variables(eq.rhs))
            slots = {x: i for i, x in enumerate(names)}
            shared = [slots[x] for x in sorted(variables(eq.lhs) & variables(eq.rhs))]
            left: dict = {}
            for c, b in self.matches(eq.lhs, slots):
                key = tuple(b[i] for i in shared)
                left.setdefault(key, []).append((c, b))
            if not left:
                continue
            for c, b in self.matches(eq.rhs, slots):
                key = tuple(b[i] for i in shared)
                partners = left.get(key)
                if not partners:
                    continue
                for lc, lb in partners:
                    if self.find(lc) != self.find(c):
                        full = tuple(x if x is not None else y for x, y in zip(lb, b))
                        merges.append((lc, c, idx, dict(zip(names, full))))
        count = 0
        for a, b, idx, binding in merges:
            if self.union(a, b):
                count += 1
                self.log.append((idx, binding))
        return count

    def run(self) -> None:
        # Growing one size layer at a time lets equations collapse the
        # smaller layers before the next one multiplies them.
        for cap in range(1, self.bound + 1):
            while True:
                self.grow(cap)
                changed = False
                while self.apply_equations():
                    changed = True
                    self.rebuild()
                if not changed:
                    break
                # a lowered minimum size may enable e-nodes that were out of reach
                self.recompute_minsize()


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# --------------------------------------------------- public free algebra


class BoundedFreeAlgebra:
    """Frozen result of :func:`build`.

    Classes are numbered ``0..n-1`` in the canonical order of their
    representatives.  ``saturated`` means the classes form a finite model of
    the presentation generated by the letters, so they are the free algebra.
    """

    def __init__(self, presentation, alphabet, size_bound, hashcons, letter_class,
                 minsize, log, saturated, complete_within_bound):
        self.presentation = presentation
        self.alphabet = tuple(alphabet)
        self.size_bound = size_bound
        self._hashcons = hashcons
        self._letter_class = letter_class
        self.minsize = minsize
        self.log = log
        self.saturated = saturated
        self.complete_within_bound = complete_within_bound
        self.representatives = _representatives(hashcons, letter_class, len(minsize))
        self._nodes_of: dict = {}
        for (op, kids), c in hashcons.items():
            self._nodes_of.setdefault(c, []).append((op, kids))
        self._member_memo: dict = {}

    def __len__(self) -> int:
        return len(self.representatives)

    @property
    def num_classes(self) -> int:
        return len(self.representatives)

    @property
    def definitive(self) -> bool:
        return self.saturated or self.complete_within_bound

    def letter_class(self, x: str) -> int:
        return self._letter_class[x]

    def apply(self, op: str, kids: Iterable[int]):
        """Class of ``op(kids)`` or None when that e-node is outside the bound."""
        return self._hashcons.get((op, tuple(kids)))

    def nodes(self, c: int) -> list:
        return list(self._nodes_of.get(c, ()))

    def class_of(self, t: Term):
        """Class id of a ground term, or None if it is not represented."""
        if t.is_leaf:
            if t.is_var:
                raise BoundError(f"variable {t.head} in a ground term")
            if t.head not in self._letter_class:
                raise BoundError(f"letter {t.head!r} not in the alphabet")
            return self._letter_class[t.head]
        kids = []
        for a in t.args:
            c = self.class_of(a)
            if c is None:
                return None
            kids.append(c)
        return self._hashcons.get((t.head, tuple(kids)))

    def require_class(self, t: Term) -> int:
        if t.size > self.size_bound:
            raise BoundError(f"term of size {t.size} exceeds bound {self.size_bound}")
        c = self.class_of(t)
        if c is None:
            raise BoundError(f"term {show(t)} not represented at bound {self.size_bound}")
        return c

    def representative(self, c: int) -> Term:
        return self.representatives[c]

    def members(self, c: int, max_size: int | None = None) -> list:
        """Every term of class ``c`` with size at most ``max_size``."""
        if max_size is None:
            max_size = self.size_bound
        return sorted(self._members(c, max_size), key=term_key)

    def _members(self, c: int, budget: int) -> list:
        key = (c, budget)
        got = self._member_memo.get(key)
        if got is not None:
            return got
        out = [leaf(x) for x, lc in self._letter_class.items() if lc == c]
        for op, kids in self._nodes_of.get(c, ()):
            if 1 + sum(self.minsize[k] for k in kids) > budget:
                continue
            out.extend(self._member_tuples(op, kids, budget - 1))
        self._member_memo[key] = out
        return out

    def _member_tuples(self, op, kids, budget):
        if not kids:
            return [node(op)]
        results = []

        def go(i, remaining, acc):
            if i == len(kids):
                results.append(node(op, *acc))
                return
            rest_min = sum(self.minsize[k] for k in kids[i + 1:])
            for m in self._members(kids[i], remaining - rest_min):
                go(i + 1, remaining - m.size, acc + [m])

        go(0, budget, [])
        return results


def _representatives(hashcons, letter_class, n) -> list:
    best: list = [None] * n
    best_key: list = [None] * n
    for x, c in sorted(letter_class.items()):
        t = leaf(x)
        k = term_key(t)
        if best_key[c] is None or k < best_key[c]:
            best[c], best_key[c] = t, k
    changed = True
    items = sorted(hashcons.items())
    while changed:
        changed = False
        for (op, kids), c in items:
            if any(best[k] is None for k in kids):
                continue
            t = node(op, *(best[k] for k in kids))
            k = term_key(t)
            if best_key[c] is None or k < best_key[c]:
                best[c], best_key[c] = t, k
                changed = True
    return best


def build(p: Presentation, alphabet: Iterable[str], size_bound: int = DEFAULT_BOUND,
          node_budget: int = DEFAULT_NODE_BUDGET,
          satisfaction_budget: int = 2_000_000) -> BoundedFreeAlgebra:
    """Congruence closure of ``U(size_bound)`` over the given letters."""
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    alphabet = sorted(set(alphabet))
    for x in alphabet:
        if x.startswith("?") or x in p.arity:
            raise ValueError(f"bad letter {x!r}")
    eg = _EGraph(p, alphabet, size_bound, node_budget)
    eg.run()
    eg.recompute_minsize()

    roots = sorted({eg.find(c) for c in range(len(eg.parent))})
    raw_hc = {(op, tuple(eg.find(k) for k in kids)): eg.find(c)
              for (op, kids), c in eg.hashcons.items()}
    raw_letters = {x: eg.find(c) for x, c in eg.letter_class.items()}
    pos ={c: i for i, c in enumerate(roots)}
    hc = {(op, tuple(pos[k] for k in kids)): pos[c] for (op, kids), c in raw_hc.items()}
    lc = {x: pos[c] for x, c in raw_letters.items()}
    reps = _representatives(hc, lc, len(roots))
    order = sorted(range(len(roots)), key=lambda i: term_key(reps[i]))
    renum = {old: new for new, old in enumerate(order)}
    hc = {(op, tuple(renum[k] for k in kids)): renum[c] for (op, kids), c in hc.items()}
    lc = {x: renum[c] for x, c in lc.items()}
    minsize = [0] * len(roots)
    for old_root in roots:
        minsize[renum[pos[old_root]]] = eg.minsize[old_root]
    log = [(idx, {x: renum[pos[eg.find(c)]] for x, c in b.items()}) for idx, b in eg.log]

    saturated = _is_saturated(p, hc, len(roots), satisfaction_budget)
    return BoundedFreeAlgebra(p, alphabet, size_bound, hc, lc, minsize, log,
                              saturated, p.size_preserving())


def _is_saturated(p: Presentation, hc: dict, n: int, budget: int) -> bool:
    """Closed under every operation and a model of every equation."""
    work = 0
    for op, k in p.signature.operations:
        work += n ** k
        if work > budget:
            return False
        for kids in itertools.product(range(n), repeat=k):
            if (op, kids) not in hc:
                return False
    for eq in p.equations:
        vs = sorted(eq.variables())
        work += n ** len(vs)
        if work > budget:
            return False
        for vals in itertools.product(range(n), repeat=len(vs)):
            env = dict(zip(vs, vals))
            if _eval_classes(eq.lhs, env, hc) != _eval_classes(eq.rhs, env, hc):
                return False
    return True


def _eval_classes(t: Term, env: dict, hc: dict) -> int:
    if t.is_leaf:
        return env[t.head]
    return hc[(t.head, tuple(_eval_classes(a, env, hc) for a in t.args))]


# ----------------------------------------------------------------- queries


def decide_equal(F: BoundedFreeAlgebra, t: Term, s: Term):
    a = F.require_class(t)
    b = F.require_class(s)
    if a == b:
        return Equal()
    return NotProvenEqual(F.size_bound, F.definitive)


def enumerate_class(F: BoundedFreeAlgebra, t: Term) -> list:
    return F.members(F.require_class(t))


def class_algebra_tables(F: BoundedFreeAlgebra) -> dict:
    """Operation tables on classes; only meaningful once saturated."""
    if not F.saturated:
        raise BoundError("class algebra is not closed: free algebra not saturated")
    n = F.num_classes
    tables = {}
    for op, k in F.presentation.signature.operations:
        tables[op] = tuple(F.apply(op, kids)
                           for kids in itertools.product(range(n), repeat=k))
    return tables


# ------------------------------------------------------------ proof replay


def instance_terms(F: BoundedFreeAlgebra, idx: int, binding: Mapping[str, int]):
    eq = F.presentation.equations[idx]
    env = {x: F.representative(c) for x, c in binding.items()}
    return replace_leaves(eq.lhs, env), replace_leaves(eq.rhs, env)


def replay_proofs(F: BoundedFreeAlgebra) -> bool:
    """Re-derive the partition from the logged equation instances alone.

    An independent naive congruence closure is run over the concrete
    instance terms and every e-node term; each e-node term must come out
    equal to its class representative.
    """
    pres = F.presentation
    pairs = []
    for idx, binding in F.log:
        lhs, rhs = instance_terms(F, idx, binding)
        eq = pres.equations[idx]
        env = {x: F.representative(c) for x, c in binding.items()}
        if match(eq.lhs, lhs, env) is None or match(eq.rhs, rhs, env) is None:
            return False
        pairs.append((lhs, rhs))
    goals = []
    for c in range(F.num_classes):
        for op, kids in F.nodes(c):
            goals.append((node(op, *(F.representative(k) for k in kids)),
                          F.representative(c)))
    universe: set = set()

    def add(t):
        if t in universe:
            return
        universe.add(t)
        for a in t.args:
            add(a)

    for a, b in pairs + goals:
        add(a)
        add(b)
    terms = sorted(universe, key=term_key)
    ids = {t: i for i, t in enumerate(terms)}
    parent = list(range(len(terms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(ids[a])] = find(ids[b])
    changed = True
    while changed:
        changed = False
        sig: dict = {}
        for t in terms:
            if not t.args:
                continue
            key = (t.head, tuple(find(ids[a]) for a in t.args))
            other = sig.setdefault(key, ids[t])
            ra, rb = find(other), find(ids[t])
            if ra != rb:
                parent[ra] = rb
                changed = True
    return all(find(ids[a]) == find(ids[b]) for a, b in goals)


# ------------------------------------------------- syntactic rewriting


def rewrite_neighbours(p: Presentation, t: Term, max_size: int):
    """Terms one equation step away from ``t`` that stay within ``max_size``.

    A step replaces an instance of one side by the matching instance of the
    other; steps needing a variable absent from the matched side are skipped.
    """
    out = set()
    sides = []
    for eq in p.equations:
        for a, b in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
            if variables(b) <= variables(a):
                sides.append((a, b))

    def at(u: Term):
        for a, b in sides:
            env = match(a, u)
            if env is not None:
                yield replace_leaves(b, env, strict=False)
        for i, child in enumerate(u.args):
            for new in at(child):
                yield Term(u.head, u.args[:i] + (new,) + u.args[i + 1:], False)

    for v in at(t):
        if v.size <= max_size and v != t:
            out.add(v)
    return out


def rewrite_closure(p: Presentation, t: Term, max_size: int, limit: int = 200_000) -> set:
    """All terms reachable from ``t`` by equation steps inside ``max_size``."""
    seen = {t}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for v in rewrite_neighbours(p, u, max_size):
            if v not in seen:
                seen.add(v)
                if len(seen) > limit:
                    raise ResourceError(f"rewrite closure exceeds {limit} terms")
                queue.append(v)
    return seen


def exact_class(p: Presentation, t: Term, max_size: int, limit: int = 50_000):
    """``(terms, complete)`` for the equivalence class of ``t``.

    ``complete`` holds when no reachable term admits a step leaving
    ``max_size`` or a step that would invent a fresh variable, in which case
    the set is the whole class.
    """
    growing = []
    for eq in p.equations:
        for a, b in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
            if not variables(b) <= variables(a):
                growing.append(a)
    seen = {t}
    queue = deque([t])
    complete = True
    while queue:
        u = queue.popleft()
        if complete and any(match(a, sub) is not None for a in growing for sub in subterms(u)):
            complete = False
        for v in rewrite_neighbours(p, u, INF):
            if v.size > max_size:
                complete = False
                continue
            if v not in seen:
                seen.add(v)
                if len(seen) > limit:
                    return seen, False
                queue.append(v)
    return seen, complete


def is_single_step(p: Presentation, a: Term, b: Term) -> bool:
    """Whether ``a`` and ``b`` differ by one equation instance at one position."""
    if a == b:
        return True
    for eq in p.equations:
        for l, r in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
            env = match(l, a)
            if env is not None and match(r, b, env) is not None:
                return True
    if a.is_leaf or b.is_leaf or a.head != b.head or len(a.args) != len(b.args):
        return False
    diff = [i for i, (x, y) in enumerate(zip(a.args, b.args)) if x != y]
    return len(diff) == 1 and is_single_step(p, a.args[diff[0]], b.args[diff[0]])


def check_rewrite_chain(p: Presentation, chain: list) -> bool:
    return all(is_single_step(p, x, y) for x, y in zip(chain, chain[1:]))


# ------------------------------------------------ goal-directed saturation


def prove_equal(p: Presentation, t: Term, s: Term, max_size: int | None = None,
                rounds: int = 12, node_budget: int = 60_000) -> bool:
    """Equality saturation seeded with ``t`` and ``s``.

    Each round instantiates the other side of every matched equation,
    inserting new e-nodes whose cheapest realisation stays within
    ``max_size``.  Variables missing from the matched side range over the
    letter and constant classes only.  True means a proof was found; False
    means none was found within the limits.
    """
    if max_size is None:
        max_size = max(t.size, s.size) + 2
    alphabet = sorted(letters_of(t) | letters_of(s))
    eg = _EGraph(p, alphabet, max_size, node_budget)
    a = _insert(eg, t)
    b = _insert(eg, s)
    cheap = [eg.letter_class[x] for x in alphabet]
    cheap += [_insert(eg, node(c)) for c in p.signature.constants()]
    eg.recompute_minsize()
    for _ in range(rounds):
        if eg.find(a) == eg.find(b):
            return True
        eg.index()
        pending = []
        for idx, eq in enumerate(p.equations):
            for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                names = sorted(variables(lhs) | variables(rhs))
                slots = {x: i for i, x in enumerate(names)}
                if lhs.is_var:
                    continue
                extra = [slots[x] for x in sorted(variables(rhs) - variables(lhs))]
                for c, bnd in eg.matches(lhs, slots):
                    fills = [bnd]
                    for i in extra:
                        fills = [f[:i] + (k,) + f[i + 1:] for f in fills for k in cheap]
                    for f in fills:
                        pending.append((c, rhs, idx, dict(zip(names, f))))
        grew = False
        for c, rhs, idx, binding in pending:
            est = _estimate(eg, rhs, binding)
            if est > max_size:
                continue
            d = _instantiate(eg, rhs, binding)
            if eg.union(c, d):
                eg.log.append((idx, binding))
                grew = True
            if len(eg.hashcons) > node_budget:
                break
        eg.rebuild()
        eg.recompute_minsize()
        if not grew or len(eg.hashcons) > node_budget:
            break
    return eg.find(a) == eg.find(b)


def letters_of(t: Term) -> set:
    return {x.head for x in _leaf_terms(t) if not x.is_var}


def _leaf_terms(t: Term):
    if t.is_leaf:
        yield t
    for a in t.args:
        yield from _leaf_terms(a)


def _insert(eg: _EGraph, t: Term) -> int:
    if t.is_leaf:
        return eg.letter_class[t.head]
    kids = tuple(eg.find(_insert(eg, a)) for a in t.args)
    key = (t.head, kids)
    got = eg.hashcons.get(key)
    if got is None:
        got = eg._new_class(1 + sum(eg.minsize[k] for k in kids))
        eg.hashcons[key] = got
    return eg.find(got)


def _estimate(eg: _EGraph, pattern: Term, binding: dict) -> int:
    if pattern.is_leaf:
        return eg.minsize[eg.find(binding[pattern.head])]
    return 1 + sum(_estimate(eg, a, binding) for a in pattern.args)


def _instantiate(eg: _EGraph, pattern: Term, binding: dict) -> int:
    if pattern.is_leaf:
        return eg.find(binding[pattern.head])
    kids = tuple(_instantiate(eg, a, binding) for a in pattern.args)
    key = (pattern.head, kids)
    got = eg.hashcons.get(key)
    if got is None:
        got = eg._new_class(1 + sum(eg.minsize[k] for k in kids))
        eg.hashcons[key] = got
    return eg.find(got)
