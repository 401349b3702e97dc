"""Bounded checkers for weak cartesianness, the Jacobs law and friends.

Every checker sweeps finitely many instances inside explicit bounds.  A
failure is reported as ``Refuted`` only when the witness search space is
provably exhausted (a saturated free algebra, an exactly enumerated
equivalence class, or a finite model separating two terms); otherwise the
outcome is ``Unknown``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .finite_algebra import search_models
from .presentation import (
    LetterMap,
    ParseError,
    Presentation,
    Term,
    _strip_comment,
    classify_equations,
    is_linear,
    leaf,
    letters,
    node,
    replace_leaves,
    show,
    var,
)
from .recognition import Refuted, Unknown, Verified
from .term_engine import (
    INF,
    BoundedFreeAlgebra,
    ResourceError,
    build,
    decide_equal,
    exact_class,
    prove_equal,
    rename,
)
from .words import word_theory

__all__ = [
    "Verified", "Refuted", "Unknown", "SpanInstance", "parse_span", "small_spans",
    "Certifier", "witness_key", "check_weak_pullback_preservation",
    "check_unit_cartesian", "check_mult_cartesian", "TwoLayer", "subset_letter",
    "eval_jacobs_law", "check_distributive_law_axioms", "MalcevSearch",
    "malcev_search", "find_malcev_term", "verify_malcev", "Finite",
    "detect_local_finiteness",
]


# ------------------------------------------------------------------ helpers


@lru_cache(maxsize=256)
def _free_cached(p: Presentation, alphabet: tuple, bound: int) -> BoundedFreeAlgebra:
    return build(p, alphabet, bound)


def free(p: Presentation, alphabet: Iterable[str], bound: int) -> BoundedFreeAlgebra:
    """Cached :func:`build`; free algebras are immutable once built."""
    return _free_cached(p, tuple(sorted(set(alphabet))), bound)


def _postorder(t: Term) -> tuple:
    if t.is_leaf:
        return (t.head,)
    return sum((_postorder(a) for a in t.args), ()) + (t.head,)


def witness_key(t: Term) -> tuple:
    """Order used to pick reported witnesses: size, then postfix reading.

    Reading leaves before operations prefers terms whose letters occur
    in alphabetical order, e.g. ``a·b⁻¹`` before ``a⁻¹·b``.
    """
    return (t.size, _postorder(t))


def _display(F: BoundedFreeAlgebra, c: int) -> Term:
    return min(F.members(c, F.minsize[c]), key=witness_key)


def _classes_upto(F: BoundedFreeAlgebra, bound: int) -> list:
    return [c for c in range(F.num_classes) if F.minsize[c] <= bound]


# ------------------------------------------------------- disequality proofs


class Certifier:
    """Definitive disequality certificates for ground terms of one theory."""

    def __init__(self, p: Presentation, model_sizes: Sequence[int] = (2, 3),
                 model_budget: int = 20_000, word_cap: int = 12):
        self.p = p
        self.words = word_theory(p)
        self.regular = all(e.regular for e in classify_equations(p).per_equation)
        self.model_sizes = tuple(model_sizes)
        self.model_budget = model_budget
        self.word_cap = word_cap
        self._models = None
        self._word_classes: dict = {}

    @property
    def models(self) -> list:
        if self._models is None:
            found = []
            for n in self.model_sizes:
                try:
                    found.extend(search_models(self.p, n, self.model_budget))
                except ResourceError:
                    break
            self._models = found
        return self._models

    def word_class(self, w: tuple):
        got = self._word_classes.get(w)
        if got is None:
            got = self.words.closure(w, max(self.word_cap, 2 * len(w) + 2))
            self._word_classes[w] = got
        return got

    def distinct(self, t: Term, s: Term):
        """A reason string if ``t`` and ``s`` are provably different, else None."""
        if t == s:
            return None
        if self.regular and letters(t) != letters(s):
            return "letter content differs and every equation is regular"
        if self.p.size_preserving() and t.size != s.size:
            return "sizes differ and every equation preserves size"
        if self.words is not None:
            wt, ws = self.words.word(t), self.words.word(s)
            if wt is not None and ws is not None:
                for a, b in ((wt, ws), (ws, wt)):
                    cls, complete = self.word_class(a)
                    if complete and b not in cls:
                        return f"word class of {''.join(a) or '1'} is exactly {_words(cls)}"
                if wt in self.word_class(ws)[0]:
                    return None
        for a, b in ((t, s), (s, t)):
            cls, complete = exact_class(self.p, a, max(a.size, b.size) + 4, limit=2000)
            if complete and b not in cls:
                return f"class of {show(a)} is exactly {len(cls)} term(s)"
        sep = self.separate(t, s)
        if sep is not None:
            return sep
        return None

    def separate(self, t: Term, s: Term):
        names = sorted(letters(t) | letters(s))
        for k, A in enumerate(self.models):
            for vals in itertools.product(range(A.size), repeat=len(names)):
                env = dict(zip(names, vals))
                if A.evaluate(t, env) != A.evaluate(s, env):
                    shown = ",".join(f"{x}={v}" for x, v in env.items())
                    return f"separated in model #{k} of size {A.size} at {shown}"
        return None


def _words(ws) -> str:
    return "{" + ", ".join(sorted("".join(w) or "1" for w in ws)) + "}"


# -------------------------------------------------------------------- spans


@dataclass(frozen=True)
class SpanInstance:
    X: tuple
    Y: tuple
    Z: tuple
    f: tuple  # sorted (x, z) pairs
    g: tuple  # sorted (y, z) pairs

    @classmethod
    def make(cls, X, Y, Z, f: Mapping[str, str], g: Mapping[str, str]) -> "SpanInstance":
        X, Y, Z = tuple(sorted(X)), tuple(sorted(Y)), tuple(sorted(Z))
        for dom, fn, name in ((X, f, "f"), (Y, g, "g")):
            if set(fn) != set(dom):
                raise ValueError(f"{name} must be defined exactly on its domain")
            if not set(fn.values()) <= set(Z):
                raise ValueError(f"{name} maps outside Z")
        return cls(X, Y, Z, tuple(sorted(f.items())), tuple(sorted(g.items())))

    @property
    def f_map(self) -> LetterMap:
        return LetterMap(self.X, self.Z, self.f)

    @property
    def g_map(self) -> LetterMap:
        return LetterMap(self.Y, self.Z, self.g)

    @property
    def pullback(self) -> tuple:
        """``P = {(x, y) | f(x) = g(y)}`` in lexicographic order."""
        f, g = dict(self.f), dict(self.g)
        return tuple((x, y) for x in self.X for y in self.Y if f[x] == g[y])

    @staticmethod
    def pair_letter(x: str, y: str) -> str:
        return f"<{x},{y}>"

    def projections(self):
        P = [self.pair_letter(x, y) for x, y in self.pullback]
        pi1 = LetterMap.from_dict({self.pair_letter(x, y): x for x, y in self.pullback}, self.X)
        pi2 = LetterMap.from_dict({self.pair_letter(x, y): y for x, y in self.pullback}, self.Y)
        return P, pi1, pi2

    def __str__(self) -> str:
        fx = ",".join(f"{a}->{b}" for a, b in self.f)
        gy = ",".join(f"{a}->{b}" for a, b in self.g)
        return f"X={{{','.join(self.X)}}} Y={{{','.join(self.Y)}}} Z={{{','.join(self.Z)}}} f={fx} g={gy}"


def parse_span(text: str) -> SpanInstance:
    """Lines ``X:``, ``Y:``, ``Z:`` (space separated) and ``f:``, ``g:`` maps."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        key, colon, rest = line.partition(":")
        key = key.strip()
        if not colon or key not in ("X", "Y", "Z", "f", "g"):
            raise ParseError(f"expected X:, Y:, Z:, f: or g:, got {line!r}", lineno, 1)
        if key in fields:
            raise ParseError(f"duplicate {key}:", lineno, 1)
        if key in ("f", "g"):
            table = {}
            for item in rest.replace(",", " ").split():
                src, arrow, dst = item.partition("->")
                if not arrow or not src or not dst:
                    raise ParseError(f"bad map entry {item!r}", lineno, 1)
                table[src] = dst
            fields[key] = table
        else:
            fields[key] = rest.split()
    missing = [k for k in ("X", "Y", "Z", "f", "g") if k not in fields]
    if missing:
        raise ParseError(f"missing {', '.join(missing)}", 1, 1)
    try:
        return SpanInstance.make(fields["X"], fields["Y"], fields["Z"], fields["f"], fields["g"])
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None


def small_spans(max_xy: int = 3, max_z: int = 2):
    """All spans with ``|X|, |Y| <= max_xy`` and ``|Z| <= max_z``."""
    xs_all = ["a", "b", "c"][:max_xy]
    ys_all = ["p", "q", "r"][:max_xy]
    for nz in range(1, max_z + 1):
        Z = ["u", "v"][:nz]
        for nx in range(0, max_xy + 1):
            for ny in range(0, max_xy + 1):
                X, Y = xs_all[:nx], ys_all[:ny]
                for fv in itertools.product(Z, repeat=nx):
                    for gv in itertools.product(Z, repeat=ny):
                        yield SpanInstance.make(X, Y, Z, dict(zip(X, fv)), dict(zip(Y, gv)))


# ------------------------------------------------- weak pullback preservation


def check_weak_pullback_preservation(p: Presentation, span: SpanInstance,
                                     term_bound: int = 3, witness_bound: int = 4):
    """Does ``T`` send the pullback of ``span`` to a weak pullback?

    Every pair ``(t, r)`` of classes within ``term_bound`` that agree after
    renaming into ``Z`` needs a term over ``P`` projecting onto both.
    """
    if term_bound < 1 or witness_bound < 1:
        raise ValueError("bounds must be at least 1")
    bound = max(term_bound, witness_bound)
    FX, FY, FZ = free(p, span.X, bound), free(p, span.Y, bound), free(p, span.Z, bound)
    f, g = span.f_map, span.g_map
    P, pi1, pi2 = span.projections()
    cert = Certifier(p)
    W = cert.words

    ys_by_z: dict = {}
    for c in _classes_upto(FY, term_bound):
        ys_by_z.setdefault(FZ.class_of(rename(g, FY.representative(c))), []).append(c)
    pairs = []
    for c in _classes_upto(FX, term_bound):
        z = FZ.class_of(rename(f, FX.representative(c)))
        for d in ys_by_z.get(z, ()):
            pairs.append((c, d))

    covered = set()
    FP = None
    if W is None:
        FP = free(p, P, witness_bound)
        for s in FP.representatives:
            if s.size <= witness_bound:
                covered.add((FX.class_of(rename(pi1, s)), FY.class_of(rename(pi2, s))))

    uncovered = []
    for c, d in pairs:
        if (c, d) in covered:
            continue
        if W is not None and _word_witness(W, cert, span, FX.representative(c),
                                           FY.representative(d), witness_bound + 1) is not None:
            continue
        uncovered.append((c, d))

    bounds = (("span", str(span)), ("term_bound", term_bound),
              ("witness_bound", witness_bound), ("pairs", len(pairs)),
              ("search", "words" if W is not None else "terms"))
    if not uncovered:
        return Verified(bounds)

    ranked = []
    for c, d in uncovered:
        t, r = _display(FX, c), _display(FY, d)
        ranked.append(((t.size, r.size, _postorder(t), _postorder(r)), t, r))
    ranked.sort(key=lambda item: item[0])
    best = None
    for _, t, r in ranked:
        ev = _wpb_evidence(p, cert, span, FP, FX, FY, t, r)
        if ev is not None and (best is None or ev[0] < best[0]):
            best = (ev[0], t, r, ev[1])
            if ev[0] == 0:
                break
    if best is None:
        t, r = ranked[0][1], ranked[0][2]
        return Unknown(bounds + (("open_pair", f"{show(t)} | {show(r)}"),
                                 ("uncovered", len(uncovered))))
    _, t, r, evidence = best
    return Refuted((("t", show(t)), ("r", show(r)),
                    ("image", show(rename(f, t))), ("image_r", show(rename(g, r))),
                    ("evidence", evidence)) + bounds + (("uncovered", len(uncovered)),))


def _word_witness(W, cert: Certifier, span: SpanInstance, t: Term, r: Term, max_len: int):
    wt, wr = W.word(t), W.word(r)
    if wt is None or wr is None:
        return None
    cls_t, _ = cert.word_class(wt)
    cls_r, _ = cert.word_class(wr)
    for s in _pair_words(span, cls_t, max_len):
        if tuple(y for _, y in s) in cls_r:
            return s
    return None


def _pair_words(span: SpanInstance, xwords, max_len: int):
    fibre: dict = {}
    for x, y in span.pullback:
        fibre.setdefault(x, []).append((x, y))
    for u in sorted(xwords):
        if len(u) > max_len:
            continue
        yield from itertools.product(*(fibre.get(x, ()) for x in u))


def _wpb_evidence(p, cert, span, FP, FX, FY, t: Term, r: Term):
    """``(rank, text)`` proving no witness exists, or None."""
    W = cert.words
    if W is not None:
        wt, wr = W.word(t), W.word(r)
        if wt is None or wr is None:
            return None
        cls_t, done_t = cert.word_class(wt)
        cls_r, done_r = cert.word_class(wr)
        if not done_t:
            return None
        for s in _pair_words(span, cls_t, INF):
            if tuple(y for _, y in s) in cls_r:
                return None
            if not done_r and cert.distinct(W.term(tuple(y for _, y in s)), r) is None:
                return None
        rank = 0 if done_r else 1
        text = f"word class of t is exactly {_words(cls_t)}"
        if done_r:
            text += f"; word class of r is exactly {_words(cls_r)}"
        return rank, text
    if FP is None or not FP.saturated:
        return None
    _, pi1, pi2 = span.projections()
    reasons = []
    for s in FP.representatives:
        a, b = rename(pi1, s), rename(pi2, s)
        why = cert.distinct(a, t)
        if why is None:
            why = cert.distinct(b, r)
            if why is None:
                return None
            reasons.append(f"{show(b)} vs r: {why}")
        else:
            reasons.append(f"{show(a)} vs t: {why}")
    return 1, (f"free algebra over P saturated with {FP.num_classes} class(es); "
               + "; ".join(reasons))


# ------------------------------------------------------- unit cartesianness


def check_unit_cartesian(p: Presentation, f: LetterMap, epi_only: bool = False,
                         bound: int = 4):
    """Is the naturality square of the unit at ``f`` a weak pullback?"""
    if epi_only and not f.surjective:
        raise ValueError("epi_only requires a surjective map")
    FS, FG = free(p, f.source, bound), free(p, f.target, bound)
    unit_classes: dict = {}
    for y in f.target:
        unit_classes.setdefault(FG.letter_class(y), []).append(y)
    cert = Certifier(p)
    swept = 0
    failures = []
    for c in _classes_upto(FS, bound):
        t = FS.representative(c)
        img = FG.class_of(rename(f, t))
        swept += 1
        for y in unit_classes.get(img, ()):
            pre = f.preimage(y)
            if any(FS.letter_class(x) == c for x in pre):
                continue
            failures.append((_display(FS, c), y, pre))
    bounds = (("map", str(f)), ("bound", bound), ("classes", swept))
    if not failures:
        return Verified(bounds)
    failures.sort(key=lambda item: (witness_key(item[0]), item[1]))
    for t, y, pre in failures:
        if FS.definitive:
            why = "free algebra over the source is " + ("saturated" if FS.saturated else "size-preserving")
        else:
            parts = [cert.distinct(t, leaf(x)) for x in pre]
            if any(w is None for w in parts):
                continue
            why = "; ".join(parts) or "no letter maps to y"
        return Refuted((("t", show(t)), ("image", show(rename(f, t))), ("unit", y),
                        ("evidence", why)) + bounds)
    t, y, _ = failures[0]
    return Unknown(bounds + (("open_term", show(t)), ("unit", y)))


# ------------------------------------------------- multiplication cartesianness


@dataclass(frozen=True)
class TwoLayer:
    """An element of ``TTX``: an outer term over handle letters plus a binding.

    Handle letters are named ``#0, #1, ...`` in order of first occurrence.
    """

    outer: Term
    binding: tuple  # handle terms, indexed by handle number

    def flatten(self) -> Term:
        return replace_leaves(self.outer, {f"#{i}": h for i, h in enumerate(self.binding)})

    def __str__(self) -> str:
        env = {f"#{i}": leaf(f"[{show(h)}]") for i, h in enumerate(self.binding)}
        return show(replace_leaves(self.outer, env))


def _cuts(t: Term, max_outer: int):
    """Every ``(outer, handles)`` cut of ``t``; outer leaves are holes ``*``."""
    hole = leaf("*")
    out = [(hole, (t,))]
    if not t.is_leaf:
        for combo in itertools.product(*(_cuts(a, max_outer) for a in t.args)):
            outer = node(t.head, *(o for o, _ in combo))
            if outer.size <= max_outer:
                out.append((outer, sum((h for _, h in combo), ())))
    return out


def _name_holes(outer: Term, labels: Sequence[str]) -> Term:
    it = iter(labels)

    def go(u: Term) -> Term:
        if u.is_leaf:
            return leaf(next(it))
        return node(u.head, *(go(a) for a in u.args))

    return go(outer)


def _outer_by_class(outer: Term, ids: Sequence[int]) -> Term:
    return _name_holes(outer, [f"h{i}" for i in ids])


def _two_layer(outer: Term, handles: Sequence[Term]) -> TwoLayer:
    order: list = []
    labels = []
    for h in handles:
        if h not in order:
            order.append(h)
        labels.append(f"#{order.index(h)}")
    return TwoLayer(_name_holes(outer, labels), tuple(order))


class _OuterEquality:
    """Equality of outer terms over handle letters, exact when possible."""

    def __init__(self, p: Presentation, bound: int):
        self.p = p
        self.bound = bound

    def equal(self, a: Term, b: Term):
        """True / False (definitive) / None (unknown)."""
        if a == b:
            return True
        cls, complete = exact_class(self.p, a, max(a.size, b.size) + 3, limit=2000)
        if b in cls:
            return True
        if complete:
            return False
        names = sorted(letters(a) | letters(b))
        ren = {x: f"l{i}" for i, x in enumerate(names)}
        a2, b2 = rename(ren, a), rename(ren, b)
        size = max(a.size, b.size, self.bound)
        F = free(self.p, ren.values(), size)
        verdict = decide_equal(F, a2, b2)
        if verdict:
            return True
        return False if verdict.definitive else None


def check_mult_cartesian(p: Presentation, f: LetterMap, epi_only: bool = False,
                         bounds: tuple = (3, 3)):
    """Is the naturality square of the multiplication at ``f`` a weak pullback?

    ``bounds = (inner, outer)``: terms over the source alphabet up to size
    ``inner`` and decompositions whose outer layer has size at most ``outer``.
    """
    if epi_only and not f.surjective:
        raise ValueError("epi_only requires a surjective map")
    inner, outer_bound = bounds
    FS, FG = free(p, f.source, inner), free(p, f.target, inner)
    oe = _OuterEquality(p, outer_bound)
    cert = Certifier(p)
    failures = []
    swept = 0
    for c in _classes_upto(FS, inner):
        t = FS.representative(c)
        target = FG.class_of(rename(f, t))
        images = set()
        for m in FS.members(c, inner):
            for outer, handles in _cuts(m, outer_bound):
                ids = [FG.class_of(rename(f, h)) for h in handles]
                images.add(_outer_by_class(outer, ids))
        thetas = {}
        for m in FG.members(target, inner):
            for outer, handles in _cuts(m, outer_bound):
                key = _outer_by_class(outer, [FG.class_of(h) for h in handles])
                if key not in thetas:
                    thetas[key] = (outer, handles)
        swept += len(thetas)
        for key, (outer, handles) in thetas.items():
            if key in images:
                continue
            if any(oe.equal(key, q) for q in images):
                continue
            failures.append((c, key, _two_layer(outer, handles)))
    bounds_out = (("map", str(f)), ("inner_bound", inner), ("outer_bound", outer_bound),
                  ("decompositions", swept))
    if not failures:
        return Verified(bounds_out)

    def rank(item):
        c, key, theta = item
        t = _display(FS, c)
        return (t.size, not is_linear(_as_vars(t)), witness_key(t),
                theta.outer.size, theta.flatten().size, str(theta))

    failures.sort(key=rank)
    for c, key, theta in failures:
        t = _display(FS, c)
        ev = _mult_evidence(p, cert, f, FG, t, key, theta)
        if ev is not None:
            return Refuted((("t", show(t)), ("theta", str(theta)),
                            ("mu_theta", show(theta.flatten())),
                            ("image", show(rename(f, t))), ("evidence", ev))
                           + bounds_out + (("failures", len(failures)),))
    c, key, theta = failures[0]
    return Unknown(bounds_out + (("open_t", show(_display(FS, c))), ("open_theta", str(theta))))


def _as_vars(t: Term) -> Term:
    return replace_leaves(t, {x: var("?" + x) for x in letters(t)})


def _mult_evidence(p, cert: Certifier, f: LetterMap, FG, t: Term, key: Term, theta: TwoLayer):
    """Text showing that no two-layer term over the source fits, or None."""
    outer_cls, complete = exact_class(p, key, key.size + 3, limit=500)
    if not complete:
        return None
    handle_terms = {}
    for x in letters(key):
        h = FG.representative(int(x[1:]))
        members = _exact_members(p, cert, h)
        if members is None:
            return None
        handle_terms[x] = [u for m in members for u in _unrename(f, m)]
    count = 0
    for m in sorted(outer_cls, key=witness_key):
        slots = list(_leaf_positions(m))
        for choice in itertools.product(*(handle_terms[x] for x in slots)):
            count += 1
            if count > 20_000:
                return None
            cand = _fill(m, iter(choice))
            if cert.distinct(cand, t) is None:
                return None
    parts = [f"outer class exactly {len(outer_cls)} term(s)"]
    for i, h in enumerate(theta.binding):
        parts.append(f"handle [{show(h)}] has {len(_exact_members(p, cert, h))} member(s)")
    parts.append(f"{count} candidate flattening(s) all differ from t")
    return "; ".join(parts)


def _exact_members(p, cert: Certifier, h: Term):
    W = cert.words
    if W is not None and W.word(h) is not None:
        cls, done = cert.word_class(W.word(h))
        if done:
            return sorted((W.term(w) for w in cls), key=witness_key)
    cls, done = exact_class(p, h, h.size + 4, limit=2000)
    return sorted(cls, key=witness_key) if done else None


def _unrename(f: LetterMap, m: Term) -> list:
    if m.is_leaf:
        return [leaf(x) for x in f.preimage(m.head)]
    return [node(m.head, *kids) for kids in itertools.product(*(_unrename(f, a) for a in m.args))]


def _leaf_positions(t: Term):
    if t.is_leaf:
        yield t.head
    for a in t.args:
        yield from _leaf_positions(a)


def _fill(t: Term, it) -> Term:
    if t.is_leaf:
        return next(it)
    return node(t.head, *(_fill(a, it) for a in t.args))


# ----------------------------------------------------------- the Jacobs law


def subset_letter(members: Iterable[str]) -> str:
    items = sorted(set(members))
    if not items:
        raise ValueError("subset letters must be nonempty")
    return "{" + ",".join(items) + "}"


def _subset_members(name: str) -> list:
    return name[1:-1].split(",")


def _canonical_letters(t: Term):
    names = sorted(letters(t))
    ren = {x: f"l{i}" for i, x in enumerate(names)}
    return rename(ren, t), {v: k for k, v in ren.items()}


def _expansions(t: Term, choice: Mapping[str, Sequence[Term]]):
    if t.is_leaf:
        yield from choice[t.head]
        return
    for kids in itertools.product(*(list(_expansions(a, choice)) for a in t.args)):
        yield node(t.head, *kids)


def _lambda(p: Presentation, t: Term, choice: Mapping[str, Sequence[Term]],
            target: BoundedFreeAlgebra, bound: int):
    """Classes of ``target`` reached by choice-expanding members of ``[t]``.

    Returns ``(class ids, complete)``; ``complete`` is False when some
    expansion fell outside the target bound.
    """
    canon, back = _canonical_letters(t)
    src = free(p, back.keys(), max(bound, t.size))
    members = src.members(src.require_class(canon), max(bound, t.size))
    out = set()
    complete = True
    for m in members:
        local = {x: choice[back[x]] for x in letters(m)}
        for e in _expansions(m, local):
            c = target.class_of(e) if e.size <= target.size_bound else None
            if c is None:
                complete = False
            else:
                out.add(c)
    return out, complete


def eval_jacobs_law(p: Presentation, X: Iterable[str], t: Term, bound: int = 4) -> frozenset:
    """The set of classes over ``X`` that ``t`` (over subset letters) distributes to."""
    X = sorted(set(X))
    for x in letters(t):
        if not (x.startswith("{") and x.endswith("}")) or not set(_subset_members(x)) <= set(X):
            raise ValueError(f"leaf {x!r} is not a nonempty subset of {X}")
    FX = free(p, X, max(bound, t.size))
    choice = {x: [leaf(y) for y in _subset_members(x)] for x in letters(t)}
    ids, _ = _lambda(p, t, choice, FX, bound)
    return frozenset(FX.representative(c) for c in ids)


def _subsets(X: Sequence[str]) -> list:
    out = []
    for k in range(1, len(X) + 1):
        out.extend(itertools.combinations(X, k))
    return out


def _terms_over(p: Presentation, alphabet: Sequence[str], max_size: int) -> list:
    """All terms over ``alphabet`` with at most ``max_size`` operation nodes."""
    by_size: list = [[leaf(x) for x in alphabet]]
    for n in range(1, max_size + 1):
        layer = []
        for op, k in p.signature.operations:
            if k == 0:
                if n == 1:
                    layer.append(node(op))
                continue
            for split in _splits(n - 1, k):
                for kids in itertools.product(*(by_size[s] for s in split)):
                    layer.append(node(op, *kids))
        by_size.append(layer)
    return [t for layer in by_size for t in layer]


def _splits(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


def check_distributive_law_axioms(p: Presentation, X: Sequence[str], bound: int = 3,
                                  outer_bound: int = 1, nested_bound: int = 1,
                                  max_instances: int = 400) -> dict:
    """Bounded check of axioms (a)-(d) and monotonicity for the Jacobs law.

    Keys ``"a"``, ``"b"``, ``"c"``, ``"d"`` and ``"monotone"`` map to
    outcomes.  A mismatch is ``Refuted`` only when the side lacking an
    element is known exactly and provably omits it; otherwise ``Unknown``.
    """
    X = sorted(set(X))
    subsets = _subsets(X)
    S_letters = [subset_letter(s) for s in subsets]
    big = bound + outer_bound + 2
    FX = free(p, X, big)

    def lam(t: Term, bnd: int = bound):
        choice = {x: [leaf(y) for y in _subset_members(x)] for x in letters(t)}
        return _lambda(p, t, choice, FX, bnd)

    results = {}
    cert = Certifier(p)
    exact = p.size_preserving()

    def outcome(name, bad, count, rhs_exact=False, inclusion=False):
        return _axiom_outcome(name, bad, count, bound, FX, cert,
                              lhs_exact=exact, rhs_exact=rhs_exact or exact,
                              inclusion=inclusion)

    # (a)  lambda(T{.}(t)) = {t}
    count = 0
    bad = None
    for c in _classes_upto(FX, bound):
        t = FX.representative(c)
        lifted = rename({x: subset_letter([x]) for x in X}, t)
        got, _ = lam(lifted)
        count += 1
        if got != {c}:
            bad = (show(lifted), got, {c})
            break
    results["a"] = outcome("a", bad, count, rhs_exact=True)

    # (b)  lambda(eta(Z)) = {eta(z) | z in Z}
    bad = None
    for s in subsets:
        got, _ = lam(leaf(subset_letter(s)))
        want = {FX.letter_class(x) for x in s}
        if got != want:
            bad = (subset_letter(s), got, want)
            break
    results["b"] = outcome("b", bad, len(subsets), rhs_exact=True)

    # (c)  lambda(T(union)(t)) = union of lambda over lambda_{P X}(t)
    nested = [(a,) for a in subsets] + list(itertools.combinations(subsets, 2))
    nested_letters = {"{" + "|".join(subset_letter(z) for z in combo) + "}": combo for combo in nested}
    count = 0
    bad = None
    for t in _terms_over(p, sorted(nested_letters), nested_bound)[:max_instances]:
        union = rename({n: subset_letter(set().union(*combo)) for n, combo in nested_letters.items()}, t)
        lhs, _ = lam(union)
        canon, back = _canonical_letters(t)
        FS = free(p, S_letters, max(bound, t.size))
        choice = {n: [leaf(subset_letter(z)) for z in nested_letters[n]] for n in letters(t)}
        mid, _ = _lambda(p, t, choice, FS, bound)
        rhs = set()
        for c in mid:
            got, _ = lam(FS.representative(c))
            rhs |= got
        count += 1
        if lhs != rhs:
            bad = (show(t), lhs, rhs)
            break
    results["c"] = outcome("c", bad, count)

    # (d)  lambda(mu(t)) = mu(lambda_{TX}(T lambda(t)))
    handles = [t for t in _terms_over(p, S_letters, 1) if letters(t)]
    count = 0
    bad = None
    for outer in _terms_over(p, ["#0", "#1"], outer_bound):
        holes = sorted(letters(outer))
        for hs in itertools.product(handles, repeat=len(holes)):
            if count >= max_instances:
                break
            binding = dict(zip(holes, hs))
            flat = replace_leaves(outer, binding)
            lhs, _ = lam(flat, max(bound, flat.size))
            inner_sets = {}
            for h, u in binding.items():
                ids, _ = lam(u)
                inner_sets[h] = [FX.representative(i) for i in ids]
            rhs, _ = _lambda(p, outer, inner_sets, FX, max(bound, outer.size))
            count += 1
            if lhs != rhs:
                shown = TwoLayer(outer, tuple(hs)) if holes == ["#0", "#1"][:len(holes)] else None
                bad = (str(shown) if shown else show(flat), lhs, rhs)
                break
        if bad:
            break
    results["d"] = outcome("d", bad, count)

    # monotonicity: f <= g pointwise implies lambda(Tf t) <= lambda(Tg t)
    funcs = list(itertools.product(subsets, repeat=len(X)))
    count = 0
    bad = None
    pairs = [(fv, gv) for fv in funcs for gv in funcs
             if all(set(a) <= set(b) for a, b in zip(fv, gv)) and fv != gv]
    for c in _classes_upto(FX, bound):
        t = FX.representative(c)
        for fv, gv in pairs:
            ft = rename({x: subset_letter(s) for x, s in zip(X, fv)}, t)
            gt = rename({x: subset_letter(s) for x, s in zip(X, gv)}, t)
            lf, _ = lam(ft)
            lg, _ = lam(gt)
            count += 1
            if not lf <= lg:
                bad = (f"{show(ft)} <= {show(gt)}", lf, lg)
                break
        if bad:
            break
    results["monotone"] = outcome("monotone", bad, count, inclusion=True)
    return results


def _fmt(F: BoundedFreeAlgebra, ids) -> str:
    return "{" + ", ".join(sorted(show(F.representative(i)) for i in ids)) + "}"


def _axiom_outcome(name: str, bad, count: int, bound: int, FX, cert: Certifier,
                   lhs_exact: bool, rhs_exact: bool, inclusion: bool = False):
    """Verified, or a mismatch that is Refuted when one side is known exactly.

    Both sides are computed from bounded class enumerations, so every listed
    element genuinely belongs to its side; a side is exact when no further
    element can exist.  An element of one side is a definitive extra only if
    the other side is exact and each of its elements provably differs from it.
    """
    bounds = (("axiom", name), ("bound", bound), ("instances", count))
    if bad is None:
        return Verified(bounds)
    shown, lhs, rhs = bad
    witness = (("axiom", name), ("input", shown), ("lhs", _fmt(FX, lhs)), ("rhs", _fmt(FX, rhs)))
    checks = [(lhs - rhs, rhs, rhs_exact, "rhs")]
    if not inclusion:
        checks.append((rhs - lhs, lhs, lhs_exact, "lhs"))
    for extra, other, other_exact, side in checks:
        if not other_exact:
            continue
        for e in sorted(extra):
            te = FX.representative(e)
            reasons = [(FX.representative(o), cert.distinct(te, FX.representative(o)))
                       for o in sorted(other)]
            if all(r is not None for _, r in reasons):
                reasons = [f"{show(te)} vs {show(o)}: {r}" for o, r in reasons]
                return Refuted(witness + (("extra", show(te)), ("missing_from", side),
                                          ("evidence", "; ".join(reasons) or "other side empty"),
                                          ("bound", bound)))
    return Unknown(bounds + witness[1:])


# ---------------------------------------------------------- Mal'cev terms


VARS3 = (var("?x"), var("?y"), var("?z"))


@dataclass(frozen=True)
class MalcevSearch:
    term: Term | None
    candidates: int  # distinct model fingerprints examined
    passed_filter: int
    undetermined: tuple = field(default=())  # candidate terms neither proved nor refuted

    @property
    def exhaustive(self) -> bool:
        """True when a None result is definitive for the searched depth."""
        return self.term is None and not self.undetermined


class _Fingerprints:
    """Values of ternary terms over every small model and assignment."""

    def __init__(self, p: Presentation, models: list):
        self.p = p
        pts_model, xs, ys, zs = [], [], [], []
        for m, A in enumerate(models):
            for a, b, c in itertools.product(range(A.size), repeat=3):
                pts_model.append(m)
                xs.append(a)
                ys.append(b)
                zs.append(c)
        self.m = np.array(pts_model, dtype=np.int64)
        self.n = np.array([models[m].size for m in pts_model], dtype=np.int64)
        self.vars = {"?x": np.array(xs, dtype=np.int64), "?y": np.array(ys, dtype=np.int64),
                     "?z": np.array(zs, dtype=np.int64)}
        self.tables = {}
        self.offsets = {}
        for op, k in p.signature.operations:
            flat, offs, pos = [], [], 0
            for A in models:
                offs.append(pos)
                flat.extend(A.tables[op])
                pos += len(A.tables[op])
            self.tables[op] = np.array(flat, dtype=np.int64)
            self.offsets[op] = np.array(offs, dtype=np.int64)[self.m] if models else np.zeros(0, np.int64)
        x, y, z = self.vars["?x"], self.vars["?y"], self.vars["?z"]
        self.mask1 = x == y   # p(a, a, c) = c
        self.mask2 = y == z   # p(a, c, c) = a
        self.x, self.z = x, z

    def apply(self, op: str, kids: Sequence[np.ndarray]) -> np.ndarray:
        acc = np.zeros_like(self.m)
        for v in kids:
            acc = acc * self.n + v
        return self.tables[op][self.offsets[op] + acc]

    def passes(self, fp: np.ndarray) -> bool:
        return (bool(np.all(fp[self.mask1] == self.z[self.mask1]))
                and bool(np.all(fp[self.mask2] == self.x[self.mask2])))


def verify_malcev(p: Presentation, term: Term, free_bound: int = 4):
    """True / False (definitive) / None for ``p(x,x,y)=y=p(y,x,x)``."""
    a, b = leaf("a"), leaf("b")
    cert = Certifier(p)
    verdicts = []
    for env in ({"?x": a, "?y": a, "?z": b}, {"?x": b, "?y": a, "?z": a}):
        lhs = replace_leaves(term, env)
        verdicts.append(_decide(p, cert, lhs, b, free_bound))
    if all(v is True for v in verdicts):
        return True
    if any(v is False for v in verdicts):
        return False
    return None


def _decide(p: Presentation, cert: Certifier, t: Term, s: Term, free_bound: int):
    W = cert.words
    if W is not None and W.word(t) is not None and W.word(s) is not None:
        cls, done = cert.word_class(W.word(t))
        if W.word(s) in cls:
            return True
        if done:
            return False
    if t.size <= free_bound and s.size <= free_bound:
        F = free(p, letters(t) | letters(s) | {"a", "b"}, free_bound)
        verdict = decide_equal(F, t, s)
        if verdict:
            return True
        if verdict.definitive:
            return False
    if prove_equal(p, t, s):
        return True
    if cert.distinct(t, s) is not None:
        return False
    return None


def malcev_search(p: Presentation, depth: int = 3, free_bound: int = 4,
                  hint: Term | None = None, model_sizes: Sequence[int] = (2, 3),
                  max_verify: int = 40) -> MalcevSearch:
    """Search ternary terms up to ``depth`` for a Mal'cev term.

    Terms are generated level by level and deduplicated by their values on
    all small models; a value vector failing the identities rejects every
    term sharing it, so rejections are definitive.  Every term whose vector
    passes is checked on its own, and the first one confirmed wins.
    """
    if hint is not None and verify_malcev(p, hint, free_bound):
        return MalcevSearch(hint, 0, 1)
    models = Certifier(p, model_sizes).models
    fp = _Fingerprints(p, models)
    reps: dict = {}
    order: list = []
    undetermined: list = []
    passed = 0
    verified_budget = max_verify

    def consider(t: Term, vec: np.ndarray):
        nonlocal passed, verified_budget
        key = vec.tobytes()
        seen = key in reps
        if seen and not reps[key]:
            return None
        if not seen:
            reps[key] = fp.passes(vec)
            order.append((t, vec))
            if not reps[key]:
                return None
        passed += 1
        if verified_budget <= 0:
            undetermined.append(t)
            return None
        verified_budget -= 1
        ok = verify_malcev(p, t, free_bound)
        if ok:
            return t
        if ok is None:
            undetermined.append(t)
        return None

    level0 = [(v, fp.vars[v.head]) for v in VARS3]
    for c in p.signature.constants():
        level0.append((node(c), fp.apply(c, [])))
    level0.sort(key=lambda item: witness_key(item[0]))
    for t, vec in level0:
        found = consider(t, vec)
        if found is not None:
            return MalcevSearch(found, len(reps), passed, tuple(undetermined))
    for _ in range(depth):
        pool = list(order)
        fresh = []
        for op, k in p.signature.operations:
            if k == 0:
                continue
            for kids in itertools.product(pool, repeat=k):
                fresh.append((node(op, *(t for t, _ in kids)), op, [v for _, v in kids]))
        fresh.sort(key=lambda item: witness_key(item[0]))
        for t, op, vecs in fresh:
            vec = fp.apply(op, vecs)
            found = consider(t, vec)
            if found is not None:
                return MalcevSearch(found, len(reps), passed, tuple(undetermined))
    return MalcevSearch(None, len(reps), passed, tuple(undetermined))


def find_malcev_term(p: Presentation, depth: int = 3, free_bound: int = 4,
                     hint: Term | None = None) -> Term | None:
    return malcev_search(p, depth, free_bound, hint).term


# --------------------------------------------------------- local finiteness


@dataclass(frozen=True)
class Finite:
    size: int
    bound: int

    name = "Finite"


def detect_local_finiteness(p: Presentation, generators: int,
                            bound_schedule: Sequence[int] = (1, 2, 3, 4, 5, 6)):
    """``Finite(k)`` once the free algebra saturates, else ``Unknown(trace)``."""
    if generators < 1:
        raise ValueError("need at least one generator")
    alphabet = [chr(ord("a") + i) for i in range(generators)]
    trace = []
    for b in bound_schedule:
        try:
            F = free(p, alphabet, b)
        except ResourceError:
            break
        trace.append(F.num_classes)
        if F.saturated:
            return Finite(F.num_classes, b)
    growing = all(x < y for x, y in zip(trace, trace[1:]))
    return Unknown((("generators", generators), ("trace", tuple(trace)),
                    ("strictly_growing", growing)))
