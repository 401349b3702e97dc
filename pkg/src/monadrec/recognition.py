"""Recognizable languages and their direct images along letter maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .finite_algebra import (
    AlgebraError,
    FiniteAlgebra,
    check_satisfies,
    generate_congruence,
    generated_subalgebra,
    product,
    quotient,
)
from .presentation import LetterMap, ParseError, Term, _strip_comment, show
from .term_engine import BoundedFreeAlgebra, BoundError, build, class_algebra_tables, rename


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Verified:
    bounds: tuple  # (name, value) pairs

    name = "Verified"


@dataclass(frozen=True)
class Refuted:
    witness: tuple  # (name, value) pairs

    name = "Refuted"


@dataclass(frozen=True)
class Unknown:
    bounds: tuple

    name = "Unknown"


def outcome_fields(o) -> dict:
    data = o.bounds if isinstance(o, (Verified, Unknown)) else o.witness
    return dict(data)


# --------------------------------------------------------------- languages


@dataclass(frozen=True)
class RecognizedLanguage:
    algebra: FiniteAlgebra
    assignment: tuple  # sorted (letter, element)
    accept: frozenset

    @classmethod
    def make(cls, algebra: FiniteAlgebra, h0: Mapping[str, int], accept: Iterable[int]):
        return cls(algebra, tuple(sorted(h0.items())), frozenset(accept))

    @property
    def h0(self) -> dict:
        return dict(self.assignment)

    @property
    def alphabet(self) -> tuple:
        return tuple(x for x, _ in self.assignment)

    def value(self, t: Term) -> int:
        return self.algebra.evaluate(t, self.h0)


def member(L: RecognizedLanguage, t: Term) -> bool:
    return L.value(t) in L.accept


@dataclass(frozen=True)
class ExplicitClasses:
    free: BoundedFreeAlgebra
    ids: frozenset


@dataclass(frozen=True)
class Oracle:
    name: str
    predicate: Callable[[Term], bool] = field(compare=False)


def spec_member(spec, t: Term) -> bool:
    if isinstance(spec, RecognizedLanguage):
        return member(spec, t)
    if isinstance(spec, ExplicitClasses):
        return spec.free.class_of(t) in spec.ids
    if isinstance(spec, Oracle):
        return bool(spec.predicate(t))
    raise TypeError(f"not a language spec: {spec!r}")


def boolean_op(kind: str, L1: RecognizedLanguage,
               L2: RecognizedLanguage | None = None) -> RecognizedLanguage:
    """Union, intersection (product algebra) or complement."""
    if kind == "complement":
        rest = set(range(L1.algebra.size)) - set(L1.accept)
        return RecognizedLanguage(L1.algebra, L1.assignment, frozenset(rest))
    if L2 is None:
        raise ValueError(f"{kind} needs two languages")
    if set(L1.alphabet) != set(L2.alphabet):
        raise ValueError("alphabet mismatch")
    A = product(L1.algebra, L2.algebra)
    m = L2.algebra.size
    h1, h2 = L1.h0, L2.h0
    h0 = {x: h1[x] * m + h2[x] for x in h1}
    if kind == "intersection":
        acc = {a * m + b for a in L1.accept for b in L2.accept}
    elif kind == "union":
        acc = {a * m + b for a in range(L1.algebra.size) for b in range(m)
               if a in L1.accept or b in L2.accept}
    else:
        raise ValueError(f"unknown boolean operation {kind!r}")
    return RecognizedLanguage.make(A, h0, acc)


def inverse_image(L: RecognizedLanguage, f: LetterMap) -> RecognizedLanguage:
    h = L.h0
    return RecognizedLanguage.make(L.algebra, {x: h[f(x)] for x in f.source}, L.accept)


# ------------------------------------------------------------ brute force


@dataclass(frozen=True)
class BruteImage:
    classes: frozenset
    complete: bool
    bound: int
    margin: int


def direct_image_bruteforce(L, f: LetterMap, F_gamma: BoundedFreeAlgebra,
                            margin: int = 2) -> BruteImage:
    """Image classes of ``F_gamma`` reached by renaming members of ``L``.

    Preimages are searched up to size ``bound + margin``; equalities proven
    at that larger bound are used to land on classes of ``F_gamma``.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    bound = F_gamma.size_bound
    p = F_gamma.presentation
    big = bound + margin
    F_sigma = build(p, f.source, big)
    F_wide = F_gamma if margin == 0 else build(p, f.target, big)
    hits: set = set()
    for c in range(F_sigma.num_classes):
        rep = F_sigma.representative(c)
        if rep.size > big or not spec_member(L, rep):
            continue
        d = F_wide.class_of(rename(f, rep))
        if d is not None:
            hits.add(d)
    out = set()
    for d in sorted(hits):
        if F_wide is F_gamma:
            out.add(d)
            continue
        for t in F_wide.members(d, bound):
            g = F_gamma.class_of(t)
            if g is not None:
                out.add(g)
    complete = ((F_sigma.saturated or p.size_preserving())
                and F_gamma.definitive)
    return BruteImage(frozenset(out), complete, bound, margin)


def cross_check(candidate: RecognizedLanguage, brute: BruteImage,
                F_gamma: BoundedFreeAlgebra, check: str):
    """Compare a candidate recognizer with brute force on every bounded class."""
    missing = []
    extra = []
    for c in range(F_gamma.num_classes):
        rep = F_gamma.representative(c)
        got = member(candidate, rep)
        want = c in brute.classes
        if got and not want:
            extra.append(rep)
        elif want and not got:
            missing.append(rep)
    if not missing and not extra:
        return Verified((("check", check), ("bound", brute.bound), ("margin", brute.margin),
                         ("classes", F_gamma.num_classes), ("complete", brute.complete)))
    if missing:
        # containment is unconditional, so a miss is a genuine failure
        return Refuted((("check", check), ("term", show(missing[0])),
                        ("reason", "image class rejected by candidate")))
    if brute.complete:
        return Refuted((("check", check), ("term", show(extra[0])),
                        ("reason", "candidate accepts a class outside the image")))
    return Unknown((("check", check), ("bound", brute.bound), ("margin", brute.margin),
                    ("term", show(extra[0])),
                    ("reason", "candidate accepts a class with no preimage found")))


# ------------------------------------------------------- powerset image


def complex_algebra(A: FiniteAlgebra, budget: int = 200_000) -> FiniteAlgebra:
    """Operations lifted pointwise to nonempty subsets.

    Subset with bitmask ``m`` is element ``m - 1``.
    """
    n = A.size
    count = (1 << n) - 1
    sets = [[x for x in range(n) if m >> x & 1] for m in range(1, count + 1)]
    tables = {}
    for op, k in A.presentation.signature.operations:
        if count ** k > budget:
            raise AlgebraError(f"complex algebra table for {op!r} has {count ** k} cells, "
                               f"over budget {budget}")
        tab = []
        for args in itertools.product(range(count), repeat=k):
            mask = 0
            for choice in itertools.product(*(sets[i] for i in args)):
                mask |= 1 << A.op(op, *choice)
            tab.append(mask - 1)
        tables[op] = tab
    names = ["{" + ",".join(A.names[x] for x in s) + "}" for s in sets]
    return FiniteAlgebra(A.presentation, count, tables, names)


def subset_element(members: Iterable[int]) -> int:
    mask = 0
    for x in members:
        mask |= 1 << x
    if not mask:
        raise ValueError("subsets must be nonempty")
    return mask - 1


def direct_image_powerset(L: RecognizedLanguage, f: LetterMap, bound: int = 6,
                          margin: int = 2, satisfaction_budget: int = 5_000_000):
    """Candidate recognizer over the nonempty-subset algebra, plus its check."""
    if not f.surjective:
        raise ValueError("letter map must be surjective")
    A = L.algebra
    P = complex_algebra(A)
    p = A.presentation
    work = sum(P.size ** len(eq.variables()) for eq in p.equations)
    if work > satisfaction_budget:
        raise AlgebraError(f"satisfaction check needs {work} evaluations")
    sat = check_satisfies(P)
    if not sat:
        assignment = tuple((x, P.names[v]) for x, v in sat.assignment)
        return None, Refuted((("check", "powerset"), ("stage", "complex algebra"),
                              ("equation", str(p.equations[sat.equation])),
                              ("assignment", assignment)))
    h = L.h0
    k0 = {y: subset_element(h[x] for x in f.preimage(y)) for y in f.target}
    accept = {m - 1 for m in range(1, 1 << A.size)
              if any(m >> s & 1 for s in L.accept)}
    candidate = RecognizedLanguage.make(P, k0, accept)
    F_gamma = build(p, f.target, bound)
    brute = direct_image_bruteforce(L, f, F_gamma, margin)
    return candidate, cross_check(candidate, brute, F_gamma, "powerset")


# --------------------------------------------------------- Mal'cev image


def direct_image_malcev(L: RecognizedLanguage, f: LetterMap, bound: int = 4,
                        margin: int = 1, malcev_term: Term | None = None):
    """Quotient by the congruence generated from letter-level collisions."""
    if not f.surjective:
        raise ValueError("letter map must be surjective")
    h = L.h0
    sub, embed = generated_subalgebra(L.algebra, h.values())
    pos = {x: i for i, x in enumerate(embed)}
    h_sub = {x: pos[v] for x, v in h.items()}
    acc_sub = {pos[s] for s in L.accept if s in pos}
    pairs = [(h_sub[x], h_sub[x2]) for x in f.source for x2 in f.source if f(x) == f(x2)]
    theta = generate_congruence(sub, pairs)
    Q, proj = quotient(sub, theta)
    k0 = {y: proj[h_sub[f.preimage(y)[0]]] for y in f.target}
    candidate = RecognizedLanguage.make(Q, k0, {proj[s] for s in acc_sub})
    F_gamma = build(sub.presentation, f.target, bound)
    base = RecognizedLanguage.make(sub, h_sub, acc_sub)
    brute = direct_image_bruteforce(base, f, F_gamma, margin)
    outcome = cross_check(candidate, brute, F_gamma, "malcev")
    backed = malcev_term is not None
    return candidate, outcome, backed


# ----------------------------------------------- locally finite image


def class_algebra(F: BoundedFreeAlgebra) -> FiniteAlgebra:
    tables = class_algebra_tables(F)
    names = [show(r) for r in F.representatives]
    return FiniteAlgebra(F.presentation, F.num_classes, tables, names)


def direct_image_locally_finite(L, f: LetterMap, F_gamma: BoundedFreeAlgebra,
                                F_sigma: BoundedFreeAlgebra | None = None):
    """Exact image when both free algebras are finite and saturated."""
    if not F_gamma.saturated:
        raise BoundError("free algebra over the target alphabet is not saturated")
    if F_sigma is None:
        F_sigma = build(F_gamma.presentation, f.source, F_gamma.size_bound)
    if not F_sigma.saturated:
        raise BoundError("free algebra over the source alphabet is not saturated")
    A = class_algebra(F_gamma)
    image = set()
    for c in range(F_sigma.num_classes):
        rep = F_sigma.representative(c)
        if spec_member(L, rep):
            image.add(F_gamma.require_class(rename(f, rep)))
    h0 = {y: F_gamma.letter_class(y) for y in f.target}
    return RecognizedLanguage.make(A, h0, image)


# -------------------------------------------------------------- refuter


class FixtureError(RuntimeError):
    pass


@dataclass(frozen=True)
class RefutationWitness:
    n: int
    m: int
    family_n: Term
    family_m: Term
    t_in: Term
    t_out: Term
    value_in: int
    value_out: int
    member_in: bool
    member_out: bool

    def as_fields(self) -> tuple:
        return (("n", self.n), ("m", self.m), ("family_n", show(self.family_n)),
                ("family_m", show(self.family_m)), ("t_in", show(self.t_in)),
                ("t_out", show(self.t_out)), ("value", self.value_in))


def refute_recognizability(candidate: RecognizedLanguage, family: Callable[[int], Term],
                           discriminator: Callable[[int, int], tuple],
                           membership: Callable[[Term], bool]) -> RefutationWitness:
    """Pigeonhole: two family members collide, their completions disagree."""
    seen: dict = {}
    limit = candidate.algebra.size + 1
    for m in range(1, limit + 1):
        v = candidate.value(family(m))
        if v in seen:
            n = seen[v]
            break
        seen[v] = m
    else:
        raise FixtureError("no collision among carrier + 1 family members")
    t_in, t_out = discriminator(n, m)
    w = RefutationWitness(n, m, family(n), family(m), t_in, t_out,
                          candidate.value(t_in), candidate.value(t_out),
                          bool(membership(t_in)), bool(membership(t_out)))
    if not w.member_in or w.member_out:
        raise FixtureError(f"membership oracle disagrees with the family at n={n}, m={m}")
    if w.value_in != w.value_out:
        raise FixtureError("completions of colliding terms got different values")
    return w


def validate_witness(candidate: RecognizedLanguage, w: RefutationWitness,
                     membership: Callable[[Term], bool]) -> bool:
    return (candidate.value(w.family_n) == candidate.value(w.family_m)
            and candidate.value(w.t_in) == candidate.value(w.t_out)
            and bool(membership(w.t_in)) and not membership(w.t_out)
            and w.n != w.m)


# ------------------------------------------------------------ file format


def parse_language(text: str, load_algebra: Callable[[str], FiniteAlgebra]) -> RecognizedLanguage:
    """``lang:``, ``algebra:``, ``assign: a=AA b=B_`` and ``accept: AB`` lines."""
    fields_: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep or key.strip() not in ("lang", "algebra", "assign", "accept"):
            raise ParseError(f"unexpected line {line!r}", lineno, 1)
        fields_[key.strip()] = (lineno, rest.strip())
    for key in ("algebra", "assign", "accept"):
        if key not in fields_:
            raise ParseError(f"language file needs an '{key}:' line")
    lineno, ref = fields_["algebra"]
    A = load_algebra(ref)
    h0 = {}
    lineno, text_ = fields_["assign"]
    for item in text_.split():
        letter, eq, elem = item.partition("=")
        if not eq:
            raise ParseError(f"bad assignment {item!r}", lineno, 1)
        try:
            h0[letter] = A.element(elem)
        except AlgebraError as exc:
            raise ParseError(str(exc), lineno, 1) from None
    lineno, text_ = fields_["accept"]
    try:
        accept = {A.element(e) for e in text_.split()}
    except AlgebraError as exc:
        raise ParseError(str(exc), lineno, 1) from None
    return RecognizedLanguage.make(A, h0, accept)
