"""End-to-end runs of the worked examples, one pass/fail record per claim."""

from __future__ import annotations

from dataclasses import dataclass

from .. import monad_props as mp
from ..catalog import algebra, span, theory
from ..finite_algebra import check_satisfies, search_models
from ..presentation import LetterMap, leaf, node, parse_term, show
from ..recognition import RecognizedLanguage, member
from ..term_engine import build, decide_equal
from . import burnside, counterexamples as cx, lattice, reader
from .powerset_squared import powerset_squared_image


@dataclass(frozen=True)
class Claim:
    claim: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CaseReport:
    name: str
    claims: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)


def _x3_x2():
    out = []
    n, bad = burnside.check_gamma01_closure(10)
    out.append(Claim("[abc]*0[abc]*1 is closed under single steps (length <= 10)",
                     not bad, f"{n} words, {len(bad)} violations"))
    r = burnside.burnside_member("ab0ab0ab0")
    out.append(Claim("v0v0v0 is in the closure of [abc]*0[abc]*0 (v = ab)",
                     isinstance(r, burnside.Member), " -> ".join(getattr(r, "trace", ()))))
    r = burnside.burnside_member("ab0ba0ab0")
    out.append(Claim("v0w0v0 is definitely outside it (v = ab, w = ba)",
                     isinstance(r, burnside.NonMember) and r.definitive, getattr(r, "reason", "")))
    k = len(burnside.squarefree_words("abc", 3))
    out.append(Claim("12 square-free words of length 3", k == 12, str(k)))
    k = len(burnside.squarefree_words("abc", 20))
    out.append(Claim("square-free words of length 20 exist", k > 0, str(k)))
    o = mp.check_weak_pullback_preservation(theory("x3_x2"), span("ab-cd-z"))
    w = dict(o.witness) if o.name == "Refuted" else {}
    out.append(Claim("weak pullbacks fail with t = ab, r = cdc",
                     w.get("t") == "(dot a b)" and w.get("r") == "(dot c (dot d c))",
                     f"{o.name} {w.get('t')} {w.get('r')}"))
    return out


def _counterexample(name: str):
    case = cx.COUNTEREXAMPLES[name]
    L = case.language()
    out = [Claim("fixture algebra satisfies the equations", bool(check_satisfies(L.algebra)))]
    ws = cx.fixture_recognizer_witnesses(case)
    out.append(Claim("the fixture algebra fails on the image under every assignment",
                     all(ok for _, _, ok in ws), f"{len(ws)} assignments"))
    sw = cx.sweep_candidates(case, 3)
    out.append(Claim("every recognizer from a model of size <= 3 is refuted",
                     not sw.failures and sw.validated == sw.probes,
                     f"{sw.candidates} recognizers, {sw.probes} probes"))
    if name == "marked_words":
        t = parse_term("(dot a (o b))")
        out.append(Claim("a_ b is accepted with value AB", member(L, t)
                         and L.algebra.names[L.value(t)] == "AB"))
    elif name == "balanced_assoc":
        p = case.presentation
        F = build(p, ["a", "c"], 6)
        ok = True
        for n in (1, 2, 3):
            spine = cx.balanced_left_spine(n, "a", "a")
            folded = cx.balanced_context(n, cx.balanced_family(n))
            chain_l = node("dot", leaf("a"), cx.balanced_context(n, leaf("c")))
            chain_r = cx.balanced_context(n, node("dot", leaf("a"), leaf("c")))
            ok &= bool(decide_equal(F, spine, folded)) and bool(decide_equal(F, chain_l, chain_r))
        out.append(Claim("spine and left-folded forms agree for n <= 3", ok))
        t = cx.balanced_left_spine(2)
        out.append(Claim("the recognizer accepts a spine with value L",
                         member(L, t) and L.algebra.names[L.value(t)] == "L", show(t)))
    else:
        src = parse_term("(p a (p c b c) (p b c b))")
        img = node("s", leaf("a"))
        out.append(Claim("s(a) is the image of a member",
                         member(L, parse_term("(p a (p a b a) (p a c a))"))
                         and cx.nqm_source_member(src)
                         and cx.nqm_normal_form(parse_term("(p a (p d d d) (p d d d))")) == img
                         and cx.nqm_image_member(img)))
        bad = [(x, y) for x in range(7) for y in range(7)
               if not (L.algebra.op("p", x, x, y) == L.algebra.op("s", y) == L.algebra.op("p", y, x, x) == 4)]
        out.append(Claim("all 49 instances hold with s constantly 4", not bad))
    return out


def _reader():
    out = []
    L = reader.RectangularLanguage.make("ab", {1: "a", 2: "ab"})
    R = reader.reader_recognizer(reader.RectangularLanguage.make("ab", {1: "a", 2: "b"}))
    out.append(Claim("carrier of positions {1,2} over {a,b} has 4 elements", len(R.carrier) == 4))
    out.append(Claim("structure map satisfies unit and associativity", reader.check_em_axioms(R)))
    w = reader.EventuallyConstantWord(("b",), "a")
    out.append(Claim("b a^w is rejected by {1:a}", not reader.reader_recognizer(L).member(w)))
    f = LetterMap.from_dict({"a": "c", "b": "d"})
    out.append(Claim("image of {1:a} along a->c, b->d is {1:c}",
                     str(reader.reader_direct_image(L, f)[0]) == "{1:c}"))
    try:
        reader.reader_direct_image(L, LetterMap.from_dict({"a": "c", "b": "c"}, "cd"))
        rejected = False
    except ValueError:
        rejected = True
    out.append(Claim("non-surjective maps are rejected", rejected))
    return out


def _free_lattice():
    out = []
    _, checks = lattice.lattice_order_chain()
    for k, v in checks.items():
        out.append(Claim(k, v))
    p, q = lattice.gen("p"), lattice.gen("q")
    out.append(Claim("p v (p ^ q) has canonical form p",
                     lattice.lattice_canonical_form(lattice.join(p, lattice.meet(p, q))) == p))
    A = algebra("two_chain_lattice")
    L = RecognizedLanguage.make(A, {"a": 0, "b": 1}, {1})
    img = lattice.lattice_direct_image(L, LetterMap.from_dict({"a": "c", "b": "c"}))
    out.append(Claim("image on the two-element chain is cross-checked",
                     img.outcome.name == "Verified", img.outcome.name))
    return out


def _xyyz():
    out = []
    p = theory("xyyz")
    f = LetterMap.from_dict({"a1": "a", "a2": "a", "b": "b", "c": "c"})
    r = parse_term("(dot b (dot a1 (dot a2 c)))")
    A = search_models(p, 2)[-1]
    h0 = {"a1": 0, "a2": 1, "b": 1, "c": 0}
    L = RecognizedLanguage.make(A, h0, {A.evaluate(r, h0)})
    cand, outcome = powerset_squared_image(L, f)
    out.append(Claim("b(a(ac)) is in the image through r = b(a1(a2 c))",
                     cand is not None and member(cand, parse_term("(dot b (dot a (dot a c)))"))))
    out.append(Claim("pair recognizer agrees with brute force", outcome.name == "Verified",
                     outcome.name))
    o = mp.check_mult_cartesian(p, f)
    out.append(Claim("multiplication square is not a weak pullback", o.name == "Refuted"))
    return out


def _fgfgg():
    p = theory("fgfgg")
    counts = [len(search_models(p, n)) for n in (1, 2, 3)]
    return [Claim("only the trivial model up to size 3", counts == [1, 0, 0], str(counts))]


CASES = {
    "x3_x2": _x3_x2,
    "marked_words": lambda: _counterexample("marked_words"),
    "balanced_assoc": lambda: _counterexample("balanced_assoc"),
    "not_quite_malcev": lambda: _counterexample("not_quite_malcev"),
    "reader": _reader,
    "free_lattice": _free_lattice,
    "xyyz": _xyyz,
    "fgfgg": _fgfgg,
}


def run_case(name: str) -> CaseReport:
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    return CaseReport(name, tuple(CASES[name]()))
