"""Command-line front end.

Exit codes: 0 success or Verified, 1 Refuted, 2 Unknown, 64 usage error,
65 bad input data.  ``--expect refuted`` swaps the meaning of 0 and 1 for
scripts whose goal is a counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import catalog
from . import monad_props as mp
from .finite_algebra import AlgebraError, FiniteAlgebra, check_satisfies, parse_algebra
from .presentation import LetterMap, ParseError, Presentation, letters, parse_letter_map, parse_presentation, parse_term, show
from .recognition import (
    RecognizedLanguage,
    Refuted,
    Unknown,
    Verified,
    direct_image_bruteforce,
    direct_image_locally_finite,
    direct_image_malcev,
    direct_image_powerset,
    parse_language,
)
from .term_engine import DEFAULT_BOUND, BoundError, ResourceError, build, decide_equal

EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
MEMORY_ENV = "MONADREC_MEMORY_MB"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# ----------------------------------------------------------------- records


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def record(check: str, outcome, **extra) -> dict:
    """One report line from a ``Verified``/``Refuted``/``Unknown`` outcome."""
    rec = {"check": check, "outcome": outcome.name}
    if isinstance(outcome, Refuted):
        rec["witness"] = _plain(dict(outcome.witness))
    elif isinstance(outcome, (Verified, Unknown)):
        rec["bounds"] = _plain(dict(outcome.bounds))
    for k, v in extra.items():
        rec[k] = _plain(v)
    return rec


def plain_record(check: str, outcome_name: str, **fields) -> dict:
    rec = {"check": check, "outcome": outcome_name}
    for k, v in fields.items():
        if v != "":
            rec[k] = _plain(v)
    return rec


def render(command: str, records: list, fmt: str = "text") -> bytes:
    if fmt == "jsonl":
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records).encode()
    lines = [f"monadrec {command}"]
    for r in records:
        rest = {k: v for k, v in r.items() if k not in ("check", "outcome")}
        lines.append(f"{r['check']}: {r['outcome']}")
        for k in sorted(rest):
            lines.append(f"  {k}: {json.dumps(rest[k], sort_keys=True)}")
    lines.append(f"{len(records)} check{'s' if len(records) != 1 else ''}")
    return ("\n".join(lines) + "\n").encode()


def exit_code(records: list, expect: str | None) -> int:
    names = {r["outcome"] for r in records}
    if "Refuted" in names or "Fail" in names:
        code = EXIT_REFUTED
    elif "Unknown" in names:
        code = EXIT_UNKNOWN
    else:
        code = EXIT_OK
    if expect == "refuted":
        code = {EXIT_REFUTED: EXIT_OK, EXIT_OK: EXIT_REFUTED}.get(code, code)
    return code


# ------------------------------------------------------------ input files


def _read(path: str, kind: str) -> tuple:
    """``(text, directory)`` for a path, or for a bundled file of that name."""
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), p.parent
    stem = p.name
    for ext in (".thy", ".alg", ".lang", ".span"):
        if stem.endswith(ext):
            stem = stem[: -len(ext)]
    folder = {"theory": "theories", "algebra": "algebras", "language": "languages",
              "span": "spans"}[kind]
    ext = {"theory": ".thy", "algebra": ".alg", "language": ".lang", "span": ".span"}[kind]
    try:
        return catalog._data(folder, stem + ext), None
    except (FileNotFoundError, OSError):
        raise DataError(f"{path}: no such {kind} file or bundled {kind}") from None


def _with_context(path: str, fn, text: str):
    try:
        return fn(text)
    except ParseError as exc:
        raise DataError(f"{path}: {exc}") from None
    except (AlgebraError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def load_theory(path: str) -> Presentation:
    text, _ = _read(path, "theory")
    return _with_context(path, parse_presentation, text)


def load_algebra(path: str, base: Path | None = None) -> FiniteAlgebra:
    if base is not None and (base / path).is_file():
        path = str(base / path)
    elif base is not None and (base / (path + ".alg")).is_file():
        path = str(base / (path + ".alg"))
    text, _ = _read(path, "algebra")
    return _with_context(path, lambda t: parse_algebra(t, catalog.theories()), text)


def load_language(path: str) -> RecognizedLanguage:
    text, base = _read(path, "language")
    return _with_context(path, lambda t: parse_language(t, lambda ref: load_algebra(ref, base)), text)


def load_span(path: str):
    text, _ = _read(path, "span")
    return _with_context(path, mp.parse_span, text)


def _letters(text: str | None) -> list:
    if not text:
        return []
    return [x for x in text.replace(",", " ").split() if x]


def _map(text: str, target: str | None) -> LetterMap:
    try:
        return parse_letter_map(text, _letters(target) or None)
    except (ParseError, ValueError) as exc:
        raise DataError(f"--map: {exc}") from None


def _term(text: str, p: Presentation):
    try:
        return parse_term(text, p.arity)
    except ParseError as exc:
        raise DataError(f"term {text!r}: {exc}") from None


# --------------------------------------------------------------- commands


def cmd_free(args) -> list:
    p = load_theory(args.theory)
    F = build(p, _letters(args.alphabet), args.bound)
    outcome = "Verified" if F.definitive else "Unknown"
    reps = [show(r) for r in F.representatives]
    return [plain_record("free", outcome, alphabet=sorted(_letters(args.alphabet)),
                         bound=args.bound, classes=F.num_classes, saturated=F.saturated,
                         representatives=reps[: args.show])]


def cmd_eq(args) -> list:
    p = load_theory(args.theory)
    t, s = _term(args.lhs, p), _term(args.rhs, p)
    alphabet = sorted(letters(t) | letters(s))
    bound = max(args.bound, t.size, s.size)
    F = build(p, alphabet, bound)
    verdict = decide_equal(F, t, s)
    if verdict:
        return [record("eq", Verified((("bound", bound),)), lhs=show(t), rhs=show(s))]
    if verdict.definitive:
        return [record("eq", Refuted((("lhs", show(t)), ("rhs", show(s)),
                                      ("reason", "different classes in a saturated free algebra"))))]
    reason = mp.Certifier(p).distinct(t, s)
    if reason:
        return [record("eq", Refuted((("lhs", show(t)), ("rhs", show(s)), ("reason", reason))))]
    return [record("eq", Unknown((("bound", bound), ("lhs", show(t)), ("rhs", show(s)))))]


def cmd_check_algebra(args) -> list:
    A = load_algebra(args.algebra)
    sat = check_satisfies(A)
    if sat:
        return [record("check-algebra", Verified((("size", A.size),
                                                  ("theory", A.presentation.name or ""))))]
    eq = A.presentation.equations[sat.equation]
    return [record("check-algebra", Refuted((("equation", str(eq)),
                                             ("assignment", tuple((x, A.names[v]) for x, v in sat.assignment)))))]


def cmd_direct_image(args) -> list:
    L = load_language(args.lang)
    if args.theory is not None:
        p = load_theory(args.theory)
        if p.name and L.algebra.presentation.name and p.name != L.algebra.presentation.name:
            raise DataError(f"language algebra is for {L.algebra.presentation.name!r}, "
                            f"not {p.name!r}")
    f = _map(args.map, args.target)
    if set(f.source) != set(L.alphabet):
        raise DataError("--map must be defined exactly on the language's letters")
    method = args.method
    kw = {k: v for k, v in (("bound", args.bound), ("margin", args.margin)) if v is not None}
    if method == "powerset":
        _, outcome = direct_image_powerset(L, f, **kw)
    elif method == "malcev":
        _, outcome, _ = direct_image_malcev(L, f, **kw)
    elif method == "lattice":
        from .case_studies.lattice import lattice_direct_image

        outcome = lattice_direct_image(L, f, **kw).outcome
    elif method == "pairs":
        from .case_studies.powerset_squared import powerset_squared_image

        _, outcome = powerset_squared_image(L, f, **kw)
    else:
        bound = args.bound if args.bound is not None else DEFAULT_BOUND
        F_gamma = build(L.algebra.presentation, f.target, bound)
        if method == "locfin":
            try:
                image = direct_image_locally_finite(L, f, F_gamma)
            except BoundError as exc:
                return [record("direct-image", Unknown((("method", method), ("bound", bound),
                                                         ("reason", str(exc)))))]
            outcome = Verified((("method", method), ("bound", bound),
                                ("classes", F_gamma.num_classes), ("image", len(image.accept))))
            return [record("direct-image", outcome)]
        margin = args.margin if args.margin is not None else 2
        brute = direct_image_bruteforce(L, f, F_gamma, margin)
        info = (("method", method), ("bound", bound), ("margin", margin),
                ("classes", len(brute.classes)), ("complete", brute.complete))
        outcome = Verified(info) if brute.complete else Unknown(info)
        shown = sorted(show(F_gamma.representative(c)) for c in brute.classes)
        return [record("direct-image", outcome, image=shown[: args.show])]
    return [record("direct-image", outcome, method=method)]


def cmd_props(args) -> list:
    p = load_theory(args.theory)
    check = args.check
    if check == "wpb":
        if not args.span:
            raise UsageError("--check wpb needs --span")
        span = load_span(args.span)
        o = mp.check_weak_pullback_preservation(p, span, args.bound or 3, args.witness_bound)
        return [record("wpb", o, span=str(span))]
    if check in ("eta", "mu"):
        if not args.map:
            raise UsageError(f"--check {check} needs --map")
        f = _map(args.map, args.target)
        try:
            if check == "eta":
                o = mp.check_unit_cartesian(p, f, args.epi_only, args.bound or 4)
            else:
                o = mp.check_mult_cartesian(p, f, args.epi_only,
                                            (args.bound or 3, args.outer_bound))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return [record(check, o, map=str(f))]
    if check == "distlaw":
        X = _letters(args.alphabet) or ["a", "b"]
        res = mp.check_distributive_law_axioms(p, X, args.bound or 3)
        return [record(f"distlaw {k}", res[k]) for k in sorted(res)]
    if check == "malcev":
        hint = _term(args.hint, p) if args.hint else None
        found = mp.malcev_search(p, args.depth, hint=hint)
        if found.term is not None:
            return [record("malcev", Verified((("depth", args.depth), ("term", show(found.term)))))]
        return [record("malcev", Unknown((("depth", args.depth), ("exhaustive", found.exhaustive),
                                          ("candidates", found.candidates),
                                          ("undetermined", len(found.undetermined)))))]
    if check == "locfin":
        o = mp.detect_local_finiteness(p, args.generators)
        if isinstance(o, mp.Finite):
            return [record("locfin", Verified((("generators", args.generators),
                                               ("size", o.size), ("bound", o.bound))))]
        return [record("locfin", o)]
    raise UsageError(f"unknown check {check!r}")


def _run_case(name: str) -> list:
    from .case_studies import run_case

    rep = run_case(name)
    return [plain_record(f"{name}: {c.claim}", "Pass" if c.passed else "Fail", detail=c.detail)
            for c in rep.claims]


def _run_refute(name: str, max_size: int) -> list:
    from .case_studies import counterexamples as cx

    case = cx.COUNTEREXAMPLES[name]
    out = []
    for cand, w, ok in cx.fixture_recognizer_witnesses(case):
        out.append(record(f"{name} fixture {dict(cand.assignment)}",
                          Refuted(w.as_fields() + (("valid", ok),))))
    sw = cx.sweep_candidates(case, max_size)
    info = (("max_size", max_size), ("recognizers", sw.candidates), ("probes", sw.probes),
            ("validated", sw.validated))
    if sw.failures:
        out.append(record(f"{name} sweep", Unknown(info + (("failures", len(sw.failures)),))))
    else:
        out.append(record(f"{name} sweep", Refuted(info)))
    return out


def _run_noncase(name: str, max_size: int) -> list:
    from .case_studies import run_noncases

    rep = run_noncases(name, max_size)
    out = [plain_record(f"{name} brute-force image", "Pass" if rep.oracle_agrees else "Fail",
                        classes=rep.image_classes)]
    for label, w, ok in rep.witnesses:
        if w is None:
            out.append(plain_record(f"{name} {label}", "Pass" if ok else "Fail"))
        else:
            out.append(record(f"{name} {label}", Refuted(w.as_fields() + (("valid", ok),))))
    return out


def _parallel(fn, jobs_args: list, jobs: int) -> list:
    if jobs <= 1 or len(jobs_args) <= 1:
        results = [fn(*a) for a in jobs_args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(fn, *zip(*jobs_args)))
    return [r for chunk in results for r in chunk]


def cmd_case(args) -> list:
    from .case_studies import CASES

    names = list(CASES) if args.names == ["all"] else args.names
    for n in names:
        if n not in CASES:
            raise UsageError(f"unknown case {n!r}; choose from {', '.join(CASES)} or all")
    return _parallel(_run_case, [(n,) for n in names], args.jobs)


def cmd_refute(args) -> list:
    from .case_studies.counterexamples import COUNTEREXAMPLES

    names = list(COUNTEREXAMPLES) if args.names == ["all"] else args.names
    for n in names:
        if n not in COUNTEREXAMPLES:
            raise UsageError(f"unknown counterexample {n!r}; choose from "
                             f"{', '.join(COUNTEREXAMPLES)} or all")
    return _parallel(_run_refute, [(n, args.max_size) for n in names], args.jobs)


def cmd_noncase(args) -> list:
    names = ["bag_kleisli", "seminearring"] if args.names == ["all"] else args.names
    for n in names:
        if n not in ("bag_kleisli", "seminearring"):
            raise UsageError(f"unknown non-case {n!r}; choose bag_kleisli, seminearring or all")
    return _parallel(_run_noncase, [(n, args.max_size) for n in names], args.jobs)


# ----------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="monadrec", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("text", "jsonl"), default="text")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes; output does not depend on it")
    ap.add_argument("--expect", choices=("refuted",), help="treat Refuted as success")
    ap.add_argument("--timings", action="store_true", help="print elapsed time to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("free", help="bounded free algebra summary")
    s.add_argument("--theory", required=True)
    s.add_argument("--alphabet", default="")
    s.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    s.add_argument("--show", type=int, default=50, help="representatives to list")
    s.set_defaults(run=cmd_free)

    s = sub.add_parser("eq", help="decide equality of two terms")
    s.add_argument("--theory", required=True)
    s.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.set_defaults(run=cmd_eq)

    s = sub.add_parser("check-algebra", help="check an algebra against its theory")
    s.add_argument("--algebra", required=True)
    s.set_defaults(run=cmd_check_algebra)

    s = sub.add_parser("direct-image", help="recognizer for a direct image, cross-checked")
    s.add_argument("--theory")
    s.add_argument("--lang", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--target", help="target alphabet when the map is not onto")
    s.add_argument("--method", default="powerset",
                   choices=("powerset", "malcev", "locfin", "lattice", "pairs", "brute"))
    s.add_argument("--bound", type=int, help="free-algebra size bound; each method has its own default")
    s.add_argument("--margin", type=int, help="extra source size explored beyond the bound")
    s.add_argument("--show", type=int, default=50)
    s.set_defaults(run=cmd_direct_image)

    s = sub.add_parser("props", help="monad property checks")
    s.add_argument("--theory", required=True)
    s.add_argument("--check", required=True,
                   choices=("wpb", "eta", "mu", "distlaw", "malcev", "locfin"))
    s.add_argument("--span")
    s.add_argument("--map")
    s.add_argument("--target")
    s.add_argument("--epi-only", action="store_true")
    s.add_argument("--bound", type=int)
    s.add_argument("--witness-bound", type=int, default=4)
    s.add_argument("--outer-bound", type=int, default=3)
    s.add_argument("--alphabet")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--hint")
    s.add_argument("--generators", type=int, default=2)
    s.set_defaults(run=cmd_props)

    s = sub.add_parser("case", help="run worked examples")
    s.add_argument("names", nargs="+")
    s.set_defaults(run=cmd_case)

    s = sub.add_parser("refute", help="pigeonhole refutations for the counterexamples")
    s.add_argument("names", nargs="+")
    s.add_argument("--max-size", type=int, default=3)
    s.set_defaults(run=cmd_refute)

    s = sub.add_parser("noncase", help="non-letter-to-letter image demonstrations")
    s.add_argument("names", nargs="+")
    s.add_argument("--max-size", type=int, default=3)
    s.set_defaults(run=cmd_noncase)
    return ap


def _apply_memory_budget() -> None:
    mb = os.environ.get(MEMORY_ENV)
    if not mb:
        return
    try:
        import resource

        limit = int(mb) * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ValueError, ImportError, OSError):
        print(f"monadrec: ignoring {MEMORY_ENV}={mb!r}", file=sys.stderr)


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout.buffer
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
    except UsageError as exc:
        print(f"monadrec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _apply_memory_budget()
    start = time.perf_counter()
    try:
        records = args.run(args)
    except UsageError as exc:
        print(f"monadrec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ParseError, AlgebraError, BoundError) as exc:
        print(f"monadrec: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ResourceError, MemoryError) as exc:
        records = [plain_record(args.command, "Unknown", reason=f"resource budget: {exc}")]
    out.write(render(args.command, records, args.format))
    out.flush()
    if args.timings:
        print(f"elapsed: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return exit_code(records, args.expect)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
