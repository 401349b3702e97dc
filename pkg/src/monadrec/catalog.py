"""Bundled theory and algebra files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .finite_algebra import FiniteAlgebra, parse_algebra
from .presentation import Presentation, parse_presentation

THEORY_NAMES = (
    "semigroup", "monoid", "commutative_monoid", "semilattice", "band", "group",
    "quasigroup", "boolean_algebra", "heyting_algebra", "lattice", "x3_x2", "xxy_xy",
    "guarded_idempotent", "ffe", "two_unary_fge", "fgfgg", "xyyz", "balanced_assoc",
    "marked_words", "not_quite_malcev", "seminearring", "empty", "magma",
)

ALGEBRA_NAMES = (
    "marked_words", "balanced_assoc", "not_quite_malcev", "z2_group",
    "two_chain_lattice", "ba_one_generator", "abstar_monoid", "ab_star_seminearring",
    "bag_max", "z3_counting",
)


def _data(*parts: str) -> str:
    return resources.files("monadrec").joinpath("data/" + "/".join(parts)).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def theory(name: str) -> Presentation:
    if name not in THEORY_NAMES:
        raise KeyError(f"no bundled theory {name!r}")
    return parse_presentation(_data("theories", f"{name}.thy"))


def theories() -> dict:
    return {name: theory(name) for name in THEORY_NAMES}


@lru_cache(maxsize=None)
def algebra(name: str) -> FiniteAlgebra:
    if name not in ALGEBRA_NAMES:
        raise KeyError(f"no bundled algebra {name!r}")
    return parse_algebra(_data("algebras", f"{name}.alg"), theories())


def algebra_text(name: str) -> str:
    return _data("algebras", f"{name}.alg")


SPAN_NAMES = ("empty-ab-c", "ab-cd-z")


def span(name: str):
    from .monad_props import parse_span

    if name not in SPAN_NAMES:
        raise KeyError(f"no bundled span {name!r}")
    return parse_span(_data("spans", f"{name}.span"))
