"""Special-purpose procedures and fixtures for the worked examples."""

from ..catalog import ALGEBRA_NAMES, THEORY_NAMES, algebra, span, theory
from .burnside import (
    Member,
    NonMember,
    burnside_member,
    check_gamma01_closure,
    cube_square_steps,
    squarefree_words,
)
from .counterexamples import (
    COUNTEREXAMPLES,
    MarkedWord,
    marked_normal_form,
    nqm_normal_form,
    fixture_recognizer_witnesses,
    sweep_candidates,
    table_mutants,
)
from .lattice import (
    LatticeTerm,
    gen,
    join,
    lattice_canonical_form,
    lattice_direct_image,
    lattice_order_chain,
    lattice_upward_image,
    meet,
    whitman_leq,
)
from .noncases import run_noncases
from .powerset_squared import powerset_squared_image
from .reader import (
    EventuallyConstantWord,
    RectangularLanguage,
    reader_direct_image,
    reader_recognizer,
)
from .studies import CASES, CaseReport, Claim, run_case
