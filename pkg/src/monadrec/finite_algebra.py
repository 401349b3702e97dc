"""Finite algebras given by operation tables.

Elements are ``0..n-1``.  A table for an operation of arity ``k`` is a flat
sequence of ``n**k`` entries in row-major order.  Tables may contain ``None``
while a model search is still filling them in; reading such a cell raises
:class:`NeedCell`, which is how the lazy search and the lazy sweeps branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .presentation import Presentation, Term, ParseError, _strip_comment
from .term_engine import ResourceError


class NeedCell(Exception):
    """Raised when evaluation reads an unfilled table cell."""

    def __init__(self, op: str, index: int):
        super().__init__(op, index)
        self.op = op
        self.index = index


class AlgebraError(ValueError):
    pass


def cell_index(n: int, args: Sequence[int]) -> int:
    i = 0
    for a in args:
        i = i * n + a
    return i


class FiniteAlgebra:
    def __init__(self, presentation: Presentation, size: int, tables: Mapping[str, Sequence],
                 names: Sequence[str] | None = None):
        if size < 1:
            raise AlgebraError("carrier must be nonempty")
        self.presentation = presentation
        self.size = size
        arity = presentation.arity
        self.tables = {}
        for op, k in presentation.signature.operations:
            if op not in tables:
                raise AlgebraError(f"missing table for {op!r}")
            tab = list(tables[op])
            if len(tab) != size ** k:
                raise AlgebraError(f"table for {op!r} needs {size ** k} entries, "
                                   f"got {len(tab)}")
            for v in tab:
                if v is not None and not 0 <= v < size:
                    raise AlgebraError(f"entry {v} of {op!r} out of range")
            self.tables[op] = tab
        extra = set(tables) - set(arity)
        if extra:
            raise AlgebraError(f"tables for undeclared operations {sorted(extra)}")
        if names is not None and len(names) != size:
            raise AlgebraError("one name per element required")
        self.names = list(names) if names is not None else [str(i) for i in range(size)]
        self._satisfied = None

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.presentation.name or '?'}, n={self.size})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteAlgebra) and self.size == other.size
                and self.tables == other.tables)

    def __hash__(self) -> int:
        return hash((self.size, tuple(tuple(self.tables[o]) for o in sorted(self.tables))))

    @property
    def partial(self) -> bool:
        return any(v is None for tab in self.tables.values() for v in tab)

    def free_cells(self) -> list:
        return [(op, i) for op in sorted(self.tables)
                for i, v in enumerate(self.tables[op]) if v is None]

    def element(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            if name.isdigit() and int(name) < self.size:
                return int(name)
            raise AlgebraError(f"unknown element {name!r}") from None

    def op(self, name: str, *args: int) -> int:
        i = cell_index(self.size, args)
        v = self.tables[name][i]
        if v is None:
            raise NeedCell(name, i)
        return v

    def with_cell(self, op: str, index: int, value: int) -> "FiniteAlgebra":
        tables = {o: list(t) for o, t in self.tables.items()}
        tables[op][index] = value
        return FiniteAlgebra(self.presentation, self.size, tables, self.names)

    def evaluate(self, t: Term, env: Mapping[str, int]) -> int:
        """Value of ``t`` with leaves looked up in ``env`` (letters or variables)."""
        memo: dict = {}
        tables = self.tables
        n = self.size

        def go(u: Term) -> int:
            if u.is_leaf:
                try:
                    return env[u.head]
                except KeyError:
                    raise AlgebraError(f"unassigned leaf {u.head!r}") from None
            got = memo.get(u)
            if got is not None:
                return got
            i = 0
            for a in u.args:
                i = i * n + go(a)
            v = tables[u.head][i]
            if v is None:
                raise NeedCell(u.head, i)
            memo[u] = v
            return v

        return go(t)


# ------------------------------------------------------------ satisfaction


@dataclass(frozen=True)
class Satisfaction:
    ok: bool
    equation: int | None = None
    assignment: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def check_satisfies(A: FiniteAlgebra) -> Satisfaction:
    """Every equation under every assignment; first failure reported."""
    for idx, eq in enumerate(A.presentation.equations):
        vs = sorted(eq.variables())
        for vals in itertools.product(range(A.size), repeat=len(vs)):
            env = dict(zip(vs, vals))
            if A.evaluate(eq.lhs, env) != A.evaluate(eq.rhs, env):
                return Satisfaction(False, idx, tuple(zip(vs, vals)))
    return Satisfaction(True)


def satisfies(A: FiniteAlgebra) -> bool:
    if A._satisfied is None:
        A._satisfied = bool(check_satisfies(A))
    return A._satisfied


# ---------------------------------------------------------- homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    """Letter assignment into a model, extended to terms by evaluation."""

    target: FiniteAlgebra
    assignment: tuple  # sorted (letter, element) pairs

    def __call__(self, t: Term) -> int:
        return eval_term(self, t)

    @property
    def h0(self) -> dict:
        return dict(self.assignment)


def extend_hom(A: FiniteAlgebra, h0: Mapping[str, int]) -> Homomorphism:
    if not satisfies(A):
        bad = check_satisfies(A)
        raise AlgebraError(f"target fails equation {bad.equation} at {bad.assignment}")
    for x, v in h0.items():
        if not 0 <= v < A.size:
            raise AlgebraError(f"{x!r} assigned out of range")
    return Homomorphism(A, tuple(sorted(h0.items())))


def eval_term(h: Homomorphism, t: Term) -> int:
    return h.target.evaluate(t, h.h0)


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, f: Sequence[int]) -> bool:
    for op, k in A.presentation.signature.operations:
        for args in itertools.product(range(A.size), repeat=k):
            if f[A.op(op, *args)] != B.op(op, *(f[a] for a in args)):
                return False
    return True


# ----------------------------------------------------------- constructions


def product(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    """Componentwise tables; pair (a, b) is element ``a * |B| + b``."""
    if A.presentation != B.presentation:
        raise AlgebraError("product needs the same presentation")
    n, m = A.size, B.size
    tables = {}
    for op, k in A.presentation.signature.operations:
        tab = []
        for args in itertools.product(range(n * m), repeat=k):
            left = A.op(op, *(x // m for x in args))
            right = B.op(op, *(x % m for x in args))
            tab.append(left * m + right)
        tables[op] = tab
    names = [f"({a},{b})" for a in A.names for b in B.names]
    return FiniteAlgebra(A.presentation, n * m, tables, names)


def product_projections(A: FiniteAlgebra, B: FiniteAlgebra):
    m = B.size
    return ([x // m for x in range(A.size * m)], [x % m for x in range(A.size * m)])


@dataclass(frozen=True)
class Congruence:
    algebra: FiniteAlgebra
    blocks: tuple  # element -> block label, labels numbered by first element

    def related(self, a: int, b: int) -> bool:
        return self.blocks[a] == self.blocks[b]

    def classes(self) -> list:
        out: dict = {}
        for x, lab in enumerate(self.blocks):
            out.setdefault(lab, []).append(x)
        return [out[k] for k in sorted(out)]

    def is_compatible(self) -> bool:
        A = self.algebra
        for op, k in A.presentation.signature.operations:
            seen: dict = {}
            for args in itertools.product(range(A.size), repeat=k):
                key = tuple(self.blocks[a] for a in args)
                val = self.blocks[A.op(op, *args)]
                if seen.setdefault(key, val) != val:
                    return False
        return True


def _normalize(labels: Sequence[int]) -> tuple:
    first: dict = {}
    return tuple(first.setdefault(l, len(first)) for l in labels)


def generate_congruence(A: FiniteAlgebra, pairs: Iterable[tuple]) -> Congruence:
    """Least congruence containing ``pairs``."""
    parent = list(range(A.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a == b:
            return False
        parent[max(a, b)] = min(a, b)
        return True

    for a, b in pairs:
        if not (0 <= a < A.size and 0 <= b < A.size):
            raise AlgebraError(f"pair ({a}, {b}) out of range")
        union(a, b)
    ops = A.presentation.signature.operations
    changed = True
    while changed:
        changed = False
        for op, k in ops:
            seen: dict = {}
            for args in itertools.product(range(A.size), repeat=k):
                key = tuple(find(a) for a in args)
                val = A.op(op, *args)
                other = seen.setdefault(key, val)
                if union(other, val):
                    changed = True
    return Congruence(A, _normalize([find(x) for x in range(A.size)]))


def discrete_congruence(A: FiniteAlgebra) -> Congruence:
    return Congruence(A, tuple(range(A.size)))


def quotient(A: FiniteAlgebra, theta: Congruence):
    """Quotient algebra and the projection as a list."""
    if not theta.is_compatible():
        raise AlgebraError("relation is not compatible with the operations")
    blocks = theta.blocks
    m = max(blocks) + 1
    reps = [blocks.index(b) for b in range(m)]
    tables = {}
    for op, k in A.presentation.signature.operations:
        tables[op] = [blocks[A.op(op, *(reps[b] for b in args))]
                      for args in itertools.product(range(m), repeat=k)]
    names = ["{" + ",".join(A.names[x] for x in cls) + "}" if len(cls) > 1 else A.names[cls[0]]
             for cls in theta.classes()]
    return FiniteAlgebra(A.presentation, m, tables, names), list(blocks)


def generated_subalgebra(A: FiniteAlgebra, generators: Iterable[int]):
    """Subalgebra generated by ``generators``, renumbered, plus the embedding."""
    elems = set(generators)
    ops = A.presentation.signature.operations
    changed = True
    while changed:
        changed = False
        current = sorted(elems)
        for op, k in ops:
            for args in itertools.product(current, repeat=k):
                v = A.op(op, *args)
                if v not in elems:
                    elems.add(v)
                    changed = True
    embed = sorted(elems)
    pos = {x: i for i, x in enumerate(embed)}
    m = len(embed)
    tables = {op: [pos[A.op(op, *(embed[i] for i in args))]
                   for args in itertools.product(range(m), repeat=k)]
              for op, k in ops}
    names = [A.names[x] for x in embed]
    return FiniteAlgebra(A.presentation, m, tables, names), embed


# ------------------------------------------------------------ model search


def _instances(p: Presentation, n: int):
    out = []
    for idx, eq in enumerate(p.equations):
        vs = sorted(eq.variables())
        for vals in itertools.product(range(n), repeat=len(vs)):
            out.append((eq, dict(zip(vs, vals))))
    return out


def search_model_families(p: Presentation, size: int,
                          budget: int = 2_000_000) -> Iterator[FiniteAlgebra]:
    """Models with cells filled only where some equation instance reads them.

    Each yielded algebra may keep ``None`` cells; every completion of those
    cells is a model, and distinct families describe disjoint model sets.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    tables = {op: [None] * size ** k for op, k in p.signature.operations}
    start = FiniteAlgebra(p, size, tables)
    instances = _instances(p, size)
    visited = 0

    def dfs(A: FiniteAlgebra, i: int):
        nonlocal visited
        visited += 1
        if visited > budget:
            raise ResourceError(f"model search at size {size} exceeds budget {budget}")
        while i < len(instances):
            eq, env = instances[i]
            try:
                ok = A.evaluate(eq.lhs, env) == A.evaluate(eq.rhs, env)
            except NeedCell as need:
                for v in range(size):
                    yield from dfs(A.with_cell(need.op, need.index, v), i)
                return
            if not ok:
                return
            i += 1
        yield A

    yield from dfs(start, 0)


def family_count(A: FiniteAlgebra) -> int:
    return A.size ** len(A.free_cells())


def expand_family(A: FiniteAlgebra) -> Iterator[FiniteAlgebra]:
    cells = A.free_cells()
    for vals in itertools.product(range(A.size), repeat=len(cells)):
        tables = {o: list(t) for o, t in A.tables.items()}
        for (op, i), v in zip(cells, vals):
            tables[op][i] = v
        yield FiniteAlgebra(A.presentation, A.size, tables, A.names)


def search_models(p: Presentation, size: int, budget: int = 1_000_000) -> list:
    """All models on ``{0..size-1}`` in a fixed deterministic order."""
    out = []
    for fam in search_model_families(p, size, budget):
        if len(out) + family_count(fam) > budget:
            raise ResourceError(f"more than {budget} models of size {size}")
        out.extend(expand_family(fam))
    return out


def lazy_sweep(A: FiniteAlgebra, probe: Callable[[FiniteAlgebra], object]):
    """Run ``probe`` on every completion of ``A``, branching only on read cells.

    Yields ``(refined algebra, result)``; the result holds for every
    completion of the refined algebra's remaining free cells.
    """
    try:
        result = probe(A)
    except NeedCell as need:
        for v in range(A.size):
            yield from lazy_sweep(A.with_cell(need.op, need.index, v), probe)
        return
    yield A, result


# ------------------------------------------------------------ file format


def parse_algebra(text: str, theories: Mapping[str, Presentation]) -> FiniteAlgebra:
    theory = None
    size = None
    names = None
    raw_tables: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", lineno, 1)
        head = head.strip()
        if head == "theory":
            name = rest.strip()
            if name not in theories:
                raise ParseError(f"unknown theory {name!r}", lineno, len(head) + 3)
            theory = theories[name]
        elif head == "carrier":
            parts = rest.split()
            if not parts or not parts[0].isdigit():
                raise ParseError("carrier needs a size", lineno, len(head) + 3)
            size = int(parts[0])
            if len(parts) > 1:
                names = parts[1:]
                if len(names) != size:
                    raise ParseError(f"carrier lists {len(names)} names for size {size}",
                                     lineno, len(head) + 3)
        elif head.startswith("op "):
            raw_tables[head[3:].strip()] = (lineno, rest.split())
        else:
            raise ParseError(f"unknown key {head!r}", lineno, 1)
    if theory is None or size is None:
        raise ParseError("algebra file needs 'theory:' and 'carrier:' lines")
    names = names or [str(i) for i in range(size)]
    lookup = {nm: i for i, nm in enumerate(names)}
    tables = {}
    for op, (lineno, entries) in raw_tables.items():
        if op not in theory.arity:
            raise ParseError(f"operation {op!r} not in theory", lineno, 4)
        vals = []
        for e in entries:
            if e in lookup:
                vals.append(lookup[e])
            elif e.isdigit() and int(e) < size:
                vals.append(int(e))
            else:
                raise ParseError(f"unknown element {e!r}", lineno, 1)
        want = size ** theory.arity[op]
        if len(vals) != want:
            raise ParseError(f"table for {op!r} needs {want} entries, got {len(vals)}",
                             lineno, 1)
        tables[op] = vals
    missing = set(theory.arity) - set(tables)
    if missing:
        raise ParseError(f"missing tables for {sorted(missing)}")
    return FiniteAlgebra(theory, size, tables, names)


def print_algebra(A: FiniteAlgebra, theory_name: str | None = None) -> str:
    out = [f"theory: {theory_name or A.presentation.name}",
           "carrier: " + " ".join([str(A.size)] + A.names)]
    for op, k in A.presentation.signature.operations:
        out.append(f"op {op}: " + " ".join(A.names[v] for v in A.tables[op]))
    return "\n".join(out) + "\n"
