"""Signatures, terms and equational presentations.

Terms are immutable trees.  A leaf holds a letter or a variable (variables
carry a leading ``?``); a node holds an operation name and its children.
Constants are nullary nodes, never leaves, so ``size`` counts them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class ParseError(ValueError):
    """Syntax or well-formedness problem, with a 1-based position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


class UnboundVariable(KeyError):
    pass


class Term:
    """A ground or open term.  Use :func:`leaf` and :func:`node` to build."""

    __slots__ = ("head", "args", "is_leaf", "size", "_hash")

    def __init__(self, head: str, args: tuple = (), is_leaf: bool = False):
        self.head = head
        self.args = args
        self.is_leaf = is_leaf
        self.size = 0 if is_leaf else 1 + sum(a.size for a in args)
        self._hash = hash((head, args, is_leaf))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return (self.head == other.head and self.is_leaf == other.is_leaf
                and self.args == other.args)

    def __repr__(self) -> str:
        return f"Term({show(self)})"

    def __str__(self) -> str:
        return show(self)

    @property
    def is_var(self) -> bool:
        return self.is_leaf and self.head.startswith("?")

    def depth(self) -> int:
        if not self.args:
            return 0
        return 1 + max(a.depth() for a in self.args)


def leaf(name: str) -> Term:
    return Term(name, (), True)


def var(name: str) -> Term:
    return leaf(name if name.startswith("?") else "?" + name)


def node(op: str, *children: Term) -> Term:
    return Term(op, tuple(children), False)


_SHOW_CACHE: dict = {}


def show(t: Term) -> str:
    """Print as an s-expression; bare symbols for leaves and constants."""
    if not t.args:
        return t.head
    cached = _SHOW_CACHE.get(t)
    if cached is not None:
        return cached
    text = "(" + t.head + " " + " ".join(show(a) for a in t.args) + ")"
    if len(_SHOW_CACHE) < 200_000:
        _SHOW_CACHE[t] = text
    return text


def term_key(t: Term) -> tuple:
    """Canonical order: size first, then the printed form."""
    return (t.size, show(t))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for a in t.args:
        yield from subterms(a)


def leaves(t: Term) -> Iterator[str]:
    if t.is_leaf:
        yield t.head
    for a in t.args:
        yield from leaves(a)


def variables(t: Term) -> set:
    return {x for x in leaves(t) if x.startswith("?")}


def letters(t: Term) -> set:
    return {x for x in leaves(t) if not x.startswith("?")}


def var_counts(t: Term) -> dict:
    counts: dict = {}
    for x in leaves(t):
        if x.startswith("?"):
            counts[x] = counts.get(x, 0) + 1
    return counts


def replace_leaves(t: Term, binding: Mapping[str, Term], strict: bool = True) -> Term:
    """Substitute leaves named in ``binding``.  Unnamed leaves raise when strict."""
    memo: dict = {}

    def go(u: Term) -> Term:
        if u.is_leaf:
            if u.head in binding:
                return binding[u.head]
            if strict:
                raise UnboundVariable(u.head)
            return u
        if not u.args:
            return u
        got = memo.get(u)
        if got is None:
            got = Term(u.head, tuple(go(a) for a in u.args), False)
            memo[u] = got
        return got

    return go(t)


def apply_substitution(t: Term, binding: Mapping[str, Term]) -> Term:
    """Replace every variable of ``t``; letters are left alone."""
    for x in variables(t):
        if x not in binding:
            raise UnboundVariable(x)
    return replace_leaves(t, binding, strict=False)


def match(pattern: Term, t: Term, binding: dict | None = None) -> dict | None:
    """Syntactic matching of an open pattern against a term."""
    binding = dict(binding or {})
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if p.is_var:
            seen = binding.get(p.head)
            if seen is None:
                binding[p.head] = u
            elif seen != u:
                return None
            continue
        if p.is_leaf != u.is_leaf or p.head != u.head or len(p.args) != len(u.args):
            return None
        stack.extend(zip(p.args, u.args))
    return binding


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    operations: tuple  # of (name, arity)

    def __post_init__(self):
        seen = set()
        for name, arity in self.operations:
            if name in seen:
                raise ParseError(f"duplicate operation name {name!r}")
            if arity < 0:
                raise ParseError(f"negative arity for {name!r}")
            seen.add(name)

    @property
    def arity(self) -> dict:
        return dict(self.operations)

    def names(self) -> list:
        return [n for n, _ in self.operations]

    def constants(self) -> list:
        return [n for n, k in self.operations if k == 0]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def variables(self) -> set:
        return variables(self.lhs) | variables(self.rhs)

    def __str__(self) -> str:
        return f"{show(self.lhs)} = {show(self.rhs)}"


@dataclass(frozen=True)
class Presentation:
    signature: Signature
    equations: tuple = ()
    name: str = ""

    def __post_init__(self):
        arity = self.signature.arity
        for eq in self.equations:
            for side in (eq.lhs, eq.rhs):
                check_term(side, arity, allow_letters=False)

    @property
    def arity(self) -> dict:
        return self.signature.arity

    def size_preserving(self) -> bool:
        """True when every equation keeps term size under every instance.

        That holds when both sides have the same node count and each
        variable occurs equally often on both sides.
        """
        return all(eq.lhs.size == eq.rhs.size
                   and var_counts(eq.lhs) == var_counts(eq.rhs)
                   for eq in self.equations)


def check_term(t: Term, arity: Mapping[str, int], allow_letters: bool = True,
               allow_vars: bool = True) -> None:
    for u in subterms(t):
        if u.is_leaf:
            if u.is_var and not allow_vars:
                raise ParseError(f"variable {u.head} not allowed here")
            if not u.is_var and not allow_letters:
                raise ParseError(f"letter {u.head!r} not allowed in an equation")
            if u.head in arity:
                raise ParseError(f"{u.head!r} is an operation, not a letter")
            continue
        if u.head not in arity:
            raise ParseError(f"undeclared operation {u.head!r}")
        if arity[u.head] != len(u.args):
            raise ParseError(f"arity mismatch for {u.head!r}: expected "
                             f"{arity[u.head]}, got {len(u.args)}")


# ----------------------------------------------------------------- parsing


def _tokens(text: str, line: int = 1, col0: int = 1):
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, line, col0 + i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], line, col0 + i
            i = j


def parse_term(text: str, arity: Mapping[str, int] | None = None,
               line: int = 1, col: int = 1) -> Term:
    """Parse an s-expression.  Bare symbols naming constants become nodes."""
    arity = arity or {}
    toks = list(_tokens(text, line, col))
    pos = 0

    def at_end_error(msg):
        last = toks[-1] if toks else ("", line, col)
        return ParseError(msg, last[1], last[2] + len(last[0]))

    def parse():
        nonlocal pos
        if pos >= len(toks):
            raise at_end_error("unexpected end of term")
        tok, ln, cl = toks[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'", ln, cl)
        if tok != "(":
            if tok in arity:
                if arity[tok] != 0:
                    raise ParseError(f"operation {tok!r} used without arguments", ln, cl)
                return node(tok)
            return leaf(tok)
        if pos >= len(toks):
            raise at_end_error("unexpected end of term")
        op, oln, ocl = toks[pos]
        pos += 1
        if op in "()":
            raise ParseError("expected operation name", oln, ocl)
        kids = []
        while True:
            if pos >= len(toks):
                raise at_end_error("missing ')'")
            if toks[pos][0] == ")":
                pos += 1
                break
            kids.append(parse())
        if arity and op not in arity:
            raise ParseError(f"undeclared operation {op!r}", oln, ocl)
        if arity and arity[op] != len(kids):
            raise ParseError(f"arity mismatch for {op!r}: expected {arity[op]}, "
                             f"got {len(kids)}", oln, ocl)
        return node(op, *kids)

    t = parse()
    if pos != len(toks):
        tok, ln, cl = toks[pos]
        raise ParseError(f"trailing input {tok!r}", ln, cl)
    return t


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def parse_presentation(text: str) -> Presentation:
    """Read the line-oriented theory format (``name:``, ``ops:``, ``eq:``)."""
    name = ""
    ops: list = []
    eq_lines: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError("expected 'key: value'", lineno, 1)
        offset = len(key) + 2 + (len(line) - len(line.lstrip()))
        if key == "name":
            name = rest.strip()
        elif key == "ops":
            for item in rest.split(","):
                item = item.strip()
                if not item:
                    continue
                opname, slash, ar = item.rpartition("/")
                if not slash or not opname or not ar.strip().isdigit():
                    raise ParseError(f"bad operation declaration {item!r}",
                                     lineno, offset + rest.find(item))
                if any(o == opname for o, _ in ops):
                    raise ParseError(f"duplicate operation name {opname!r}",
                                     lineno, offset + rest.find(item))
                ops.append((opname.strip(), int(ar)))
        elif key == "eq":
            eq_lines.append((lineno, offset, rest))
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    sig = Signature(tuple(ops))
    arity = sig.arity
    eqs = []
    for lineno, offset, rest in eq_lines:
        left, eqsign, right = rest.partition("=")
        if not eqsign:
            raise ParseError("equation needs '='", lineno, offset)
        lhs = parse_term(left, arity, lineno, offset)
        rhs = parse_term(right, arity, lineno, offset + len(left) + 1)
        for side in (lhs, rhs):
            bad = letters(side)
            if bad:
                raise ParseError(f"equations use ?variables, found letter "
                                 f"{sorted(bad)[0]!r}", lineno, offset)
        eqs.append(Equation(lhs, rhs))
    return Presentation(sig, tuple(eqs), name)


def print_presentation(p: Presentation) -> str:
    out = []
    if p.name:
        out.append(f"name: {p.name}")
    out.append("ops: " + ", ".join(f"{n}/{k}" for n, k in p.signature.operations))
    for eq in p.equations:
        out.append(f"eq: {eq}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ letter maps


@dataclass(frozen=True)
class LetterMap:
    source: tuple
    target: tuple
    mapping: tuple = field(default=())  # sorted (letter, image) pairs

    def __post_init__(self):
        table = dict(self.mapping)
        for x in self.source:
            if x not in table:
                raise ValueError(f"letter map undefined on {x!r}")
            if table[x] not in self.target:
                raise ValueError(f"{x!r} maps outside the target alphabet")

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str], target: Iterable[str] | None = None):
        source = tuple(sorted(mapping))
        tgt = tuple(sorted(set(target) if target is not None else set(mapping.values())))
        return cls(source, tgt, tuple(sorted(mapping.items())))

    @classmethod
    def identity(cls, alphabet: Iterable[str]):
        alphabet = sorted(alphabet)
        return cls.from_dict({x: x for x in alphabet}, alphabet)

    def __call__(self, x: str) -> str:
        return dict(self.mapping)[x]

    def as_dict(self) -> dict:
        return dict(self.mapping)

    @property
    def surjective(self) -> bool:
        return set(self.as_dict().values()) == set(self.target)

    def preimage(self, y: str) -> list:
        return [x for x, fx in self.mapping if fx == y]

    def __str__(self) -> str:
        return ",".join(f"{x}->{y}" for x, y in self.mapping)


def parse_letter_map(text: str, target: Iterable[str] | None = None) -> LetterMap:
    """``"a->c,b->c"`` style."""
    mapping = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        src, arrow, dst = item.partition("->")
        if not arrow or not src.strip() or not dst.strip():
            raise ParseError(f"bad map entry {item!r}")
        mapping[src.strip()] = dst.strip()
    return LetterMap.from_dict(mapping, target)


# ------------------------------------------------------------ classification


@dataclass(frozen=True)
class EquationClass:
    equation: Equation
    regular: bool
    linear: bool


@dataclass(frozen=True)
class ClassificationReport:
    per_equation: tuple

    @property
    def all_regular_linear(self) -> bool:
        return all(e.regular and e.linear for e in self.per_equation)


def is_linear(t: Term) -> bool:
    return all(c == 1 for c in var_counts(t).values())


def classify_equations(p: Presentation) -> ClassificationReport:
    rows = []
    for eq in p.equations:
        regular = variables(eq.lhs) == variables(eq.rhs)
        linear = is_linear(eq.lhs) and is_linear(eq.rhs)
        rows.append(EquationClass(eq, regular, linear))
    return ClassificationReport(tuple(rows))
