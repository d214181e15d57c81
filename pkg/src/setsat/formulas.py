"""Surface syntax and normalization for set formulas.

Grammar (ASCII):

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("||" and)*
    and     := lit ("&&" lit)*
    lit     := "!" lit | "(" formula ")" | atom
    atom    := expr ("=" | "!=" | "<=") expr
    expr    := term (("+" | "-") term)*
    term    := factor (("&" | "*") factor)*
    factor  := ident | "0" | "(" expr ")"

``+ - & *`` are union, difference, intersection and unordered Cartesian
product; ``0`` is the empty set; ``<=`` is inclusion.  ``*`` binds like
``&``.  Identifiers match [A-Za-z][A-Za-z0-9_]*.

Normalization rewrites a conjunction of (possibly negated) atoms into the
restricted atom alphabet used by the solver: x = y+z, x = y-z, x = y*z,
x <= y*z and x != 0, flattening nested expressions through fresh variables
named _f0, _f1, ... (never legal user names, so they cannot collide).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError, SizeLimit


# --- expression / atom / formula trees ---

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Empty(Expr):
    pass


@dataclass(frozen=True)
class Union(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Inter(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Diff(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Prod(Expr):
    left: Expr
    right: Expr


class Atom:
    __slots__ = ()


@dataclass(frozen=True)
class Eq(Atom):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neq(Atom):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Atom):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class NotSub(Atom):
    left: Expr
    right: Expr


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class AtomF(Formula):
    atom: Atom


@dataclass(frozen=True)
class Not(Formula):
    inner: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


# --- normalized atoms ---

class NormAtom:
    __slots__ = ()


@dataclass(frozen=True)
class UnionA(NormAtom):
    """x = y + z"""
    x: str
    y: str
    z: str


@dataclass(frozen=True)
class DiffA(NormAtom):
    """x = y - z"""
    x: str
    y: str
    z: str


@dataclass(frozen=True)
class ProdEq(NormAtom):
    """x = y * z"""
    x: str
    y: str
    z: str


@dataclass(frozen=True)
class ProdSub(NormAtom):
    """x <= y * z"""
    x: str
    y: str
    z: str


@dataclass(frozen=True)
class NonEmpty(NormAtom):
    """x != 0"""
    x: str


@dataclass(frozen=True)
class NormConj:
    """A conjunction of normalized atoms, with the bookkeeping needed to
    map models back to the variables the user wrote."""

    atoms: tuple[NormAtom, ...]
    original_vars: frozenset[str]
    fresh_vars: frozenset[str]

    def __post_init__(self):
        overlap = self.original_vars & self.fresh_vars
        if overlap:
            raise ValueError(f"fresh names collide with originals: {overlap}")
        mentioned = atom_vars(self.atoms)
        stray = mentioned - self.original_vars - self.fresh_vars
        if stray:
            raise ValueError(f"atoms mention unregistered variables: {stray}")

    @property
    def vars(self) -> frozenset[str]:
        return self.original_vars | self.fresh_vars


def atom_vars(atoms: Iterable[NormAtom]) -> frozenset[str]:
    out = set()
    for a in atoms:
        if isinstance(a, NonEmpty):
            out.add(a.x)
        else:
            out.update((a.x, a.y, a.z))
    return frozenset(out)


# --- tokenizer ---

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||->|!=|<=|[-+&*()=!0])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r} at offset {pos}", pos
            )
        if m.lastgroup != "ws":
            tokens.append((m.group(), m.start()))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def offset(self) -> int:
        return self.tokens[self.pos][1]

    def advance(self) -> str:
        tok = self.tokens[self.pos][0]
        if tok != "<end>":
            self.pos += 1
        return tok

    def expect(self, tok: str):
        if self.peek() != tok:
            self.fail(tok)
        self.advance()

    def fail(self, expected: str):
        raise ParseError(
            f"expected {expected!r} but found {self.peek()!r} at offset "
            f"{self.offset()}",
            self.offset(),
            expected,
        )

    # formula level

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "||":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.literal()
        while self.peek() == "&&":
            self.advance()
            left = And(left, self.literal())
        return left

    def literal(self) -> Formula:
        if self.peek() == "!":
            self.advance()
            return Not(self.literal())
        # "(" is ambiguous between a parenthesized formula and a
        # parenthesized expression starting an atom; try the atom first and
        # fall back.
        if self.peek() == "(":
            saved = self.pos
            try:
                return AtomF(self.atom())
            except ParseError:
                self.pos = saved
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        return AtomF(self.atom())

    def atom(self) -> Atom:
        left = self.expr()
        op = self.peek()
        if op not in ("=", "!=", "<="):
            self.fail("'=', '!=' or '<='")
        self.advance()
        right = self.expr()
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return Neq(left, right)
        return Sub(left, right)

    # expression level

    def expr(self) -> Expr:
        left = self.term()
        while self.peek() in ("+", "-"):
            op = self.advance()
            right = self.term()
            left = Union(left, right) if op == "+" else Diff(left, right)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.peek() in ("&", "*"):
            op = self.advance()
            right = self.factor()
            left = Inter(left, right) if op == "&" else Prod(left, right)
        return left

    def factor(self) -> Expr:
        tok = self.peek()
        if tok == "0":
            self.advance()
            return Empty()
        if tok == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", tok):
            self.advance()
            return Var(tok)
        self.fail("identifier, '0' or '('")


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    result = parser.formula()
    if parser.peek() != "<end>":
        parser.fail("end of input")
    return result


# --- printing (inverse of the parser, minimal parentheses) ---

def format_expr(e: Expr, level: int = 0) -> str:
    # level 0: +/- context, level 1: &/* context, level 2: factor
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Empty):
        return "0"
    if isinstance(e, (Union, Diff)):
        op = "+" if isinstance(e, Union) else "-"
        s = f"{format_expr(e.left, 0)} {op} {format_expr(e.right, 1)}"
        return f"({s})" if level >= 1 else s
    op = "&" if isinstance(e, Inter) else "*"
    s = f"{format_expr(e.left, 1)} {op} {format_expr(e.right, 2)}"
    return f"({s})" if level >= 2 else s


def format_atom(a: Atom) -> str:
    op = {Eq: "=", Neq: "!=", Sub: "<=", NotSub: "</="}[type(a)]
    if isinstance(a, NotSub):
        # there is no surface token for a negated inclusion
        return f"!({format_expr(a.left)} <= {format_expr(a.right)})"
    return f"{format_expr(a.left)} {op} {format_expr(a.right)}"


def format_formula(f: Formula, level: int = 0) -> str:
    # level 0: ->, level 1: ||, level 2: &&, level 3: literal
    if isinstance(f, AtomF):
        return format_atom(f.atom)
    if isinstance(f, Not):
        return f"!{format_formula(f.inner, 3)}"
    if isinstance(f, Implies):
        s = f"{format_formula(f.left, 1)} -> {format_formula(f.right, 0)}"
        return f"({s})" if level >= 1 else s
    if isinstance(f, Or):
        s = f"{format_formula(f.left, 1)} || {format_formula(f.right, 2)}"
        return f"({s})" if level >= 2 else s
    s = f"{format_formula(f.left, 2)} && {format_formula(f.right, 3)}"
    return f"({s})" if level >= 3 else s


def formula_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()

    def walk_expr(e: Expr):
        if isinstance(e, Var):
            out.add(e.name)
        elif isinstance(e, (Union, Inter, Diff, Prod)):
            walk_expr(e.left)
            walk_expr(e.right)

    def walk(g: Formula):
        if isinstance(g, AtomF):
            walk_expr(g.atom.left)
            walk_expr(g.atom.right)
        elif isinstance(g, Not):
            walk(g.inner)
        else:
            walk(g.left)
            walk(g.right)

    walk(f)
    return frozenset(out)


# --- disjunctive normal form ---

_NEGATED = {Eq: Neq, Neq: Eq, Sub: NotSub, NotSub: Sub}


def negate_atom(a: Atom) -> Atom:
    return _NEGATED[type(a)](a.left, a.right)


def _merge(lhs: list[list[Atom]], rhs: list[list[Atom]], cap: int) -> list[list[Atom]]:
    out = []
    for b1 in lhs:
        for b2 in rhs:
            merged = list(b1)
            seen = set(b1)
            contradictory = False
            for a in b2:
                if negate_atom(a) in seen:
                    contradictory = True
                    break
                if a not in seen:
                    merged.append(a)
                    seen.add(a)
            if not contradictory:
                out.append(merged)
                if len(out) > cap:
                    raise SizeLimit(f"DNF exceeded {cap} branches")
    return out


def _branch_clean(branch: list[Atom]) -> list[Atom] | None:
    seen: set[Atom] = set()
    out = []
    for a in branch:
        if negate_atom(a) in seen:
            return None
        if a not in seen:
            out.append(a)
            seen.add(a)
    return out


def to_dnf(f: Formula, cap: int = 4096) -> list[list[Atom]]:
    """Branches whose disjunction is equivalent to ``f``.

    Each branch is a list of atoms (negations are folded into the Neq /
    NotSub forms).  Branches containing an atom together with its syntactic
    negation are dropped; duplicate branches are dropped.
    """

    def pos(g: Formula) -> list[list[Atom]]:
        if isinstance(g, AtomF):
            return [[g.atom]]
        if isinstance(g, Not):
            return neg(g.inner)
        if isinstance(g, And):
            return _merge(pos(g.left), pos(g.right), cap)
        if isinstance(g, Or):
            return pos(g.left) + pos(g.right)
        return neg(g.left) + pos(g.right)  # Implies

    def neg(g: Formula) -> list[list[Atom]]:
        if isinstance(g, AtomF):
            return [[negate_atom(g.atom)]]
        if isinstance(g, Not):
            return pos(g.inner)
        if isinstance(g, And):
            return neg(g.left) + neg(g.right)
        if isinstance(g, Or):
            return _merge(neg(g.left), neg(g.right), cap)
        return _merge(pos(g.left), neg(g.right), cap)  # Implies

    branches = []
    seen_sets = set()
    for branch in pos(f):
        cleaned = _branch_clean(branch)
        if cleaned is None:
            continue
        sig = frozenset(cleaned)
        if sig in seen_sets:
            continue
        seen_sets.add(sig)
        branches.append(cleaned)
        if len(branches) > cap:
            raise SizeLimit(f"DNF exceeded {cap} branches")
    return branches


# --- normalization of a branch ---

def simplify_expr(e: Expr) -> Expr:
    """Empty-set simplification: e+0=e, e-0=e, 0-e=0, e&0=0.  Products with
    a literal empty operand keep their shape; normalization routes them
    through a fresh variable pinned to the empty set."""
    if isinstance(e, (Var, Empty)):
        return e
    left = simplify_expr(e.left)
    right = simplify_expr(e.right)
    if isinstance(e, Union):
        if isinstance(left, Empty):
            return right
        if isinstance(right, Empty):
            return left
        return Union(left, right)
    if isinstance(e, Diff):
        if isinstance(right, Empty):
            return left
        if isinstance(left, Empty):
            return Empty()
        return Diff(left, right)
    if isinstance(e, Inter):
        if isinstance(left, Empty) or isinstance(right, Empty):
            return Empty()
        return Inter(left, right)
    return Prod(left, right)


class _Normalizer:
    def __init__(self, user_vars: frozenset[str]):
        self.user_vars = user_vars
        self.atoms: list[NormAtom] = []
        self.fresh: list[str] = []
        self.cache: dict[Expr, str] = {}
        self.counter = 0

    def fresh_var(self) -> str:
        name = f"_f{self.counter}"
        self.counter += 1
        self.fresh.append(name)
        return name

    def emit(self, atom: NormAtom):
        if atom not in self.atoms:
            self.atoms.append(atom)

    def flatten(self, e: Expr) -> str:
        """Return a variable denoting ``e``, defining fresh variables for
        compound subterms as needed."""
        if isinstance(e, Var):
            return e.name
        cached = self.cache.get(e)
        if cached is not None:
            return cached
        if isinstance(e, Empty):
            w = self.fresh_var()
            self.emit(DiffA(w, w, w))
        else:
            w = self.fresh_var()
            self.define(w, e)
        self.cache[e] = w
        return w

    def define(self, x: str, e: Expr):
        """Emit atoms forcing x = e, where e is a compound expression."""
        if isinstance(e, Union):
            self.emit(UnionA(x, self.flatten(e.left), self.flatten(e.right)))
        elif isinstance(e, Diff):
            self.emit(DiffA(x, self.flatten(e.left), self.flatten(e.right)))
        elif isinstance(e, Inter):
            y, z = self.flatten(e.left), self.flatten(e.right)
            w = self.fresh_var()
            self.emit(DiffA(w, y, z))
            self.emit(DiffA(x, y, w))
        elif isinstance(e, Prod):
            self.emit(ProdEq(x, self.flatten(e.left), self.flatten(e.right)))
        else:
            raise AssertionError(f"define() on non-compound {e!r}")

    def equal(self, l: Expr, r: Expr):
        if isinstance(l, Empty) and isinstance(r, Empty):
            return
        if isinstance(r, Empty):
            l, r = r, l
        if isinstance(l, Empty):
            v = self.flatten(r)
            self.emit(DiffA(v, v, v))
            return
        if isinstance(l, Var) and isinstance(r, Var):
            if l.name != r.name:
                self.emit(UnionA(l.name, r.name, r.name))
            return
        if isinstance(r, Var):
            l, r = r, l
        if isinstance(l, Var):
            self.define(l.name, r)
            return
        # both compound: name the left side, then define it against the right
        v = self.flatten(l)
        self.define(v, r)

    def subset(self, l: Expr, r: Expr):
        if isinstance(r, Prod):
            x = self.flatten(l)
            self.emit(ProdSub(x, self.flatten(r.left), self.flatten(r.right)))
            return
        # l <= r  becomes  w = l - r, l = l - w  (no emptiness atom needed)
        x = self.flatten(l)
        y = self.flatten(r)
        w = self.fresh_var()
        self.emit(DiffA(w, x, y))
        self.emit(DiffA(x, x, w))

    def nonempty(self, e: Expr):
        if isinstance(e, Empty):
            # 0 != 0 is unsatisfiable; pin a fresh variable both empty and
            # nonempty so the solver sees the contradiction.
            w = self.flatten(e)
            self.emit(NonEmpty(w))
            return
        self.emit(NonEmpty(self.flatten(e)))

    def add_atom(self, a: Atom):
        l = simplify_expr(a.left)
        r = simplify_expr(a.right)
        if isinstance(a, Eq):
            self.equal(l, r)
        elif isinstance(a, Sub):
            self.subset(l, r)
        elif isinstance(a, Neq):
            self.nonempty(simplify_expr(Union(Diff(l, r), Diff(r, l))))
        else:  # NotSub
            self.nonempty(simplify_expr(Diff(l, r)))


def normalize_branch(branch: Sequence[Atom]) -> NormConj:
    """Rewrite a DNF branch into an equisatisfiable normalized conjunction."""
    user_vars: set[str] = set()

    def collect(e: Expr):
        if isinstance(e, Var):
            user_vars.add(e.name)
        elif isinstance(e, (Union, Inter, Diff, Prod)):
            collect(e.left)
            collect(e.right)

    for a in branch:
        collect(a.left)
        collect(a.right)

    norm = _Normalizer(frozenset(user_vars))
    for a in branch:
        norm.add_atom(a)
    return NormConj(
        atoms=tuple(norm.atoms),
        original_vars=frozenset(user_vars),
        fresh_vars=frozenset(norm.fresh),
    )


def normalize_formula(f: Formula | str, dnf_cap: int = 4096) -> list[NormConj]:
    """Parse (if needed), convert to DNF and normalize every branch."""
    if isinstance(f, str):
        f = parse_formula(f)
    return [normalize_branch(b) for b in to_dnf(f, cap=dnf_cap)]
