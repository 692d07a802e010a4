"""Terms, formulas, rules, theories: the abstract syntax shared by the
parser, the type checker, the printer and the solver.

Every node carries an optional source position that is excluded from
structural equality, so round-tripped programs compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .core import Value, Vocabulary


@dataclass(frozen=True)
class Pos:
    line: int
    column: int


def _pos_field():
    return field(default=None, compare=False, repr=False)


# --- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class IntConst:
    value: int
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class StrConst:
    value: str
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class EnumConst:
    """A constructor of a constructed sort, e.g. one of the shape names."""
    name: str
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class FuncApp:
    name: str
    args: tuple["Term", ...] = ()
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Arith:
    op: str  # '+', '-', '*'
    lhs: "Term"
    rhs: "Term"
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Builtin:
    """Built-in total string helpers: 'concat' joins strings, 'str' renders
    an integer as a string.  These replace script-valued interpretations."""
    op: str  # 'concat' | 'str'
    args: tuple["Term", ...]
    pos: Optional[Pos] = _pos_field()


Term = Union[Var, IntConst, StrConst, EnumConst, FuncApp, Arith, Builtin]


# --- formulas ----------------------------------------------------------------

@dataclass(frozen=True)
class Truth:
    value: bool
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Cmp:
    op: str  # '=', '!=', '<', '>', '<=', '>='
    lhs: Term
    rhs: Term
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Not:
    body: "Formula"
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class BinOp:
    op: str  # 'and', 'or', 'implies', 'impliedby', 'equiv'
    lhs: "Formula"
    rhs: "Formula"
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class Quant:
    kind: str  # 'forall' | 'exists'
    variables: tuple["QuantVar", ...]
    body: "Formula"
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class QuantVar:
    name: str
    sort: Optional[str] = None  # filled in by type derivation if not annotated


Formula = Union[Truth, Atom, Cmp, Not, BinOp, Quant]


# --- rules and theories -------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """One rule of an inductive definition.

    The head is either a predicate atom or a function-value equation
    ``f(args) = value``.  Free variables are implicitly universally
    quantified; their derived sorts are recorded in `variables`.
    """
    head_symbol: str
    head_args: tuple[Term, ...]
    head_value: Optional[Term]  # None for predicate heads
    body: Formula
    variables: tuple[QuantVar, ...] = ()
    pos: Optional[Pos] = _pos_field()

    @property
    def defines_function(self) -> bool:
        return self.head_value is not None


@dataclass(frozen=True)
class Definition:
    rules: tuple[Rule, ...]

    def defined_symbols(self) -> set[str]:
        return {r.head_symbol for r in self.rules}


class Theory:
    """Sentences plus inductive definitions over a vocabulary."""

    def __init__(self, name: str, vocabulary: Vocabulary,
                 sentences: tuple[Formula, ...] = (),
                 definitions: tuple[Definition, ...] = ()):
        self.name = name
        self.vocabulary = vocabulary
        self.sentences = tuple(sentences)
        self.definitions = tuple(definitions)

    def defined_symbols(self) -> set[str]:
        out: set[str] = set()
        for d in self.definitions:
            out |= d.defined_symbols()
        return out

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return (self.name == other.name
                and self.vocabulary.name == other.vocabulary.name
                and self.sentences == other.sentences
                and self.definitions == other.definitions)

    def __hash__(self):
        return hash((self.name, self.vocabulary.name))

    def __repr__(self):
        return f"Theory({self.name!r} : {self.vocabulary.name!r})"


class Program:
    """Ordered named blocks of one parsed input text."""

    def __init__(self):
        self.vocabularies: dict[str, Vocabulary] = {}
        self.theories: dict[str, Theory] = {}
        self.structures: dict[str, "Structure"] = {}
        self.generated: dict[str, Vocabulary] = {}  # auto-derived, not printed
        self.order: list[tuple[str, str]] = []  # (kind, name) in source order

    def add_vocabulary(self, v: Vocabulary):
        self.vocabularies[v.name] = v
        self.order.append(("vocabulary", v.name))

    def add_theory(self, t: Theory):
        self.theories[t.name] = t
        self.order.append(("theory", t.name))

    def add_structure(self, s):
        self.structures[s.name] = s
        self.order.append(("structure", s.name))

    def is_empty(self) -> bool:
        return not self.order

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (self.order == other.order
                and self.vocabularies == other.vocabularies
                and self.theories == other.theories
                and self.structures == other.structures)

    def __repr__(self):
        return f"Program({[n for _, n in self.order]})"


# --- traversal helpers ---------------------------------------------------------

def subterms(term: Term):
    yield term
    if isinstance(term, FuncApp):
        for a in term.args:
            yield from subterms(a)
    elif isinstance(term, Arith):
        yield from subterms(term.lhs)
        yield from subterms(term.rhs)
    elif isinstance(term, Builtin):
        for a in term.args:
            yield from subterms(a)


def formula_terms(f: Formula):
    if isinstance(f, Atom):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, Cmp):
        yield from subterms(f.lhs)
        yield from subterms(f.rhs)
    elif isinstance(f, Not):
        yield from formula_terms(f.body)
    elif isinstance(f, BinOp):
        yield from formula_terms(f.lhs)
        yield from formula_terms(f.rhs)
    elif isinstance(f, Quant):
        yield from formula_terms(f.body)


def formula_atoms(f: Formula):
    """All atoms with the polarity of their occurrence (True = positive).

    Both sides of an equivalence yield both polarities.
    """
    def walk(g: Formula, positive: bool):
        if isinstance(g, Atom) or isinstance(g, Cmp):
            yield g, positive
        elif isinstance(g, Not):
            yield from walk(g.body, not positive)
        elif isinstance(g, BinOp):
            if g.op == "and" or g.op == "or":
                yield from walk(g.lhs, positive)
                yield from walk(g.rhs, positive)
            elif g.op == "implies":
                yield from walk(g.lhs, not positive)
                yield from walk(g.rhs, positive)
            elif g.op == "impliedby":
                yield from walk(g.lhs, positive)
                yield from walk(g.rhs, not positive)
            else:  # equiv
                for side in (g.lhs, g.rhs):
                    yield from walk(side, True)
                    yield from walk(side, False)
        elif isinstance(g, Quant):
            yield from walk(g.body, positive)
    yield from walk(f, True)


def symbols_in_term(term: Term) -> set[str]:
    return {t.name for t in subterms(term) if isinstance(t, FuncApp)}


def symbols_in_formula(f: Formula) -> set[str]:
    out: set[str] = set()
    for atom, _ in formula_atoms(f):
        if isinstance(atom, Atom):
            out.add(atom.pred)
            for a in atom.args:
                out |= symbols_in_term(a)
        else:
            out |= symbols_in_term(atom.lhs)
            out |= symbols_in_term(atom.rhs)
    return out


def symbols_in_rule(r: Rule) -> set[str]:
    out = {r.head_symbol}
    for a in r.head_args:
        out |= symbols_in_term(a)
    if r.head_value is not None:
        out |= symbols_in_term(r.head_value)
    out |= symbols_in_formula(r.body)
    return out
