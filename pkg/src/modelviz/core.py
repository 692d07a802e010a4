"""Vocabularies, structures, and the operations every other layer builds on.

A vocabulary declares sorts, typed predicates and typed functions.  A
structure assigns finite interpretations to (some of) those symbols.  Both
are immutable after construction; all operations here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

from .errors import (
    ConflictingInterpretation,
    DuplicateName,
    MissingSymbol,
    SignatureClash,
    SortViolation,
)

Value = Union[int, str]

INT = "int"
STRING = "string"
CONSTRUCTED = "constructed"


def _canonical_values(values: Iterable[Value], base: str,
                      declared_order: tuple[str, ...] = ()) -> tuple[Value, ...]:
    """Deduplicate and order domain values canonically.

    Integers sort ascending, strings lexicographically, constructors in
    declaration order.  Deterministic enumeration and serialization depend
    on this order.
    """
    vals = list(dict.fromkeys(values))
    if base == CONSTRUCTED:
        order = {name: i for i, name in enumerate(declared_order)}
        return tuple(sorted(vals, key=lambda v: order[v]))
    return tuple(sorted(vals))


@dataclass(frozen=True)
class Sort:
    """A sort declaration.  Domain values live in structures, except for
    constructed sorts whose constructors fix the domain."""

    name: str
    base: str = INT  # INT, STRING or CONSTRUCTED
    constructors: tuple[str, ...] = ()

    def __post_init__(self):
        if self.base == CONSTRUCTED and not self.constructors:
            raise DuplicateName(f"constructed sort {self.name} has no constructors")
        if len(set(self.constructors)) != len(self.constructors):
            raise DuplicateName(f"sort {self.name} repeats a constructor")

    def check_value(self, v: Value) -> bool:
        if self.base == INT:
            return isinstance(v, int) and not isinstance(v, bool)
        if self.base == STRING:
            return isinstance(v, str)
        return v in self.constructors


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    arg_sorts: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    arg_sorts: tuple[str, ...]
    out_sort: str
    partial: bool = False

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


Decl = Union[Sort, PredicateDecl, FunctionDecl]


class Vocabulary:
    """A named set of sorts, predicates and functions.

    Extern vocabularies are included by object reference (inclusion is
    resolved at parse time, so it is transitive and cannot be cyclic).
    The flattened view is computed eagerly and checked for clashes.
    """

    def __init__(self, name: str,
                 sorts: Iterable[Sort] = (),
                 predicates: Iterable[PredicateDecl] = (),
                 functions: Iterable[FunctionDecl] = (),
                 externs: Iterable["Vocabulary"] = (),
                 ltc: bool = False):
        self.name = name
        self.sorts = tuple(sorts)
        self.predicates = tuple(predicates)
        self.functions = tuple(functions)
        self.externs = tuple(externs)
        self.ltc = ltc

        self._flat_sorts: dict[str, Sort] = {}
        self._flat_preds: dict[str, PredicateDecl] = {}
        self._flat_funcs: dict[str, FunctionDecl] = {}
        for ext in self.externs:
            for s in ext.all_sorts().values():
                self._add_sort(s)
            for p in ext.all_predicates().values():
                self._add(self._flat_preds, p)
            for f in ext.all_functions().values():
                self._add(self._flat_funcs, f)
        own: set[str] = set()
        for s in self.sorts:
            if s.name in own:
                raise DuplicateName(f"{name}: sort {s.name} declared twice")
            own.add(s.name)
            self._add_sort(s)
        for p in self.predicates:
            if p.name in own:
                raise DuplicateName(f"{name}: {p.name} declared twice")
            own.add(p.name)
            self._add(self._flat_preds, p)
        for f in self.functions:
            if f.name in own:
                raise DuplicateName(f"{name}: {f.name} declared twice")
            own.add(f.name)
            self._add(self._flat_funcs, f)
        for clash in (set(self._flat_sorts) & set(self._flat_preds)
                      | set(self._flat_sorts) & set(self._flat_funcs)
                      | set(self._flat_preds) & set(self._flat_funcs)):
            raise SignatureClash(f"{name}: {clash} declared as different symbol kinds")
        for sym in list(self._flat_preds.values()) + list(self._flat_funcs.values()):
            for sn in self._arg_and_out_sorts(sym):
                if sn not in self._flat_sorts:
                    raise SignatureClash(f"{name}: {sym.name} uses undeclared sort {sn}")

    @staticmethod
    def _arg_and_out_sorts(decl) -> tuple[str, ...]:
        if isinstance(decl, FunctionDecl):
            return decl.arg_sorts + (decl.out_sort,)
        return decl.arg_sorts

    def _add_sort(self, s: Sort):
        prev = self._flat_sorts.get(s.name)
        if prev is not None and prev != s:
            raise SignatureClash(f"{self.name}: sort {s.name} redeclared differently")
        self._flat_sorts[s.name] = s

    def _add(self, table: dict, decl):
        prev = table.get(decl.name)
        if prev is not None and prev != decl:
            raise SignatureClash(f"{self.name}: {decl.name} redeclared differently")
        table[decl.name] = decl

    # flattened views ------------------------------------------------------

    def all_sorts(self) -> dict[str, Sort]:
        return dict(self._flat_sorts)

    def all_predicates(self) -> dict[str, PredicateDecl]:
        return dict(self._flat_preds)

    def all_functions(self) -> dict[str, FunctionDecl]:
        return dict(self._flat_funcs)

    def sort(self, name: str) -> Sort:
        return self._flat_sorts[name]

    def symbol(self, name: str) -> Optional[Decl]:
        return (self._flat_sorts.get(name)
                or self._flat_preds.get(name)
                or self._flat_funcs.get(name))

    def symbol_names(self) -> set[str]:
        return set(self._flat_sorts) | set(self._flat_preds) | set(self._flat_funcs)

    def covers(self, other: "Vocabulary") -> bool:
        """True iff every symbol of `other` is declared here identically."""
        return (all(self._flat_sorts.get(n) == s for n, s in other._flat_sorts.items())
                and all(self._flat_preds.get(n) == p for n, p in other._flat_preds.items())
                and all(self._flat_funcs.get(n) == f for n, f in other._flat_funcs.items()))

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.name == other.name and self.ltc == other.ltc
                and self.sorts == other.sorts
                and self.predicates == other.predicates
                and self.functions == other.functions
                and tuple(e.name for e in self.externs)
                == tuple(e.name for e in other.externs))

    def __hash__(self):
        return hash((self.name, self.ltc))

    def __repr__(self):
        return f"Vocabulary({self.name!r})"


def union_vocabulary(name: str, vocabularies: Iterable[Vocabulary]) -> Vocabulary:
    """Flattened union of several vocabularies; raises SignatureClash on conflict."""
    return Vocabulary(name, externs=tuple(vocabularies))


# --- interpretations ------------------------------------------------------

@dataclass(frozen=True)
class SortValues:
    values: tuple[Value, ...]


@dataclass(frozen=True)
class Relation:
    tuples: frozenset[tuple[Value, ...]]

    def canonical(self) -> tuple:
        return tuple(sorted(self.tuples, key=_tuple_key))


@dataclass(frozen=True)
class FunctionMap:
    """Graph of a function, possibly over a strict subset of the argument space."""

    mapping: tuple[tuple[tuple[Value, ...], Value], ...]

    _index: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "mapping",
                           tuple(sorted(self.mapping, key=lambda e: _tuple_key(e[0]))))
        index = dict(self.mapping)
        if len(index) != len(self.mapping):
            raise ConflictingInterpretation("function graph maps a point twice")
        object.__setattr__(self, "_index", index)

    def get(self, point: tuple[Value, ...]):
        return self._index.get(point)

    def __contains__(self, point):
        return point in self._index

    def items(self):
        return self.mapping

    def canonical(self) -> tuple:
        return self.mapping


Interpretation = Union[SortValues, Relation, FunctionMap]


def _tuple_key(t: tuple[Value, ...]) -> tuple:
    return tuple((0, v) if isinstance(v, int) and not isinstance(v, bool) else (1, v)
                 for v in t)


def _value_key(v: Value) -> tuple:
    return (0, v) if isinstance(v, int) and not isinstance(v, bool) else (1, v)


class Structure:
    """A named mapping from the symbols of a vocabulary to interpretations.

    Symbols absent from `interps` are unspecified.  Construction validates
    every tuple against the declared sorts; enumerating a symbol whose
    argument or output sort has no domain yet is rejected.
    """

    def __init__(self, name: str, vocabulary: Vocabulary,
                 interps: Mapping[str, Interpretation] = ()):
        self.name = name
        self.vocabulary = vocabulary
        self.interps: dict[str, Interpretation] = dict(interps)
        for sort in vocabulary.all_sorts().values():
            if sort.base == CONSTRUCTED:
                declared = SortValues(_canonical_values(sort.constructors, CONSTRUCTED,
                                                        sort.constructors))
                given = self.interps.get(sort.name)
                if given is not None and given != declared:
                    raise SortViolation(
                        f"{name}: constructed sort {sort.name} cannot be reinterpreted")
                self.interps[sort.name] = declared
        self._validate()

    # validation -----------------------------------------------------------

    def _validate(self):
        voc = self.vocabulary
        sorts = voc.all_sorts()
        preds = voc.all_predicates()
        funcs = voc.all_functions()
        for sym, interp in self.interps.items():
            if sym in sorts:
                if not isinstance(interp, SortValues):
                    raise SortViolation(f"{self.name}: {sym} is a sort, got {type(interp).__name__}")
                sort = sorts[sym]
                if not interp.values:
                    raise SortViolation(f"{self.name}: sort {sym} interpreted as empty")
                if len(set(interp.values)) != len(interp.values):
                    raise SortViolation(f"{self.name}: sort {sym} repeats a value")
                for v in interp.values:
                    if not sort.check_value(v):
                        raise SortViolation(f"{self.name}: value {v!r} outside sort {sym}")
                canon = _canonical_values(interp.values, sort.base, sort.constructors)
                self.interps[sym] = SortValues(canon)
            elif sym in preds:
                if not isinstance(interp, Relation):
                    raise SortViolation(f"{self.name}: {sym} is a predicate, got {type(interp).__name__}")
                decl = preds[sym]
                for t in interp.tuples:
                    self._check_tuple(sym, t, decl.arg_sorts)
            elif sym in funcs:
                if not isinstance(interp, FunctionMap):
                    raise SortViolation(f"{self.name}: {sym} is a function, got {type(interp).__name__}")
                decl = funcs[sym]
                for point, value in interp.items():
                    self._check_tuple(sym, point, decl.arg_sorts)
                    self._check_element(sym, value, decl.out_sort)
            else:
                raise MissingSymbol(f"{self.name}: {sym} not declared in {voc.name}")

    def _check_tuple(self, sym: str, t: tuple, arg_sorts: tuple[str, ...]):
        if len(t) != len(arg_sorts):
            raise SortViolation(f"{self.name}: {sym} expects arity {len(arg_sorts)}, "
                                f"got tuple {t!r}")
        for v, sn in zip(t, arg_sorts):
            self._check_element(sym, v, sn)

    def _check_element(self, sym: str, v: Value, sort_name: str):
        domain = self.sort_values(sort_name)
        if domain is None:
            raise SortViolation(f"{self.name}: cannot enumerate {sym}; "
                                f"sort {sort_name} has no interpretation")
        if v not in domain:
            raise SortViolation(f"{self.name}: {sym} uses {v!r} outside sort {sort_name}")

    # accessors ------------------------------------------------------------

    def sort_values(self, sort_name: str) -> Optional[tuple[Value, ...]]:
        interp = self.interps.get(sort_name)
        if isinstance(interp, SortValues):
            return interp.values
        return None

    def interpretation(self, sym: str) -> Optional[Interpretation]:
        return self.interps.get(sym)

    def is_enumerated(self, sym: str) -> bool:
        return sym in self.interps

    def point_space(self, arg_sorts: tuple[str, ...]) -> Optional[list[tuple[Value, ...]]]:
        """All argument tuples of a symbol, in canonical order; None if some
        argument sort is uninterpreted."""
        domains = []
        for sn in arg_sorts:
            dom = self.sort_values(sn)
            if dom is None:
                return None
            domains.append(dom)
        points = [()]
        for dom in domains:
            points = [p + (v,) for p in points for v in dom]
        return points

    # derived facts ----------------------------------------------------------

    def canonical_key(self) -> tuple:
        """Hashable canonical form of the interpretations, for model
        comparison and deduplication.  Ignores the structure name."""
        out = []
        for sym in sorted(self.interps):
            interp = self.interps[sym]
            if isinstance(interp, SortValues):
                out.append((sym, "sort", interp.values))
            elif isinstance(interp, Relation):
                out.append((sym, "rel", interp.canonical()))
            else:
                out.append((sym, "fun", interp.canonical()))
        return tuple(out)

    def same_interpretations(self, other: "Structure") -> bool:
        return self.canonical_key() == other.canonical_key()

    def with_name(self, name: str) -> "Structure":
        return Structure(name, self.vocabulary, self.interps)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.name == other.name
                and self.vocabulary.name == other.vocabulary.name
                and self.canonical_key() == other.canonical_key())

    def __hash__(self):
        return hash((self.name, self.vocabulary.name, self.canonical_key()))

    def __repr__(self):
        return f"Structure({self.name!r} : {self.vocabulary.name!r})"


# --- operations -----------------------------------------------------------

def merge(a: Structure, b: Structure) -> Structure:
    """Glue two structures over the union of their vocabularies.

    Sort interpretations combine by union of their domains; a predicate or
    function enumerated in both inputs must be identical.
    """
    voc = union_vocabulary(f"{a.vocabulary.name}+{b.vocabulary.name}",
                           (a.vocabulary, b.vocabulary))
    sorts = voc.all_sorts()
    interps: dict[str, Interpretation] = dict(a.interps)
    for sym, interp in b.interps.items():
        if sym not in interps:
            interps[sym] = interp
            continue
        mine = interps[sym]
        if sym in sorts:
            assert isinstance(mine, SortValues) and isinstance(interp, SortValues)
            sort = sorts[sym]
            interps[sym] = SortValues(_canonical_values(
                mine.values + interp.values, sort.base, sort.constructors))
        elif mine != interp:
            raise ConflictingInterpretation(
                f"merge: {sym} enumerated differently in {a.name} and {b.name}")
    return Structure(f"{a.name}+{b.name}", voc, interps)


def merge_all(structures: Iterable[Structure]) -> Structure:
    structures = list(structures)
    result = structures[0]
    for s in structures[1:]:
        result = merge(result, s)
    return result


def project(s: Structure, v: Vocabulary) -> Structure:
    """Restrict `s` to exactly the symbols of `v`."""
    available = s.vocabulary.symbol_names()
    for sym in v.symbol_names():
        if sym not in available:
            raise MissingSymbol(f"project: {s.vocabulary.name} lacks {sym}")
        theirs = v.symbol(sym)
        mine = s.vocabulary.symbol(sym)
        if theirs != mine:
            raise SignatureClash(f"project: {sym} declared differently in target")
    interps = {sym: interp for sym, interp in s.interps.items()
               if v.symbol(sym) is not None}
    return Structure(s.name, v, interps)


def lift(s: Structure, v: Vocabulary) -> Structure:
    """View `s` over the larger vocabulary `v`; added symbols are unspecified."""
    if not v.covers(s.vocabulary):
        raise SignatureClash(f"lift: {v.name} does not cover {s.vocabulary.name}")
    return Structure(s.name, v, s.interps)


def conform(s: Structure, v: Vocabulary) -> Structure:
    """View `s` over `v`: interpretations of shared symbols are kept, the
    rest are dropped; shared symbols must be declared identically."""
    interps = {}
    for sym, interp in s.interps.items():
        theirs = v.symbol(sym)
        if theirs is None:
            continue
        if theirs != s.vocabulary.symbol(sym):
            raise SignatureClash(f"conform: {sym} declared differently in {v.name}")
        interps[sym] = interp
    return Structure(s.name, v, interps)


def is_two_valued(s: Structure) -> bool:
    """True iff every symbol is fully interpreted.

    Enumerated relations are closed-world, so they decide every tuple.
    Non-partial functions must be total over their argument space; partial
    functions may have gaps.  A sort without an interpretation behaves as an
    empty domain, so symbols whose argument space is empty are decided.
    """
    voc = s.vocabulary

    def space(arg_sorts: tuple[str, ...]) -> list[tuple[Value, ...]]:
        domains = [s.sort_values(sn) or () for sn in arg_sorts]
        points = [()]
        for dom in domains:
            points = [p + (v,) for p in points for v in dom]
        return points

    for name, decl in voc.all_predicates().items():
        if not s.is_enumerated(name) and space(decl.arg_sorts):
            return False
    for name, decl in voc.all_functions().items():
        points = space(decl.arg_sorts)
        interp = s.interpretation(name)
        if interp is None:
            if points:
                return False
            continue
        if not decl.partial:
            assert isinstance(interp, FunctionMap)
            for point in points:
                if point not in interp:
                    return False
    return True
