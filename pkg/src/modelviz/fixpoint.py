"""Stratified evaluation of inductive definitions.

A definition's defined symbols are computed stratum by stratum as a least
fixpoint; on this fragment the result coincides with the total well-founded
model.  Recursion through negation is rejected.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from .core import FunctionMap, Relation, Structure, Interpretation
from .errors import (
    FunctionConflict,
    NotTwoValued,
    PartialityViolation,
    SortViolation,
    UnstratifiedDefinition,
)
from .evaluate import UNDEF, UNKNOWN, StructureView, eval_formula, eval_term
from .syntax import (
    Atom,
    Cmp,
    Definition,
    Rule,
    formula_atoms,
    symbols_in_rule,
    symbols_in_term,
)
from .typecheck import BUILTIN_FUNCTIONS


def _dependency_edges(rule: Rule, defined: set[str]) -> Iterable[tuple[str, bool]]:
    """Defined symbols the rule's firing depends on, with a positivity flag."""
    for term in rule.head_args:
        for sym in symbols_in_term(term):
            if sym in defined:
                yield sym, True
    if rule.head_value is not None:
        for sym in symbols_in_term(rule.head_value):
            if sym in defined:
                yield sym, True
    for atom, positive in formula_atoms(rule.body):
        if isinstance(atom, Atom):
            if atom.pred in defined:
                yield atom.pred, positive
            terms = atom.args
        else:
            assert isinstance(atom, Cmp)
            terms = (atom.lhs, atom.rhs)
        for t in terms:
            for sym in symbols_in_term(t):
                if sym in defined:
                    yield sym, positive


def _strata(definition: Definition) -> list[set[str]]:
    """Group the defined symbols into evaluation strata; reject recursion
    through negation."""
    defined = definition.defined_symbols()
    pos_edges: dict[str, set[str]] = {s: set() for s in defined}
    neg_edges: dict[str, set[str]] = {s: set() for s in defined}
    for rule in definition.rules:
        for dep, positive in _dependency_edges(rule, defined):
            (pos_edges if positive else neg_edges)[rule.head_symbol].add(dep)
    # Tarjan strongly connected components over the union graph
    graph = {s: pos_edges[s] | neg_edges[s] for s in defined}
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: dict[str, bool] = {}
    stack: list[str] = []
    sccs: list[set[str]] = []
    counter = itertools.count()

    def strongconnect(v: str):
        work = [(v, iter(sorted(graph[v])))]
        index[v] = low[v] = next(counter)
        stack.append(v)
        on_stack[v] = True
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(graph[w]))))
                    advanced = True
                    break
                if on_stack.get(w):
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(comp)

    for v in sorted(defined):
        if v not in index:
            strongconnect(v)
    for comp in sccs:
        for s in comp:
            for dep in neg_edges[s]:
                if dep in comp:
                    raise UnstratifiedDefinition(
                        f"{s} recurses through negation via {dep}")
    # Tarjan emits components in reverse topological order of dependencies,
    # i.e. callees before callers, which is exactly evaluation order
    return sccs


class _FixpointView(StructureView):
    """Structure view during the fixpoint: same-stratum symbols answer
    UNKNOWN until derived, completed strata answer closed-world."""

    def __init__(self, context: Structure, defined: set[str]):
        super().__init__(context)
        self.defined = defined
        self.current: set[str] = set()
        self.done: set[str] = set()
        self.rels: dict[str, set] = {}
        self.funcs: dict[str, dict] = {}

    def relation_holds(self, name: str, point: tuple):
        if name in self.defined:
            derived = point in self.rels.get(name, ())
            if derived:
                return True
            return UNKNOWN if name in self.current else False
        return super().relation_holds(name, point)

    def function_value(self, name: str, point: tuple):
        if name in self.defined:
            value = self.funcs.get(name, {}).get(point, UNDEF)
            if value is not UNDEF:
                return value
            return UNKNOWN if name in self.current else UNDEF
        return super().function_value(name, point)


def evaluate_definition(definition: Definition, context: Structure) -> dict[str, Interpretation]:
    """Least fixpoint of a stratified definition.

    The context must interpret every open symbol the rules read.  Returns
    one interpretation per defined symbol.
    """
    defined = definition.defined_symbols()
    voc = context.vocabulary
    preds = voc.all_predicates()
    funcs = voc.all_functions()
    for rule in definition.rules:
        for sym in symbols_in_rule(rule):
            if sym in defined or sym in BUILTIN_FUNCTIONS:
                continue
            if sym in preds or sym in funcs:
                if not context.is_enumerated(sym):
                    raise NotTwoValued(
                        f"definition reads {sym}, which {context.name} leaves open")
    view = _FixpointView(context, defined)
    for stratum in _strata(definition):
        view.current = set(stratum)
        rules = [r for r in definition.rules if r.head_symbol in stratum]
        _evaluate_stratum(rules, view, preds, funcs)
        view.current = set()
        view.done |= stratum
    out: dict[str, Interpretation] = {}
    for sym in sorted(defined):
        if sym in preds:
            out[sym] = Relation(frozenset(view.rels.get(sym, set())))
        else:
            decl = funcs[sym]
            mapping = view.funcs.get(sym, {})
            if not decl.partial:
                space = _point_space(view, decl.arg_sorts)
                for point in space:
                    if point not in mapping:
                        raise PartialityViolation(
                            f"{sym} is undefined at {point} but not declared partial")
            out[sym] = FunctionMap(tuple(mapping.items()))
    return out


def _point_space(view: StructureView, arg_sorts) -> list[tuple]:
    domains = [view.sort_values(s) for s in arg_sorts]
    if any(not d for d in domains):
        return [] if arg_sorts else [()]
    return list(itertools.product(*domains))


def _evaluate_stratum(rules: list[Rule], view: _FixpointView, preds, funcs):
    changed = True
    while changed:
        changed = False
        for rule in rules:
            decl = preds.get(rule.head_symbol) or funcs[rule.head_symbol]
            domains = [view.sort_values(qv.sort) for qv in rule.variables]
            names = [qv.name for qv in rule.variables]
            for assignment in itertools.product(*domains):
                env = dict(zip(names, assignment))
                if eval_formula(rule.body, view, env) is not True:
                    continue
                point = []
                skip = False
                for arg in rule.head_args:
                    v = eval_term(arg, view, env)
                    if v is UNKNOWN or v is UNDEF:
                        skip = True  # retried on a later pass if UNKNOWN
                        break
                    point.append(v)
                if skip:
                    continue
                point = tuple(point)
                for v, sort_name in zip(point, decl.arg_sorts):
                    if v not in view.sort_values(sort_name):
                        raise SortViolation(
                            f"rule for {rule.head_symbol} derives point {point} "
                            f"outside sort {sort_name}")
                if rule.head_value is None:
                    bucket = view.rels.setdefault(rule.head_symbol, set())
                    if point not in bucket:
                        bucket.add(point)
                        changed = True
                else:
                    value = eval_term(rule.head_value, view, env)
                    if value is UNKNOWN or value is UNDEF:
                        continue
                    if value not in view.sort_values(decl.out_sort):
                        raise SortViolation(
                            f"rule for {rule.head_symbol} derives value {value!r} "
                            f"outside sort {decl.out_sort}")
                    bucket = view.funcs.setdefault(rule.head_symbol, {})
                    existing = bucket.get(point, UNDEF)
                    if existing is UNDEF:
                        bucket[point] = value
                        changed = True
                    elif existing != value:
                        raise FunctionConflict(
                            f"{rule.head_symbol}{point} assigned both "
                            f"{existing!r} and {value!r}")
    return
