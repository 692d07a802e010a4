"""Grounding: compile a theory over a finite structure into CNF.

Open relation tuples become boolean variables; open function points become
cells with one boolean per candidate value (plus one for "undefined" on
partial functions) under an exactly-one/at-most-one group.  Sentences are
expanded over the domains and translated exactly.  Definitions contribute
their completion, which over-approximates the fixpoint semantics; the
search layer re-checks candidates with the exact fixpoint evaluator.
"""

from __future__ import annotations

import itertools
from typing import Optional

from .core import FunctionMap, Relation, Structure, Value
from .errors import ArithmeticOverflow, EmptySortDomain, NotTwoValued
from .evaluate import UNDEF, checked_arith
from .syntax import (
    Arith,
    Atom,
    BinOp,
    Builtin,
    Cmp,
    EnumConst,
    FuncApp,
    IntConst,
    Not,
    Quant,
    StrConst,
    Theory,
    Truth,
    Var,
)

TRUE_NODE = ("T",)
FALSE_NODE = ("F",)


def nd_lit(lit: int):
    return ("lit", lit)


def nd_not(node):
    if node == TRUE_NODE:
        return FALSE_NODE
    if node == FALSE_NODE:
        return TRUE_NODE
    if node[0] == "not":
        return node[1]
    if node[0] == "lit":
        return ("lit", -node[1])
    return ("not", node)


def nd_and(children) -> tuple:
    flat = []
    for c in children:
        if c == FALSE_NODE:
            return FALSE_NODE
        if c == TRUE_NODE:
            continue
        if c[0] == "and":
            flat.extend(c[1])
        else:
            flat.append(c)
    if not flat:
        return TRUE_NODE
    if len(flat) == 1:
        return flat[0]
    return ("and", tuple(flat))


def nd_or(children) -> tuple:
    flat = []
    for c in children:
        if c == TRUE_NODE:
            return TRUE_NODE
        if c == FALSE_NODE:
            continue
        if c[0] == "or":
            flat.extend(c[1])
        else:
            flat.append(c)
    if not flat:
        return FALSE_NODE
    if len(flat) == 1:
        return flat[0]
    return ("or", tuple(flat))


class Cell:
    """Choice of a value for one open function point."""

    __slots__ = ("values", "partial", "vars")

    def __init__(self, values: tuple, partial: bool):
        self.values = values
        self.partial = partial
        self.vars: dict = {}  # value (or UNDEF) -> boolean variable


class Grounding:
    """Variable tables, clauses, and decode info for one solve call."""

    def __init__(self):
        self.nvars = 0
        self.clauses: list[tuple[int, ...]] = []
        self.rel_vars: dict[tuple[str, tuple], int] = {}
        self.cells: dict[tuple[str, tuple], Cell] = {}
        self.var_cell: dict[int, tuple] = {}  # cell value var -> cell key
        self.decision_vars: list[int] = []
        self.prefer_true: set[int] = set()
        self._tseitin: dict = {}
        self.unsat = False

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits) -> None:
        clause = tuple(lits)
        if not clause:
            self.unsat = True
        self.clauses.append(clause)

    # --- Tseitin translation ------------------------------------------------

    def to_literal(self, node) -> Optional[int]:
        """Literal equisatisfiable with the node; None for constants."""
        if node == TRUE_NODE or node == FALSE_NODE:
            return None
        if node[0] == "lit":
            return node[1]
        if node[0] == "not":
            sub = self.to_literal(node[1])
            return -sub if sub is not None else None
        cached = self._tseitin.get(node)
        if cached is not None:
            return cached
        kids = [self.to_literal(k) for k in node[1]]
        fresh = self.new_var()
        if node[0] == "and":
            for k in kids:
                self.add_clause((-fresh, k))
            self.add_clause(tuple([fresh] + [-k for k in kids]))
        else:
            for k in kids:
                self.add_clause((-k, fresh))
            self.add_clause(tuple([-fresh] + list(kids)))
        self._tseitin[node] = fresh
        return fresh

    def assert_true(self, node) -> None:
        if node == TRUE_NODE:
            return
        if node == FALSE_NODE:
            self.unsat = True
            return
        if node[0] == "and":
            for k in node[1]:
                self.assert_true(k)
            return
        if node[0] == "or":
            kids = [self.to_literal(k) for k in node[1]]
            self.add_clause(kids)
            return
        lit = self.to_literal(node)
        self.add_clause((lit,))

    def assert_equiv(self, lit: int, node) -> None:
        if node == TRUE_NODE:
            self.add_clause((lit,))
            return
        if node == FALSE_NODE:
            self.add_clause((-lit,))
            return
        other = self.to_literal(node)
        self.add_clause((-lit, other))
        self.add_clause((-other, lit))


class Grounder:
    def __init__(self, theory: Theory, structure: Structure):
        self.theory = theory
        self.struct = structure
        self.voc = structure.vocabulary
        self.g = Grounding()
        self.defined: set[str] = theory.defined_symbols()
        self.preds = self.voc.all_predicates()
        self.funcs = self.voc.all_functions()

        self._build_variables()
        for sentence in theory.sentences:
            self.g.assert_true(self._formula(sentence, {}))
        for definition in theory.definitions:
            self._ground_definition(definition)

    # --- variable construction ----------------------------------------------

    def _domain(self, sort_name: str) -> tuple[Value, ...]:
        return self.struct.sort_values(sort_name) or ()

    def _points(self, arg_sorts) -> list[tuple]:
        domains = [self._domain(s) for s in arg_sorts]
        if any(not d for d in domains):
            return [] if arg_sorts else [()]
        return list(itertools.product(*domains))

    def _build_variables(self):
        open_syms = []
        defined_syms = []
        for name in sorted(set(self.preds) | set(self.funcs)):
            if self.struct.is_enumerated(name):
                continue
            (defined_syms if name in self.defined else open_syms).append(name)
        for name in open_syms + defined_syms:
            if name in self.preds:
                decl = self.preds[name]
                for point in self._points(decl.arg_sorts):
                    var = self.g.new_var()
                    self.g.rel_vars[(name, point)] = var
                    self.g.decision_vars.append(var)
            else:
                decl = self.funcs[name]
                values = self._domain(decl.out_sort)
                points = self._points(decl.arg_sorts)
                if not decl.partial and points and not values:
                    raise EmptySortDomain(
                        f"function {name} needs a value from empty sort {decl.out_sort}")
                for point in points:
                    cell = Cell(values, decl.partial)
                    group = []
                    if decl.partial:
                        var = self.g.new_var()
                        cell.vars[UNDEF] = var
                        group.append(var)
                    for v in values:
                        var = self.g.new_var()
                        cell.vars[v] = var
                        group.append(var)
                    for var in group:
                        self.g.var_cell[var] = (name, point)
                    self.g.cells[(name, point)] = cell
                    self.g.decision_vars.extend(group)
                    self.g.prefer_true.update(group)
                    self.g.add_clause(tuple(group))  # at least one
                    self._at_most_one(group)

    def _at_most_one(self, group: list[int]):
        if len(group) <= 6:
            for a, b in itertools.combinations(group, 2):
                self.g.add_clause((-a, -b))
            return
        # sequential prefix encoding; the auxiliaries are bi-implied so unit
        # propagation always pins them, keeping enumeration duplicate-free
        prev = None
        for i, x in enumerate(group):
            if i == 0:
                prev = self.g.new_var()
                self.g.add_clause((-x, prev))
                self.g.add_clause((-prev, x))
                continue
            self.g.add_clause((-x, -prev))
            if i == len(group) - 1:
                break
            s = self.g.new_var()
            self.g.add_clause((-x, s))
            self.g.add_clause((-prev, s))
            self.g.add_clause((-s, x, prev))
            prev = s

    # --- term resolution -----------------------------------------------------

    def _combine(self, a: tuple, b: tuple):
        """Merge condition tuples; None when they pin a cell to two values."""
        if not b:
            return a
        if not a:
            b_cells = [self.g.var_cell[lit] for lit in b]
            return b if len(set(b_cells)) == len(b) else None
        cells = {self.g.var_cell[lit]: lit for lit in a}
        merged = list(a)
        for lit in b:
            key = self.g.var_cell[lit]
            prev = cells.get(key)
            if prev is None:
                cells[key] = lit
                merged.append(lit)
            elif prev != lit:
                return None
        return tuple(merged)

    def _combo_args(self, args, env) -> list[tuple[tuple[int, ...], list]]:
        combos: list[tuple[tuple[int, ...], list]] = [((), [])]
        for arg in args:
            alts = self._resolve(arg, env)
            fresh = []
            for conds, vals in combos:
                for ca, va in alts:
                    merged = self._combine(conds, ca)
                    if merged is not None:
                        fresh.append((merged, vals + [va]))
            combos = fresh
        return combos

    def _resolve(self, term, env) -> list[tuple[tuple[int, ...], object]]:
        """All (condition literals, value) alternatives of a term; the value
        may be UNDEF for gaps of partial functions."""
        if isinstance(term, Var):
            return [((), env[term.name])]
        if isinstance(term, IntConst):
            return [((), term.value)]
        if isinstance(term, StrConst):
            return [((), term.value)]
        if isinstance(term, EnumConst):
            return [((), term.name)]
        if isinstance(term, Arith):
            out = []
            for cl, vl in self._resolve(term.lhs, env):
                for cr, vr in self._resolve(term.rhs, env):
                    conds = self._combine(cl, cr)
                    if conds is None:
                        continue
                    if vl is UNDEF or vr is UNDEF:
                        out.append((conds, UNDEF))
                    else:
                        out.append((conds, checked_arith(term.op, vl, vr)))
            return out
        if isinstance(term, Builtin):
            out = []
            for conds, vals in self._combo_args(term.args, env):
                if any(v is UNDEF for v in vals):
                    out.append((conds, UNDEF))
                elif term.op == "str":
                    out.append((conds, str(vals[0])))
                else:
                    out.append((conds, "".join(vals)))
            return out
        if isinstance(term, FuncApp):
            out = []
            for conds, vals in self._combo_args(term.args, env):
                if any(v is UNDEF for v in vals):
                    out.append((conds, UNDEF))
                    continue
                point = tuple(vals)
                interp = self.struct.interpretation(term.name)
                if interp is not None:
                    assert isinstance(interp, FunctionMap)
                    v = interp.get(point)
                    out.append((conds, UNDEF if v is None else v))
                    continue
                cell = self.g.cells.get((term.name, point))
                if cell is None:
                    # the point lies outside the function's domain
                    out.append((conds, UNDEF))
                    continue
                for v, var in cell.vars.items():
                    merged = self._combine(conds, (var,))
                    if merged is not None:
                        out.append((merged, UNDEF if v is UNDEF else v))
            return out
        raise TypeError(f"cannot ground {term!r}")

    # --- formula grounding -----------------------------------------------------

    def _formula(self, f, env) -> tuple:
        if isinstance(f, Truth):
            return TRUE_NODE if f.value else FALSE_NODE
        if isinstance(f, Atom):
            return self._atom(f, env)
        if isinstance(f, Cmp):
            return self._cmp(f, env)
        if isinstance(f, Not):
            return nd_not(self._formula(f.body, env))
        if isinstance(f, BinOp):
            a = self._formula(f.lhs, env)
            b = self._formula(f.rhs, env)
            if f.op == "and":
                return nd_and([a, b])
            if f.op == "or":
                return nd_or([a, b])
            if f.op == "implies":
                return nd_or([nd_not(a), b])
            if f.op == "impliedby":
                return nd_or([a, nd_not(b)])
            return nd_and([nd_or([nd_not(a), b]), nd_or([a, nd_not(b)])])
        if isinstance(f, Quant):
            return self._quant(f, env, 0)
        raise TypeError(f"cannot ground {f!r}")

    def _quant(self, f: Quant, env, index: int) -> tuple:
        if index == len(f.variables):
            return self._formula(f.body, env)
        qv = f.variables[index]
        parts = []
        for value in self._domain(qv.sort):
            env[qv.name] = value
            parts.append(self._quant(f, env, index + 1))
            del env[qv.name]
        return nd_and(parts) if f.kind == "forall" else nd_or(parts)

    def _conds_node(self, conds: tuple[int, ...]) -> tuple:
        return nd_and([nd_lit(c) for c in conds])

    def _atom(self, f: Atom, env) -> tuple:
        branches = []
        interp = self.struct.interpretation(f.pred)
        for conds, vals in self._combo_args(f.args, env):
            if any(v is UNDEF for v in vals):
                continue  # an undefined argument falsifies the atom
            point = tuple(vals)
            if interp is not None:
                assert isinstance(interp, Relation)
                if point in interp.tuples:
                    branches.append(self._conds_node(conds))
                continue
            var = self.g.rel_vars.get((f.pred, point))
            if var is None:
                continue  # outside the declared argument space
            branches.append(nd_and([self._conds_node(conds), nd_lit(var)]))
        return nd_or(branches)

    def _cmp(self, f: Cmp, env) -> tuple:
        from .evaluate import _compare
        branches = []
        for cl, vl in self._resolve(f.lhs, env):
            for cr, vr in self._resolve(f.rhs, env):
                if vl is UNDEF or vr is UNDEF:
                    continue
                conds = self._combine(cl, cr)
                if conds is not None and _compare(f.op, vl, vr):
                    branches.append(self._conds_node(conds))
        return nd_or(branches)

    # --- definitions: completion ------------------------------------------------

    def _ground_definition(self, definition):
        rel_contribs: dict[tuple[str, tuple], list] = {}
        fn_contribs: dict[tuple[str, tuple, Value], list] = {}
        for rule in definition.rules:
            self._ground_rule(rule, rel_contribs, fn_contribs)
        for sym in sorted(definition.defined_symbols()):
            if sym in self.preds:
                decl = self.preds[sym]
                interp = self.struct.interpretation(sym)
                for point in self._points(decl.arg_sorts):
                    derivable = nd_or(rel_contribs.get((sym, point), []))
                    if interp is not None:
                        assert isinstance(interp, Relation)
                        if point in interp.tuples:
                            self.g.assert_true(derivable)
                        else:
                            self.g.assert_true(nd_not(derivable))
                    else:
                        var = self.g.rel_vars[(sym, point)]
                        self.g.assert_equiv(var, derivable)
            else:
                decl = self.funcs[sym]
                interp = self.struct.interpretation(sym)
                values = self._domain(decl.out_sort)
                for point in self._points(decl.arg_sorts):
                    for v in values:
                        derivable = nd_or(fn_contribs.get((sym, point, v), []))
                        if interp is not None:
                            assert isinstance(interp, FunctionMap)
                            if interp.get(point) == v:
                                self.g.assert_true(derivable)
                            else:
                                self.g.assert_true(nd_not(derivable))
                        else:
                            cell = self.g.cells[(sym, point)]
                            self.g.assert_equiv(cell.vars[v], derivable)

    def _ground_rule(self, rule, rel_contribs, fn_contribs):
        decl = (self.preds.get(rule.head_symbol)
                or self.funcs[rule.head_symbol])
        arg_domains = [self._domain(s) for s in decl.arg_sorts]
        var_domains = [self._domain(qv.sort) for qv in rule.variables]
        names = [qv.name for qv in rule.variables]
        for assignment in itertools.product(*var_domains):
            env = dict(zip(names, assignment))
            body = self._formula(rule.body, env)
            if body == FALSE_NODE:
                continue
            for conds, vals in self._combo_args(rule.head_args, env):
                if any(v is UNDEF for v in vals):
                    continue  # no head point, the rule cannot fire here
                point = tuple(vals)
                fire_guard = nd_and([self._conds_node(conds), body])
                if fire_guard == FALSE_NODE:
                    continue
                in_domain = all(v in dom for v, dom in zip(point, arg_domains))
                if rule.head_value is None:
                    if not in_domain:
                        self.g.assert_true(nd_not(fire_guard))
                        continue
                    rel_contribs.setdefault((rule.head_symbol, point), []).append(fire_guard)
                else:
                    out_domain = self._domain(decl.out_sort)
                    for vconds, value in self._resolve(rule.head_value, env):
                        if value is UNDEF:
                            continue
                        merged = self._combine(conds, vconds)
                        if merged is None:
                            continue
                        node = nd_and([self._conds_node(merged), body])
                        if node == FALSE_NODE:
                            continue
                        if not in_domain or value not in out_domain:
                            # firing would leave the sorted universe: forbidden
                            self.g.assert_true(nd_not(node))
                            continue
                        fn_contribs.setdefault(
                            (rule.head_symbol, point, value), []).append(node)


def ground(theory: Theory, structure: Structure) -> Grounding:
    if not structure.vocabulary.covers(theory.vocabulary):
        raise NotTwoValued(
            f"structure {structure.name} does not cover vocabulary "
            f"{theory.vocabulary.name}")
    return Grounder(theory, structure).g
