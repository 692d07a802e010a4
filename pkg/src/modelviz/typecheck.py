"""Name resolution and type derivation for formulas and rules.

Each variable must end up with exactly one sort.  Sorts are pinned by
declared argument positions; arithmetic and literals only constrain the
base (integer or string), and there is no coercion between distinct sorts.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .core import CONSTRUCTED, INT, STRING, FunctionDecl, Vocabulary
from .errors import SortMismatch, UnknownSymbol
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
    Pos,
    Quant,
    QuantVar,
    Rule,
    StrConst,
    Truth,
    Var,
)

BUILTIN_FUNCTIONS = {"concat", "str"}

_INT_CMP = {"<", ">", "<=", ">="}


class _VarInfo:
    __slots__ = ("sort", "bases", "pos")

    def __init__(self, pos: Optional[Pos]):
        self.sort: Optional[str] = None
        self.bases: set[str] = set()
        self.pos = pos


class _Checker:
    def __init__(self, voc: Vocabulary, allow_implicit: bool):
        self.voc = voc
        self.sorts = voc.all_sorts()
        self.preds = voc.all_predicates()
        self.funcs = voc.all_functions()
        self.allow_implicit = allow_implicit
        self.rule_vars: dict[str, _VarInfo] = {}
        self.scopes: list[dict[str, _VarInfo]] = []

    # --- variable bookkeeping ----------------------------------------------

    def _find_var(self, name: str) -> Optional[_VarInfo]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.rule_vars.get(name)

    def _where(self, pos: Optional[Pos]) -> tuple[int, int]:
        return (pos.line, pos.column) if pos else (0, 0)

    def _bind(self, name: str, info: _VarInfo, expected, pos: Optional[Pos]):
        line, col = self._where(pos or info.pos)
        if expected is None:
            return
        kind, detail = expected
        if kind == "sort":
            if info.sort is None:
                sort = self.sorts[detail]
                for base in info.bases:
                    if sort.base != base:
                        raise SortMismatch(
                            f"variable {name} needs a {base} sort but got {detail}",
                            line, col)
                info.sort = detail
            elif info.sort != detail:
                raise SortMismatch(
                    f"variable {name} used both as {info.sort} and as {detail}",
                    line, col)
        else:  # base constraint
            if info.sort is not None:
                if self.sorts[info.sort].base != detail:
                    raise SortMismatch(
                        f"variable {name} of sort {info.sort} used as {detail}",
                        line, col)
            else:
                info.bases.add(detail)
                if len({b for b in info.bases}) > 1:
                    raise SortMismatch(
                        f"variable {name} used as both int and string", line, col)

    def _var_type(self, info: _VarInfo):
        if info.sort is not None:
            return ("sort", info.sort)
        if info.bases:
            return ("base", next(iter(info.bases)))
        return None

    # --- terms ---------------------------------------------------------------

    def check_term(self, term, expected):
        """Rewrite a raw term, returning (resolved_term, type).

        `expected` and the returned type are None, ("sort", name) or
        ("base", int|string).
        """
        line, col = self._where(getattr(term, "pos", None))
        if isinstance(term, IntConst):
            self._require_base(expected, INT, "an integer", line, col)
            return term, ("base", INT)
        if isinstance(term, StrConst):
            self._require_base(expected, STRING, "a string", line, col)
            return term, ("base", STRING)
        if isinstance(term, EnumConst):
            owners = self._constructor_owners(term.name, expected)
            if not owners:
                raise SortMismatch(f"constructor {term.name} fits no sort here",
                                   line, col)
            self._check_result_sort(owners[0], expected, term.name, line, col)
            return term, ("sort", owners[0])
        if isinstance(term, Arith):
            lhs, _ = self.check_term(term.lhs, ("base", INT))
            rhs, _ = self.check_term(term.rhs, ("base", INT))
            self._require_base(expected, INT, "an arithmetic term", line, col)
            return replace(term, lhs=lhs, rhs=rhs), ("base", INT)
        if isinstance(term, FuncApp):
            return self._check_application(term, expected, line, col)
        if isinstance(term, Var):
            info = self._find_var(term.name)
            if info is not None:
                self._bind(term.name, info, expected, term.pos)
                return term, self._var_type(info)
            return term, expected
        if isinstance(term, Builtin):
            return term, ("base", STRING)
        raise SortMismatch(f"unexpected term {term!r}", line, col)

    def _require_base(self, expected, base: str, what: str, line: int, col: int):
        if expected is None:
            return
        kind, detail = expected
        if kind == "sort":
            if self.sorts[detail].base != base:
                raise SortMismatch(f"{what} cannot belong to sort {detail}", line, col)
        elif detail != base:
            raise SortMismatch(f"{what} used where a {detail} is needed", line, col)

    def _check_application(self, term: FuncApp, expected, line: int, col: int):
        name = term.name
        info = self._find_var(name)
        if info is not None:
            if term.args:
                raise SortMismatch(f"variable {name} cannot take arguments", line, col)
            self._bind(name, info, expected, term.pos)
            return Var(name, term.pos), self._var_type(info)
        if name in self.funcs:
            decl = self.funcs[name]
            if len(term.args) != decl.arity:
                raise SortMismatch(
                    f"{name} expects {decl.arity} arguments, got {len(term.args)}",
                    line, col)
            args = tuple(self.check_term(a, ("sort", s))[0]
                         for a, s in zip(term.args, decl.arg_sorts))
            self._check_result_sort(decl.out_sort, expected, name, line, col)
            return replace(term, args=args), ("sort", decl.out_sort)
        if name in BUILTIN_FUNCTIONS:
            return self._check_builtin(term, expected, line, col)
        owners = self._constructor_owners(name, expected)
        if len(owners) > 1:
            raise SortMismatch(f"constructor {name} is ambiguous between sorts "
                               f"{', '.join(owners)}; the context must pin one",
                               line, col)
        if owners:
            if term.args:
                raise SortMismatch(f"constructor {name} takes no arguments", line, col)
            self._check_result_sort(owners[0], expected, name, line, col)
            return EnumConst(name, term.pos), ("sort", owners[0])
        if name in self.preds:
            raise SortMismatch(f"predicate {name} used as a term", line, col)
        if name in self.sorts:
            raise SortMismatch(f"sort {name} used as a term", line, col)
        if self.allow_implicit and not term.args:
            info = _VarInfo(term.pos)
            self.rule_vars[name] = info
            self._bind(name, info, expected, term.pos)
            return Var(name, term.pos), self._var_type(info)
        raise UnknownSymbol(f"unknown symbol {name}", line, col)

    def _check_result_sort(self, sort: str, expected, name: str, line: int, col: int):
        if expected is None:
            return
        kind, detail = expected
        if kind == "sort" and detail != sort:
            raise SortMismatch(f"{name} has sort {sort}, expected {detail}", line, col)
        if kind == "base" and self.sorts[sort].base != detail:
            raise SortMismatch(f"{name} has sort {sort}, expected a {detail} value",
                               line, col)

    def _check_builtin(self, term: FuncApp, expected, line: int, col: int):
        if term.name == "str":
            if len(term.args) != 1:
                raise SortMismatch("str takes one integer argument", line, col)
            args = (self.check_term(term.args[0], ("base", INT))[0],)
        else:  # concat
            if len(term.args) < 2:
                raise SortMismatch("concat takes at least two arguments", line, col)
            args = tuple(self.check_term(a, ("base", STRING))[0] for a in term.args)
        self._require_base(expected, STRING, term.name, line, col)
        return Builtin(term.name, args, term.pos), ("base", STRING)

    def _constructor_owners(self, name: str, expected) -> list[str]:
        if expected is not None and expected[0] == "sort":
            sort = self.sorts[expected[1]]
            if sort.base == CONSTRUCTED and name in sort.constructors:
                return [sort.name]
        return sorted(s.name for s in self.sorts.values()
                      if s.base == CONSTRUCTED and name in s.constructors)

    # --- formulas -----------------------------------------------------------

    def check_formula(self, f):
        line, col = self._where(getattr(f, "pos", None))
        if isinstance(f, Truth):
            return f
        if isinstance(f, Atom):
            if f.pred in self.preds:
                decl = self.preds[f.pred]
                if len(f.args) != decl.arity:
                    raise SortMismatch(
                        f"{f.pred} expects {decl.arity} arguments, got {len(f.args)}",
                        line, col)
                args = tuple(self.check_term(a, ("sort", s))[0]
                             for a, s in zip(f.args, decl.arg_sorts))
                return replace(f, args=args)
            if f.pred in self.funcs or self._find_var(f.pred) is not None:
                raise SortMismatch(f"{f.pred} is not a predicate", line, col)
            raise UnknownSymbol(f"unknown symbol {f.pred}", line, col)
        if isinstance(f, Cmp):
            return self._check_cmp(f, line, col)
        if isinstance(f, Not):
            return replace(f, body=self.check_formula(f.body))
        if isinstance(f, BinOp):
            return replace(f, lhs=self.check_formula(f.lhs),
                           rhs=self.check_formula(f.rhs))
        if isinstance(f, Quant):
            return self._check_quant(f, line, col)
        raise SortMismatch(f"unexpected formula {f!r}", line, col)

    def _check_cmp(self, f: Cmp, line: int, col: int):
        if f.op in _INT_CMP:
            lhs, _ = self.check_term(f.lhs, ("base", INT))
            rhs, _ = self.check_term(f.rhs, ("base", INT))
            return replace(f, lhs=lhs, rhs=rhs)
        lhs, t1 = self.check_term(f.lhs, None)
        expected = t1 if t1 is not None else None
        rhs, t2 = self.check_term(f.rhs, expected)
        if t1 is None and t2 is not None:
            # first side was an unconstrained variable; revisit it
            lhs, t1 = self.check_term(lhs, t2)
        if t1 is not None and t2 is not None:
            b1 = t1[1] if t1[0] == "base" else self.sorts[t1[1]].base
            b2 = t2[1] if t2[0] == "base" else self.sorts[t2[1]].base
            if (b1 == CONSTRUCTED or b2 == CONSTRUCTED) and t1 != t2:
                raise SortMismatch("equality between different sorts", line, col)
            if b1 != b2:
                raise SortMismatch(f"cannot compare {b1} with {b2}", line, col)
        return replace(f, lhs=lhs, rhs=rhs)

    def _check_quant(self, f: Quant, line: int, col: int):
        scope: dict[str, _VarInfo] = {}
        for qv in f.variables:
            info = _VarInfo(f.pos)
            if qv.sort is not None:
                if qv.sort not in self.sorts:
                    raise UnknownSymbol(f"unknown sort {qv.sort}", line, col)
                info.sort = qv.sort
            scope[qv.name] = info
        self.scopes.append(scope)
        body = self.check_formula(f.body)
        self.scopes.pop()
        annotated = []
        for qv in f.variables:
            info = scope[qv.name]
            if info.sort is None:
                raise SortMismatch(
                    f"cannot derive a sort for variable {qv.name}; annotate it "
                    f"as {qv.name} [SomeSort]", line, col)
            annotated.append(QuantVar(qv.name, info.sort))
        return replace(f, variables=tuple(annotated), body=body)


def check_sentence(raw, voc: Vocabulary):
    """Resolve and type-check a sentence; free names are errors."""
    return _Checker(voc, allow_implicit=False).check_formula(raw)


def check_rule(raw: Rule, voc: Vocabulary) -> Rule:
    """Resolve and type-check a rule; free names become universally
    quantified variables whose sorts are derived from use."""
    checker = _Checker(voc, allow_implicit=True)
    line, col = checker._where(raw.pos)
    funcs = voc.all_functions()
    preds = voc.all_predicates()
    name = raw.head_symbol
    if raw.head_value is not None:
        if name not in funcs:
            if name in preds:
                raise SortMismatch(f"predicate {name} cannot have a rule value",
                                   line, col)
            raise UnknownSymbol(f"unknown symbol {name}", line, col)
        decl = funcs[name]
        if len(raw.head_args) != decl.arity:
            raise SortMismatch(
                f"{name} expects {decl.arity} arguments, got {len(raw.head_args)}",
                line, col)
        head_args = tuple(checker.check_term(a, ("sort", s))[0]
                          for a, s in zip(raw.head_args, decl.arg_sorts))
        head_value = checker.check_term(raw.head_value, ("sort", decl.out_sort))[0]
    else:
        if name not in preds:
            if name in funcs:
                raise SortMismatch(f"function rule for {name} needs '= value'",
                                   line, col)
            raise UnknownSymbol(f"unknown symbol {name}", line, col)
        decl = preds[name]
        if len(raw.head_args) != decl.arity:
            raise SortMismatch(
                f"{name} expects {decl.arity} arguments, got {len(raw.head_args)}",
                line, col)
        head_args = tuple(checker.check_term(a, ("sort", s))[0]
                          for a, s in zip(raw.head_args, decl.arg_sorts))
        head_value = None
    body = checker.check_formula(raw.body)
    variables = []
    for vname in sorted(checker.rule_vars):
        info = checker.rule_vars[vname]
        if info.sort is None:
            vline, vcol = checker._where(info.pos)
            raise SortMismatch(f"cannot derive a sort for variable {vname}",
                               vline, vcol)
        variables.append(QuantVar(vname, info.sort))
    return replace(raw, head_args=head_args, head_value=head_value, body=body,
                   variables=tuple(variables))
