"""Direct evaluation of terms and formulas over structures.

This is the reference semantics: `satisfies` checks a candidate model
against a theory by evaluating every sentence and recomputing every
definition's fixpoint.  The search engine never shares this code path for
its own pruning, which keeps the two routes independent.
"""

from __future__ import annotations

from typing import Optional

from .core import FunctionMap, Relation, Structure
from .errors import ArithmeticOverflow, FunctionConflict, NotTwoValued, PartialityViolation, SortViolation
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

INT64_MAX = 2**63 - 1

UNDEF = object()    # a partial function has no value at this point
UNKNOWN = object()  # not yet derived during a fixpoint computation


class StructureView:
    """Lookup interface the evaluator works against.

    The plain adapter reads a structure; the fixpoint engine supplies its
    own view that answers UNKNOWN for underived same-stratum symbols.
    """

    def __init__(self, structure: Structure):
        self.structure = structure

    def relation_holds(self, name: str, point: tuple):
        interp = self.structure.interpretation(name)
        if interp is None:
            raise NotTwoValued(f"{name} is not enumerated in {self.structure.name}")
        assert isinstance(interp, Relation)
        return point in interp.tuples

    def function_value(self, name: str, point: tuple):
        interp = self.structure.interpretation(name)
        if interp is None:
            raise NotTwoValued(f"{name} is not enumerated in {self.structure.name}")
        assert isinstance(interp, FunctionMap)
        value = interp.get(point)
        return UNDEF if value is None else value

    def sort_values(self, name: str) -> tuple:
        # an uninterpreted sort behaves as an empty domain
        return self.structure.sort_values(name) or ()


def checked_arith(op: str, a: int, b: int) -> int:
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    else:
        r = a * b
    if abs(r) > INT64_MAX:
        raise ArithmeticOverflow(f"{a} {op} {b} exceeds the 64-bit range")
    return r


def eval_term(term, view: StructureView, env: dict):
    """Value of a ground-instantiated term; UNDEF and UNKNOWN propagate."""
    if isinstance(term, Var):
        return env[term.name]
    if isinstance(term, IntConst):
        return term.value
    if isinstance(term, (StrConst, EnumConst)):
        return term.value if isinstance(term, StrConst) else term.name
    if isinstance(term, Arith):
        a = eval_term(term.lhs, view, env)
        b = eval_term(term.rhs, view, env)
        for v in (a, b):
            if v is UNKNOWN:
                return UNKNOWN
            if v is UNDEF:
                return UNDEF
        return checked_arith(term.op, a, b)
    if isinstance(term, Builtin):
        args = [eval_term(a, view, env) for a in term.args]
        if any(a is UNKNOWN for a in args):
            return UNKNOWN
        if any(a is UNDEF for a in args):
            return UNDEF
        if term.op == "str":
            return str(args[0])
        return "".join(args)
    if isinstance(term, FuncApp):
        point = []
        for a in term.args:
            v = eval_term(a, view, env)
            if v is UNKNOWN:
                return UNKNOWN
            if v is UNDEF:
                return UNDEF
            point.append(v)
        return view.function_value(term.name, tuple(point))
    raise TypeError(f"cannot evaluate {term!r}")


def _kleene_not(v):
    if v is UNKNOWN:
        return UNKNOWN
    return not v


def _kleene_and(a, b):
    if a is False or b is False:
        return False
    if a is UNKNOWN or b is UNKNOWN:
        return UNKNOWN
    return True


def _kleene_or(a, b):
    if a is True or b is True:
        return True
    if a is UNKNOWN or b is UNKNOWN:
        return UNKNOWN
    return False


def eval_formula(f, view: StructureView, env: dict):
    """Three-valued evaluation; UNKNOWN only appears under fixpoint views.

    An atom or comparison containing an undefined partial-function value is
    false outright.
    """
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        point = []
        for a in f.args:
            v = eval_term(a, view, env)
            if v is UNKNOWN:
                return UNKNOWN
            if v is UNDEF:
                return False
            point.append(v)
        return view.relation_holds(f.pred, tuple(point))
    if isinstance(f, Cmp):
        a = eval_term(f.lhs, view, env)
        b = eval_term(f.rhs, view, env)
        if a is UNKNOWN or b is UNKNOWN:
            return UNKNOWN
        if a is UNDEF or b is UNDEF:
            return False
        return _compare(f.op, a, b)
    if isinstance(f, Not):
        return _kleene_not(eval_formula(f.body, view, env))
    if isinstance(f, BinOp):
        a = eval_formula(f.lhs, view, env)
        b = eval_formula(f.rhs, view, env)
        if f.op == "and":
            return _kleene_and(a, b)
        if f.op == "or":
            return _kleene_or(a, b)
        if f.op == "implies":
            return _kleene_or(_kleene_not(a), b)
        if f.op == "impliedby":
            return _kleene_or(a, _kleene_not(b))
        return _kleene_and(_kleene_or(_kleene_not(a), b),
                           _kleene_or(a, _kleene_not(b)))
    if isinstance(f, Quant):
        return _eval_quant(f, view, env, 0)
    raise TypeError(f"cannot evaluate {f!r}")


def _eval_quant(f: Quant, view, env, index: int):
    if index == len(f.variables):
        return eval_formula(f.body, view, env)
    qv = f.variables[index]
    domain = view.sort_values(qv.sort)
    result = True if f.kind == "forall" else False
    for value in domain:
        env[qv.name] = value
        sub = _eval_quant(f, view, env, index + 1)
        del env[qv.name]
        if f.kind == "forall":
            result = _kleene_and(result, sub)
            if result is False:
                return False
        else:
            result = _kleene_or(result, sub)
            if result is True:
                return True
    return result


def _compare(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    return a >= b


def satisfies(theory: Theory, m: Structure) -> bool:
    """True iff every sentence holds in `m` and every definition's defined
    symbols equal their computed fixpoint."""
    from .core import is_two_valued
    from .fixpoint import evaluate_definition

    if not m.vocabulary.covers(theory.vocabulary):
        raise NotTwoValued(
            f"structure {m.name} is not over {theory.vocabulary.name}")
    if not is_two_valued(m):
        raise NotTwoValued(f"{m.name} is not two-valued")
    view = StructureView(m)
    for sentence in theory.sentences:
        if eval_formula(sentence, view, {}) is not True:
            return False
    for definition in theory.definitions:
        try:
            computed = evaluate_definition(definition, m)
        except (FunctionConflict, PartialityViolation, SortViolation):
            return False
        for sym, interp in computed.items():
            mine = m.interpretation(sym)
            if mine != interp:
                return False
    return True
