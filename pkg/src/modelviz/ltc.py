"""Linear-time theories: single-state projection and stepwise simulation.

A linear-time theory declares a time sort with a start constant and a
successor function, and defines every state symbol at the start and at the
successor step.  Simulation never interprets time itself: snapshots live
over the projected single-state vocabulary and carry a step index.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .core import (
    FunctionDecl,
    PredicateDecl,
    Relation,
    FunctionMap,
    Sort,
    Structure,
    Vocabulary,
    lift,
)
from .errors import (
    FunctionConflict,
    MultipleTimeArguments,
    NonLtcRule,
    NonLtcSentence,
    NotTwoValued,
    PartialityViolation,
    SortViolation,
)
from .evaluate import StructureView, eval_formula
from .syntax import (
    Atom,
    BinOp,
    Cmp,
    Definition,
    Formula,
    FuncApp,
    Not,
    Quant,
    QuantVar,
    Rule,
    Term,
    Theory,
    Truth,
    Var,
    symbols_in_formula,
)

START_NAME = "Start"
NEXT_NAME = "Next"
NEXT_SUFFIX = "__next"


@dataclass(frozen=True)
class SingleStateVocabulary:
    """A vocabulary with the time argument removed from every symbol."""

    vocabulary: Vocabulary
    time_sort: str
    start_symbol: str
    next_symbol: str
    time_positions: dict  # symbol -> dropped argument index, None if untimed


@dataclass(frozen=True)
class Snapshot:
    """One simulation state: a structure over the single-state vocabulary."""

    structure: Structure
    step_index: int


def detect_time_signature(voc: Vocabulary,
                          start: str = START_NAME,
                          next_: str = NEXT_NAME) -> Optional[tuple[str, str, str]]:
    funcs = voc.all_functions()
    s = funcs.get(start)
    n = funcs.get(next_)
    if (s is not None and n is not None and s.arity == 0 and n.arity == 1
            and n.arg_sorts[0] == n.out_sort == s.out_sort):
        return (s.out_sort, start, next_)
    return None


def single_state_vocab(voc: Vocabulary, time_sort: str,
                       name: Optional[str] = None,
                       start: str = START_NAME,
                       next_: str = NEXT_NAME) -> SingleStateVocabulary:
    """Project the time argument away from every symbol; the time sort and
    its start/successor machinery are dropped."""
    sorts = [s for s in voc.all_sorts().values() if s.name != time_sort]
    preds = []
    funcs = []
    positions: dict = {}
    for decl in sorted(voc.all_predicates().values(), key=lambda d: d.name):
        timed = [i for i, s in enumerate(decl.arg_sorts) if s == time_sort]
        if len(timed) > 1:
            raise MultipleTimeArguments(
                f"{decl.name} has {len(timed)} arguments of sort {time_sort}")
        if timed:
            args = tuple(s for i, s in enumerate(decl.arg_sorts) if i != timed[0])
            preds.append(PredicateDecl(decl.name, args))
            positions[decl.name] = timed[0]
        else:
            preds.append(decl)
            positions[decl.name] = None
    for decl in sorted(voc.all_functions().values(), key=lambda d: d.name):
        if decl.name in (start, next_):
            continue
        timed = [i for i, s in enumerate(decl.arg_sorts) if s == time_sort]
        if len(timed) > 1:
            raise MultipleTimeArguments(
                f"{decl.name} has {len(timed)} arguments of sort {time_sort}")
        if decl.out_sort == time_sort:
            raise MultipleTimeArguments(
                f"{decl.name} is {time_sort}-valued and cannot be projected")
        if timed:
            args = tuple(s for i, s in enumerate(decl.arg_sorts) if i != timed[0])
            funcs.append(FunctionDecl(decl.name, args, decl.out_sort, decl.partial))
            positions[decl.name] = timed[0]
        else:
            funcs.append(decl)
            positions[decl.name] = None
    projected = Vocabulary(name or f"{voc.name}_ss", sorts, preds, funcs)
    return SingleStateVocabulary(projected, time_sort, start, next_, positions)


def derive_single_state_vocabulary(voc: Vocabulary) -> Optional[SingleStateVocabulary]:
    """Auto-generate the projection when the vocabulary carries the
    conventional Start/Next time machinery."""
    sig = detect_time_signature(voc)
    if sig is None:
        return None
    time_sort, start, next_ = sig
    return single_state_vocab(voc, time_sort, start=start, next_=next_)


class LtcTheory:
    """A theory split into initial rules and transition rules."""

    def __init__(self, base: Theory):
        sig = detect_time_signature(base.vocabulary)
        if sig is None:
            raise NonLtcRule(
                f"theory {base.name} lacks the Start/Next time machinery")
        self.base = base
        self.time_sort, self.start_symbol, self.next_symbol = sig
        self.ssv = single_state_vocab(base.vocabulary, self.time_sort,
                                      start=self.start_symbol,
                                      next_=self.next_symbol)
        for sym in self.ssv.vocabulary.symbol_names():
            if sym.endswith(NEXT_SUFFIX):
                raise NonLtcRule(f"symbol name {sym} collides with the "
                                 f"reserved {NEXT_SUFFIX} suffix")

        self.static_sentences: list[Formula] = []
        for sentence in base.sentences:
            if self._mentions_time(sentence):
                raise NonLtcSentence(
                    "sentences over the time sort cannot be progressed; "
                    "only time-free sentences are allowed")
            self.static_sentences.append(sentence)

        self.initial_rules: list[Rule] = []
        self.transition_rules: list[Rule] = []
        for definition in base.definitions:
            for rule in definition.rules:
                self._classify(rule)

        defined = {r.head_symbol for r in self.initial_rules + self.transition_rules}
        self.state_symbols = tuple(sorted(defined))
        initial_heads = {r.head_symbol for r in self.initial_rules}
        transition_heads = {r.head_symbol for r in self.transition_rules}
        for sym in self.state_symbols:
            if sym not in initial_heads:
                raise NonLtcRule(f"state symbol {sym} lacks a {self.start_symbol} "
                                 f"definition")
            if sym not in transition_heads:
                raise NonLtcRule(f"state symbol {sym} lacks a "
                                 f"{self.next_symbol}({self.time_sort}) definition")
        timed = {s for s, pos in self.ssv.time_positions.items() if pos is not None}
        self.action_symbols = tuple(sorted(timed - set(self.state_symbols)))
        self.static_symbols = tuple(sorted(
            s for s, pos in self.ssv.time_positions.items() if pos is None))
        self.frame_rules = tuple(r for r in self.transition_rules
                                 if self._is_frame_rule(r))

        self.init_definition = Definition(tuple(
            self._project_initial(r) for r in self.initial_rules))
        self.step_definition = Definition(tuple(
            self._project_transition(r) for r in self.transition_rules))
        for rule in self.init_definition.rules:
            for sym in symbols_in_formula(rule.body):
                if sym in self.action_symbols:
                    raise NonLtcRule(
                        f"initial rule for {rule.head_symbol} reads action {sym}")

    # --- classification -------------------------------------------------------

    def _decl(self, name: str):
        return (self.base.vocabulary.all_predicates().get(name)
                or self.base.vocabulary.all_functions().get(name))

    def _time_pos(self, name: str) -> Optional[int]:
        return self.ssv.time_positions.get(name)

    def _mentions_time(self, f: Formula) -> bool:
        for sym in symbols_in_formula(f):
            if sym in (self.start_symbol, self.next_symbol):
                return True
            if self.ssv.time_positions.get(sym) is not None:
                return True
        return self._quantifies_time(f)

    def _quantifies_time(self, f) -> bool:
        if isinstance(f, Quant):
            if any(qv.sort == self.time_sort for qv in f.variables):
                return True
            return self._quantifies_time(f.body)
        if isinstance(f, Not):
            return self._quantifies_time(f.body)
        if isinstance(f, BinOp):
            return self._quantifies_time(f.lhs) or self._quantifies_time(f.rhs)
        return False

    def _classify(self, rule: Rule):
        pos = self._time_pos(rule.head_symbol)
        if pos is None:
            raise NonLtcRule(
                f"rule head {rule.head_symbol} has no {self.time_sort} argument")
        time_arg = rule.head_args[pos]
        if isinstance(time_arg, FuncApp) and time_arg.name == self.start_symbol:
            self.initial_rules.append(rule)
            return
        if (isinstance(time_arg, FuncApp) and time_arg.name == self.next_symbol
                and len(time_arg.args) == 1 and isinstance(time_arg.args[0], Var)):
            self.transition_rules.append(rule)
            return
        raise NonLtcRule(
            f"rule head for {rule.head_symbol} must be at {self.start_symbol} or "
            f"{self.next_symbol}(t), not {time_arg!r}")

    def _is_frame_rule(self, rule: Rule) -> bool:
        if rule.head_value is None:
            return False
        hv = rule.head_value
        if not (isinstance(hv, FuncApp) and hv.name == rule.head_symbol):
            return False
        pos = self._time_pos(rule.head_symbol)
        return all(isinstance(a, Var) for i, a in enumerate(hv.args) if i != pos)

    # --- rule projection --------------------------------------------------------

    def _project_initial(self, rule: Rule) -> Rule:
        for qv in rule.variables:
            if qv.sort == self.time_sort:
                raise NonLtcRule(
                    f"initial rule for {rule.head_symbol} quantifies over time")
        project = _Projector(self, mode="start", time_var=None)
        return project.rule(rule, rule.head_symbol)

    def _project_transition(self, rule: Rule) -> Rule:
        pos = self._time_pos(rule.head_symbol)
        time_var = rule.head_args[pos].args[0].name
        for qv in rule.variables:
            if qv.sort == self.time_sort and qv.name != time_var:
                raise NonLtcRule(
                    f"transition rule for {rule.head_symbol} uses a second "
                    f"time variable {qv.name}")
        project = _Projector(self, mode="step", time_var=time_var)
        return project.rule(rule, rule.head_symbol + NEXT_SUFFIX)


class _Projector:
    """Rewrites rules into the single-state form, validating that every
    timed occurrence uses the expected time term."""

    def __init__(self, ltc: LtcTheory, mode: str, time_var: Optional[str]):
        self.ltc = ltc
        self.mode = mode  # 'start' or 'step'
        self.time_var = time_var

    def rule(self, rule: Rule, new_head: str) -> Rule:
        pos = self.ltc._time_pos(rule.head_symbol)
        head_args = tuple(self.term(a) for i, a in enumerate(rule.head_args)
                          if i != pos)
        head_value = self.term(rule.head_value) if rule.head_value is not None else None
        body = self.formula(rule.body)
        variables = tuple(qv for qv in rule.variables
                          if qv.sort != self.ltc.time_sort)
        return Rule(new_head, head_args, head_value, body, variables, rule.pos)

    def _check_time_term(self, term: Term, owner: str):
        if self.mode == "start":
            if isinstance(term, FuncApp) and term.name == self.ltc.start_symbol:
                return
            raise NonLtcRule(
                f"{owner} must be read at {self.ltc.start_symbol} in initial rules")
        if isinstance(term, Var) and term.name == self.time_var:
            return
        raise NonLtcRule(
            f"{owner} must be read at the rule's time variable in transitions")

    def term(self, term: Term) -> Term:
        if isinstance(term, Var):
            if self.mode == "step" and term.name == self.time_var:
                raise NonLtcRule("the time variable cannot appear outside "
                                 "time argument positions")
            return term
        if isinstance(term, FuncApp):
            if term.name in (self.ltc.start_symbol, self.ltc.next_symbol):
                raise NonLtcRule(
                    f"{term.name} may only appear in a rule head's time position")
            pos = self.ltc._time_pos(term.name)
            if pos is None:
                return replace(term, args=tuple(self.term(a) for a in term.args))
            self._check_time_term(term.args[pos], term.name)
            args = tuple(self.term(a) for i, a in enumerate(term.args) if i != pos)
            return replace(term, args=args)
        if hasattr(term, "args"):  # builtins
            return replace(term, args=tuple(self.term(a) for a in term.args))
        if hasattr(term, "lhs"):  # arithmetic
            return replace(term, lhs=self.term(term.lhs), rhs=self.term(term.rhs))
        return term

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Atom):
            pos = self.ltc._time_pos(f.pred)
            if pos is None:
                return replace(f, args=tuple(self.term(a) for a in f.args))
            self._check_time_term(f.args[pos], f.pred)
            return replace(f, args=tuple(self.term(a) for i, a in enumerate(f.args)
                                         if i != pos))
        if isinstance(f, Cmp):
            return replace(f, lhs=self.term(f.lhs), rhs=self.term(f.rhs))
        if isinstance(f, Not):
            return replace(f, body=self.formula(f.body))
        if isinstance(f, BinOp):
            return replace(f, lhs=self.formula(f.lhs), rhs=self.formula(f.rhs))
        if isinstance(f, Quant):
            if any(qv.sort == self.ltc.time_sort for qv in f.variables):
                raise NonLtcRule("rules cannot quantify over the time sort")
            return replace(f, body=self.formula(f.body))
        raise TypeError(f"cannot project {f!r}")


def split_ltc(theory: Theory) -> LtcTheory:
    """Validate and split a linear-time theory."""
    return LtcTheory(theory)


def _ensure(theory_or_ltc: Union[Theory, LtcTheory]) -> LtcTheory:
    if isinstance(theory_or_ltc, LtcTheory):
        return theory_or_ltc
    return split_ltc(theory_or_ltc)


def _subvocab(ltc: LtcTheory, name: str, symbols: tuple[str, ...]) -> Vocabulary:
    ssv = ltc.ssv.vocabulary
    preds = [p for n, p in sorted(ssv.all_predicates().items()) if n in symbols]
    funcs = [f for n, f in sorted(ssv.all_functions().items()) if n in symbols]
    return Vocabulary(name, ssv.all_sorts().values(), preds, funcs)


def action_vocabulary(ltc: LtcTheory) -> Vocabulary:
    """The action sub-vocabulary of the single-state projection."""
    return _subvocab(ltc, f"{ltc.base.vocabulary.name}_actions", ltc.action_symbols)


def initialise(theory: Union[Theory, LtcTheory], s: Structure,
               nbmodels: Optional[int] = None,
               node_budget: Optional[int] = None) -> list[Snapshot]:
    """Possible initial states: models of the initial rules and the
    time-free sentences, projected to the single-state vocabulary."""
    from .solve import DEFAULT_NODE_BUDGET, modelexpand

    ltc = _ensure(theory)
    voc = _subvocab(ltc, f"{ltc.base.name}_init",
                    ltc.state_symbols + ltc.static_symbols)
    interps = {}
    for sym, interp in s.interps.items():
        if voc.symbol(sym) is not None and s.vocabulary.symbol(sym) == voc.symbol(sym):
            interps[sym] = interp
    init_struct = Structure(s.name, voc, interps)
    init_theory = Theory(f"{ltc.base.name}_init", voc,
                         tuple(ltc.static_sentences), (ltc.init_definition,))
    found = modelexpand(init_theory, init_struct, nbmodels=nbmodels,
                        node_budget=node_budget or DEFAULT_NODE_BUDGET)
    return [Snapshot(lift(m, ltc.ssv.vocabulary), 0) for m in found.models]


def _step_vocabulary(ltc: LtcTheory) -> Vocabulary:
    ssv = ltc.ssv.vocabulary
    preds = []
    funcs = []
    for name, decl in sorted(ssv.all_predicates().items()):
        preds.append(decl)
        if name in ltc.state_symbols:
            preds.append(PredicateDecl(name + NEXT_SUFFIX, decl.arg_sorts))
    for name, decl in sorted(ssv.all_functions().items()):
        funcs.append(decl)
        if name in ltc.state_symbols:
            funcs.append(FunctionDecl(name + NEXT_SUFFIX, decl.arg_sorts,
                                      decl.out_sort, decl.partial))
    return Vocabulary(f"{ltc.base.vocabulary.name}_step",
                      ssv.all_sorts().values(), preds, funcs)


def progress(theory: Union[Theory, LtcTheory], snap: Snapshot,
             nbmodels: Optional[int] = None,
             node_budget: Optional[int] = None) -> list[Snapshot]:
    """Successor snapshots of one state.

    Action symbols enumerated in the snapshot are fixed; unspecified ones
    are enumerated.  Conflicting fixed actions raise FunctionConflict.
    """
    from .solve import DEFAULT_NODE_BUDGET, modelexpand

    ltc = _ensure(theory)
    for sym in ltc.state_symbols:
        if not snap.structure.is_enumerated(sym):
            raise NotTwoValued(f"snapshot leaves state symbol {sym} open")
    step_voc = _step_vocabulary(ltc)
    interps = {sym: interp for sym, interp in snap.structure.interps.items()
               if step_voc.symbol(sym) is not None}
    step_struct = Structure(snap.structure.name, step_voc, interps)
    step_theory = Theory(f"{ltc.base.name}_step", step_voc,
                         tuple(ltc.static_sentences), (ltc.step_definition,))

    actions_fixed = all(snap.structure.is_enumerated(a) for a in ltc.action_symbols)
    results: list[Structure] = []
    if actions_fixed:
        view = StructureView(step_struct)
        for sentence in ltc.static_sentences:
            if eval_formula(sentence, view, {}) is not True:
                return []
        try:
            computed = evaluate_definition_for_step(ltc, step_struct)
        except (PartialityViolation, SortViolation):
            return []
        results.append(Structure(snap.structure.name, step_voc,
                                 {**interps, **computed}))
    else:
        found = modelexpand(step_theory, step_struct, nbmodels=nbmodels,
                            node_budget=node_budget or DEFAULT_NODE_BUDGET)
        results.extend(found.models)

    snapshots: list[Snapshot] = []
    seen = set()
    for model in results:
        nxt = {}
        for sym in ltc.state_symbols:
            nxt[sym] = model.interpretation(sym + NEXT_SUFFIX)
        for sym in ltc.static_symbols:
            interp = model.interpretation(sym)
            if interp is not None:
                nxt[sym] = interp
        for sort in ltc.ssv.vocabulary.all_sorts().values():
            interp = model.interpretation(sort.name)
            if interp is not None:
                nxt[sort.name] = interp
        structure = Structure(f"{snap.structure.name}'", ltc.ssv.vocabulary, nxt)
        key = structure.canonical_key()
        if key in seen:
            continue
        seen.add(key)
        snapshots.append(Snapshot(structure, snap.step_index + 1))
    return snapshots


def evaluate_definition_for_step(ltc: LtcTheory, step_struct: Structure) -> dict:
    from .fixpoint import evaluate_definition

    return evaluate_definition(ltc.step_definition, step_struct)


def state_at(model: Structure, ltc: LtcTheory, time_value,
             include_actions: bool = False) -> Structure:
    """Project a whole-theory model to the single-state structure at one
    time value (used to compare progression against model expansion)."""
    ssv = ltc.ssv
    keep = set(ltc.state_symbols) | set(ltc.static_symbols)
    if include_actions:
        keep |= set(ltc.action_symbols)
    interps: dict = {}
    for sort in ssv.vocabulary.all_sorts().values():
        interp = model.interpretation(sort.name)
        if interp is not None:
            interps[sort.name] = interp
    for sym in sorted(keep):
        pos = ssv.time_positions[sym]
        interp = model.interpretation(sym)
        if interp is None:
            continue
        if pos is None:
            interps[sym] = interp
        elif isinstance(interp, Relation):
            interps[sym] = Relation(frozenset(
                t[:pos] + t[pos + 1:] for t in interp.tuples if t[pos] == time_value))
        else:
            assert isinstance(interp, FunctionMap)
            interps[sym] = FunctionMap(tuple(
                (p[:pos] + p[pos + 1:], v) for p, v in interp.items()
                if p[pos] == time_value))
    sub = _subvocab(ltc, f"{ssv.vocabulary.name}_at", tuple(sorted(keep)))
    return lift(Structure(f"{model.name}@{time_value}", sub, interps),
                ssv.vocabulary)
