"""Model expansion: extend a partial structure to the two-valued models of
a theory.

Candidates come from the propositional search over the grounding; each one
is verified against the exact fixpoint semantics of the definitions before
it is returned, so unfounded completion models never leak out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import FunctionMap, Relation, Structure
from .errors import FunctionConflict, PartialityViolation, SearchBudgetExceeded, SortViolation
from .evaluate import UNDEF
from .fixpoint import evaluate_definition
from .ground import ground
from .search import Enumerator
from .syntax import Theory

DEFAULT_NODE_BUDGET = 10_000_000


@dataclass
class ModelSet:
    models: list[Structure] = field(default_factory=list)
    exhausted: bool = True

    def __iter__(self):
        return iter(self.models)

    def __len__(self):
        return len(self.models)


def iterate_models(theory: Theory, structure: Structure,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> Iterator[Structure]:
    """Lazily enumerate models in canonical order."""
    grounding = ground(theory, structure)
    if grounding.unsat:
        return
    enumerator = Enumerator(grounding, node_budget)
    preds = structure.vocabulary.all_predicates()
    funcs = structure.vocabulary.all_functions()
    for assignment in enumerator.enumerate():
        interps = dict(structure.interps)
        for name in sorted(set(preds) | set(funcs)):
            if structure.is_enumerated(name):
                continue
            if name in preds:
                tuples = frozenset(
                    point for (sym, point), var in grounding.rel_vars.items()
                    if sym == name and assignment[var])
                interps[name] = Relation(tuples)
            else:
                mapping = []
                for (sym, point), cell in grounding.cells.items():
                    if sym != name:
                        continue
                    for value, var in cell.vars.items():
                        if assignment[var] and value is not UNDEF:
                            mapping.append((point, value))
                interps[name] = FunctionMap(tuple(mapping))
        candidate = Structure(structure.name, structure.vocabulary, interps)
        if _definitions_hold(theory, candidate):
            yield candidate


def _definitions_hold(theory: Theory, candidate: Structure) -> bool:
    """Exact check: the candidate's defined symbols equal each definition's
    fixpoint.  Rejects unfounded models admitted by the completion."""
    for definition in theory.definitions:
        try:
            computed = evaluate_definition(definition, candidate)
        except (FunctionConflict, PartialityViolation, SortViolation):
            return False
        for sym, interp in computed.items():
            if candidate.interpretation(sym) != interp:
                return False
    return True


def modelexpand(theory: Theory, structure: Structure,
                nbmodels: Optional[int] = None,
                node_budget: int = DEFAULT_NODE_BUDGET) -> ModelSet:
    """Up to `nbmodels` models extending `structure` (all of them if None),
    in canonical order: open symbols sorted by name, then value order."""
    result = ModelSet()
    iterator = iterate_models(theory, structure, node_budget)
    try:
        for model in iterator:
            result.models.append(model.with_name(f"M{len(result.models) + 1}"))
            if nbmodels is not None and len(result.models) >= nbmodels:
                result.exhausted = False
                break
    except SearchBudgetExceeded as exc:
        raise SearchBudgetExceeded(str(exc),
                                   partial=ModelSet(result.models, False)) from None
    return result


def onemodel(theory: Theory, structure: Structure,
             node_budget: int = DEFAULT_NODE_BUDGET) -> Optional[Structure]:
    """First model in canonical order, or None when unsatisfiable."""
    found = modelexpand(theory, structure, nbmodels=1, node_budget=node_budget)
    return found.models[0] if found.models else None
