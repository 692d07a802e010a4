import itertools
from pathlib import Path

import pytest

from modelviz.core import FunctionMap, Relation, Structure
from modelviz.evaluate import satisfies
from modelviz.parser import parse_program

DEMO_DIR = Path(__file__).resolve().parents[1] / "src" / "modelviz" / "demo"


def demo_text(name: str) -> str:
    return (DEMO_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def listing1():
    return parse_program(demo_text("listing1.fodot"))


@pytest.fixture(scope="session")
def chessboard():
    return parse_program(demo_text("chessboard.fodot"))


@pytest.fixture(scope="session")
def counter():
    return parse_program(demo_text("counter.fodot"))


@pytest.fixture(scope="session")
def listing6():
    return parse_program(demo_text("listing6.fodot"))


def all_interpretations(structure, name):
    """Every possible interpretation of one unspecified symbol."""
    voc = structure.vocabulary
    preds = voc.all_predicates()
    funcs = voc.all_functions()
    if name in preds:
        points = structure.point_space(preds[name].arg_sorts) or []
        out = []
        for k in range(len(points) + 1):
            for chosen in itertools.combinations(points, k):
                out.append(Relation(frozenset(chosen)))
        return out
    decl = funcs[name]
    points = structure.point_space(decl.arg_sorts) or []
    values = structure.sort_values(decl.out_sort) or ()
    choices = list(values) + ([None] if decl.partial else [])
    out = []
    for combo in itertools.product(choices, repeat=len(points)):
        mapping = tuple((p, v) for p, v in zip(points, combo) if v is not None)
        out.append(FunctionMap(mapping))
    return out


def candidate_space(structure) -> int:
    """Number of two-valued extensions of a partial structure."""
    voc = structure.vocabulary
    total = 1
    for name, decl in voc.all_predicates().items():
        if structure.is_enumerated(name):
            continue
        points = structure.point_space(decl.arg_sorts) or []
        total *= 2 ** len(points)
    for name, decl in voc.all_functions().items():
        if structure.is_enumerated(name):
            continue
        points = structure.point_space(decl.arg_sorts) or []
        values = structure.sort_values(decl.out_sort) or ()
        total *= (len(values) + (1 if decl.partial else 0)) ** len(points)
    return total


def brute_force_models(theory, structure):
    """Independent oracle: instantiate every free symbol in every possible
    way and keep the structures that satisfy the theory."""
    voc = structure.vocabulary
    names = sorted(set(voc.all_predicates()) | set(voc.all_functions()))
    free = [n for n in names if not structure.is_enumerated(n)]
    spaces = [all_interpretations(structure, n) for n in free]
    models = []
    for combo in itertools.product(*spaces):
        interps = dict(structure.interps)
        interps.update(dict(zip(free, combo)))
        candidate = Structure(structure.name, voc, interps)
        if satisfies(theory, candidate):
            models.append(candidate)
    return models
