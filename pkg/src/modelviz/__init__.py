"""Declarative visualization of finite models.

Parse logic programs (vocabularies, theories, structures), expand partial
structures to models, progress linear-time theories step by step, encode
drawing structures as keyframe-animation JSON, decode clicks back into
structures, and run the interactive simulation loop.
"""

from .apps import (
    CompareResult,
    SimConfig,
    SimState,
    compare_theories,
    sim_init,
    sim_step,
    visualise_model,
    visualise_structure,
)
from .clicks import clicks_structure, decode_clicks
from .core import (
    FunctionDecl,
    FunctionMap,
    PredicateDecl,
    Relation,
    Sort,
    SortValues,
    Structure,
    Vocabulary,
    conform,
    is_two_valued,
    lift,
    merge,
    project,
)
from .drawing import DrawingSpec, Element, Frame, deserialize, encode, serialize, validate_out
from .evaluate import satisfies
from .fixpoint import evaluate_definition
from .ltc import (
    LtcTheory,
    Snapshot,
    initialise,
    progress,
    single_state_vocab,
    split_ltc,
)
from .parser import parse_program
from .printer import pretty_print
from .solve import ModelSet, modelexpand, onemodel
from .syntax import Definition, Program, Rule, Theory

__version__ = "0.1.0"

__all__ = [
    "CompareResult", "SimConfig", "SimState", "compare_theories", "sim_init",
    "sim_step", "visualise_model", "visualise_structure", "clicks_structure",
    "decode_clicks", "FunctionDecl", "FunctionMap", "PredicateDecl", "Relation",
    "Sort", "SortValues", "Structure", "Vocabulary", "conform", "is_two_valued",
    "lift", "merge", "project", "DrawingSpec", "Element", "Frame", "deserialize",
    "encode", "serialize", "validate_out", "satisfies", "evaluate_definition",
    "LtcTheory", "Snapshot", "initialise", "progress", "single_state_vocab",
    "split_ltc", "parse_program", "pretty_print", "ModelSet", "modelexpand",
    "onemodel", "Definition", "Program", "Rule", "Theory",
]
