"""Render resolved programs, theories and structures back to source text.

The output reparses to a structurally equal program (positions aside), so
printing doubles as the canonical form for model listings.
"""

from __future__ import annotations

from .core import (
    CONSTRUCTED,
    FunctionMap,
    Relation,
    SortValues,
    Structure,
    Vocabulary,
)
from .predefined import PREDEFINED_VOCABULARIES
from .syntax import (
    Arith,
    Atom,
    BinOp,
    Builtin,
    Cmp,
    Definition,
    EnumConst,
    FuncApp,
    IntConst,
    Not,
    Program,
    Quant,
    Rule,
    StrConst,
    Theory,
    Truth,
    Var,
)

_CMP_TEXT = {"=": "=", "!=": "~=", "<": "<", ">": ">", "<=": "=<", ">=": ">="}


def escape_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def term_text(t, parent_prec: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, IntConst):
        return str(t.value)
    if isinstance(t, StrConst):
        return escape_string(t.value)
    if isinstance(t, EnumConst):
        return t.name
    if isinstance(t, FuncApp):
        if not t.args:
            return t.name
        return f"{t.name}({', '.join(term_text(a) for a in t.args)})"
    if isinstance(t, Builtin):
        return f"{t.op}({', '.join(term_text(a) for a in t.args)})"
    if isinstance(t, Arith):
        prec = 2 if t.op == "*" else 1
        text = (f"{term_text(t.lhs, prec)} {t.op} {term_text(t.rhs, prec + 1)}")
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"cannot print term {t!r}")


def formula_text(f, parent_prec: int = 0) -> str:
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(term_text(a) for a in f.args)})"
    if isinstance(f, Cmp):
        return f"{term_text(f.lhs)} {_CMP_TEXT[f.op]} {term_text(f.rhs)}"
    if isinstance(f, Not):
        return f"~{formula_text(f.body, 5)}"
    if isinstance(f, BinOp):
        if f.op == "and":
            prec, sym, right = 4, "&", 5
        elif f.op == "or":
            prec, sym, right = 3, "|", 4
        elif f.op == "implies":
            text = f"{formula_text(f.lhs, 3)} => {formula_text(f.rhs, 2)}"
            return f"({text})" if 2 < parent_prec else text
        elif f.op == "impliedby":
            text = f"{formula_text(f.lhs, 2)} <= {formula_text(f.rhs, 3)}"
            return f"({text})" if 2 < parent_prec else text
        else:
            prec, sym, right = 1, "<=>", 2
        text = f"{formula_text(f.lhs, prec)} {sym} {formula_text(f.rhs, right)}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(f, Quant):
        marker = "!" if f.kind == "forall" else "?"
        variables = " ".join(f"{qv.name} [{qv.sort}]" for qv in f.variables)
        text = f"{marker} {variables} : {formula_text(f.body)}"
        return f"({text})" if parent_prec > 0 else text
    raise TypeError(f"cannot print formula {f!r}")


def rule_text(r: Rule) -> str:
    head = r.head_symbol
    if r.head_args:
        head += f"({', '.join(term_text(a) for a in r.head_args)})"
    if r.head_value is not None:
        head += f" = {term_text(r.head_value)}"
    if isinstance(r.body, Truth) and r.body.value:
        return f"{head}."
    return f"{head} <- {formula_text(r.body)}."


def _sort_value_text(sort_base: str, v) -> str:
    if isinstance(v, int):
        return str(v)
    if sort_base == CONSTRUCTED:
        return v
    return escape_string(v)


def structure_text(s: Structure, indent: str = "    ") -> str:
    lines = [f"structure {s.name} : {s.vocabulary.name} {{"]
    sorts = s.vocabulary.all_sorts()
    preds = s.vocabulary.all_predicates()
    funcs = s.vocabulary.all_functions()
    for sym in sorted(s.interps):
        interp = s.interps[sym]
        if sym in sorts:
            if sorts[sym].base == CONSTRUCTED:
                continue  # fixed by the declaration
            assert isinstance(interp, SortValues)
            lines.append(f"{indent}{sym} = {_sort_enum_text(sorts[sym].base, interp)}")
        elif sym in preds:
            assert isinstance(interp, Relation)
            bases = [sorts[n].base for n in preds[sym].arg_sorts]
            lines.append(f"{indent}{sym} = {_relation_text(bases, interp)}")
        else:
            assert isinstance(interp, FunctionMap)
            decl = funcs[sym]
            bases = [sorts[n].base for n in decl.arg_sorts + (decl.out_sort,)]
            lines.append(f"{indent}{sym} = {_function_text(bases, interp)}")
    lines.append("}")
    return "\n".join(lines)


def _sort_enum_text(base: str, interp: SortValues) -> str:
    values = interp.values
    if (len(values) > 1 and all(isinstance(v, int) for v in values)
            and values == tuple(range(values[0], values[-1] + 1))):
        return f"{{{values[0]}..{values[-1]}}}"
    return "{" + "; ".join(_sort_value_text(base, v) for v in values) + "}"


def _relation_text(bases: list[str], interp: Relation) -> str:
    if not bases:
        return "true" if () in interp.tuples else "false"
    rows = [", ".join(_sort_value_text(b, v) for b, v in zip(bases, t))
            for t in interp.canonical()]
    return "{" + "; ".join(rows) + "}"


def _function_text(bases: list[str], interp: FunctionMap) -> str:
    if len(bases) == 1:  # a constant
        value = interp.get(())
        if value is None:
            return "{}"
        return _sort_value_text(bases[0], value)
    rows = [", ".join(_sort_value_text(b, v) for b, v in zip(bases, point + (value,)))
            for point, value in interp.items()]
    return "{" + "; ".join(rows) + "}"


def vocabulary_text(v: Vocabulary, indent: str = "    ") -> str:
    keyword = "LTCvocabulary" if v.ltc else "vocabulary"
    lines = [f"{keyword} {v.name} {{"]
    for ext in v.externs:
        lines.append(f"{indent}extern vocabulary {ext.name}")
    for sort in v.sorts:
        if sort.base == CONSTRUCTED:
            lines.append(f"{indent}type {sort.name} constructed from "
                         f"{{{', '.join(sort.constructors)}}}")
        else:
            base = "int" if sort.base == "int" else "string"
            lines.append(f"{indent}type {sort.name} isa {base}")
    for p in v.predicates:
        args = f"({', '.join(p.arg_sorts)})" if p.arg_sorts else ""
        lines.append(f"{indent}{p.name}{args}")
    for fn in v.functions:
        partial = "partial " if fn.partial else ""
        args = f"({', '.join(fn.arg_sorts)})" if fn.arg_sorts else ""
        lines.append(f"{indent}{partial}{fn.name}{args} : {fn.out_sort}")
    lines.append("}")
    return "\n".join(lines)


def theory_text(t: Theory, indent: str = "    ") -> str:
    lines = [f"theory {t.name} : {t.vocabulary.name} {{"]
    for sentence in t.sentences:
        lines.append(f"{indent}{formula_text(sentence)}.")
    for definition in t.definitions:
        lines.append(f"{indent}{{")
        for rule in definition.rules:
            lines.append(f"{indent}{indent}{rule_text(rule)}")
        lines.append(f"{indent}}}")
    lines.append("}")
    return "\n".join(lines)


def program_text(p: Program) -> str:
    blocks = []
    for kind, name in p.order:
        if kind == "vocabulary":
            blocks.append(vocabulary_text(p.vocabularies[name]))
        elif kind == "theory":
            blocks.append(theory_text(p.theories[name]))
        else:
            blocks.append(structure_text(p.structures[name]))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def pretty_print(obj) -> str:
    """Listing-style text for a program, structure, theory or vocabulary."""
    if isinstance(obj, Program):
        return program_text(obj)
    if isinstance(obj, Structure):
        return structure_text(obj)
    if isinstance(obj, Theory):
        return theory_text(obj)
    if isinstance(obj, Vocabulary):
        return vocabulary_text(obj)
    raise TypeError(f"cannot print {type(obj).__name__}")


def models_text(models, vocabulary_name: str = "") -> str:
    """Listing-2 style printout of a model list."""
    return "\n".join(structure_text(m) for m in models)
