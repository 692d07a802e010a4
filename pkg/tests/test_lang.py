import pytest

from modelviz.core import INT
from modelviz.errors import (
    DuplicateName,
    LexError,
    ParseError,
    SortMismatch,
    UnknownSymbol,
)
from modelviz.parser import parse_program
from modelviz.printer import pretty_print, structure_text
from modelviz.solve import modelexpand
from randgen import random_program_text

LISTING1 = """
vocabulary V {
  type Num isa int
  A : Num
  B : Num
}
theory T : V {
  A + B > 8.
}
structure S : V {
  Num = {1..5}
}
procedure main() {
  stdoptions.nbmodels=4;
  printmodels(modelexpand(T, S))
}
"""


def test_parse_listing1_shapes():
    p = parse_program(LISTING1)
    assert [n for _, n in p.order] == ["V", "T", "S"]
    voc = p.vocabularies["V"]
    assert voc.sort("Num").base == INT
    assert sorted(voc.all_functions()) == ["A", "B"]
    theory = p.theories["T"]
    assert len(theory.sentences) == 1
    assert p.structures["S"].sort_values("Num") == (1, 2, 3, 4, 5)


def test_empty_input_is_empty_program():
    assert parse_program("").is_empty()


def test_unknown_vocabulary_at_theory_header():
    with pytest.raises(UnknownSymbol) as err:
        parse_program("theory T : V { A + B > 8. }")
    assert err.value.line == 1


def test_every_error_carries_a_position():
    cases = [
        "vocabulary V { type Num isa float }",
        "vocabulary V { type Num isa int } theory T : V { A > 1. }",
        'vocabulary V { type Num isa int\n A : Num } theory T : V { A > "x". }',
        "vocabulary V { &",
    ]
    for text in cases:
        with pytest.raises((ParseError, UnknownSymbol, SortMismatch, LexError)) as err:
            parse_program(text)
        assert err.value.line >= 1
        assert err.value.column >= 1


def test_duplicate_names_rejected():
    with pytest.raises(DuplicateName):
        parse_program("vocabulary V { type T isa int } vocabulary V { type T isa int }")
    with pytest.raises(DuplicateName):
        parse_program("vocabulary V { type T isa int\n type T isa int }")


def test_aggregates_rejected_with_diagnostic():
    text = """
    vocabulary V { type Num isa int\n p(Num) }
    theory T : V { sum{ x : p(x) : x } > 3. }
    """
    with pytest.raises(ParseError) as err:
        parse_program(text)
    assert "aggregate" in str(err.value)


def test_procedure_blocks_are_opaque():
    text = """
    procedure helper(x, y) {
      local s = "}" ; -- a brace inside a string and a Lua comment }{
      // a line comment with a brace }
      return x.."-"..y;
    }
    vocabulary V { type Num isa int }
    """
    p = parse_program(text)
    assert "V" in p.vocabularies


def test_procedure_valued_interpretations_rejected():
    text = """
    vocabulary V { type Num isa int\n f(Num) : Num }
    structure S : V { f = procedure f }
    """
    with pytest.raises(ParseError) as err:
        parse_program(text)
    assert "procedure" in str(err.value)


def test_ltc_marker_and_namespace_refs():
    text = """
    LTCvocabulary W { type Time\n Start : Time\n Next(Time) : Time }
    vocabulary U { extern vocabulary idpd3::V_types }
    """
    p = parse_program(text)
    assert p.vocabularies["W"].ltc
    assert not p.vocabularies["U"].ltc
    assert "time" in p.vocabularies["U"].all_sorts()
    assert "W_ss" in p.generated


def test_operator_precedence():
    text = """
    vocabulary V { p\n q\n r }
    theory T : V { p | q & ~r <=> p => q. }
    """
    p = parse_program(text)
    (sentence,) = p.theories["T"].sentences
    # <=> binds loosest: (p | (q & ~r)) <=> (p => q)
    assert sentence.op == "equiv"
    assert sentence.lhs.op == "or"
    assert sentence.lhs.rhs.op == "and"
    assert sentence.rhs.op == "implies"


def test_le_is_comparison_and_impliedby_is_not():
    text = """
    vocabulary V { type Num isa int\n A : Num\n p }
    theory T : V { A =< 3. p <= A > 2. }
    """
    p = parse_program(text)
    first, second = p.theories["T"].sentences
    assert first.op == "<="
    assert second.op == "impliedby"


def test_unicode_operators():
    text = """
    vocabulary V { type Num isa int\n p(Num) }
    theory T : V { ∀ x [Num] : p(x) ∨ ¬p(x). }
    """
    p = parse_program(text)
    assert len(p.theories["T"].sentences) == 1


def test_free_variable_in_sentence_rejected():
    text = """
    vocabulary V { type Num isa int\n p(Num) }
    theory T : V { p(x). }
    """
    with pytest.raises(UnknownSymbol):
        parse_program(text)


def test_variable_sort_must_be_derivable():
    text = """
    vocabulary V { type Num isa int }
    theory T : V { ! v : v > 3. }
    """
    with pytest.raises(SortMismatch) as err:
        parse_program(text)
    assert "derive" in str(err.value)


def test_no_coercion_across_base_kinds():
    text = """
    vocabulary V { type Num isa int\n type Tag isa string\n A : Num }
    theory T : V { A = "x". }
    """
    with pytest.raises(SortMismatch):
        parse_program(text)


def test_pretty_print_model_listing_style(listing1):
    models = modelexpand(listing1.theories["T"], listing1.structures["S"],
                         nbmodels=4).models
    text = structure_text(models[0])
    assert "A = 4" in text
    assert "B = 5" in text
    assert "Num = {1..5}" in text


def test_pretty_print_empty_program():
    assert pretty_print(parse_program("")) == ""


def test_round_trip_counter(counter):
    text = pretty_print(counter)
    again = parse_program(text)
    assert again == counter


def test_round_trip_chessboard_and_listing6(chessboard, listing6):
    for program in (chessboard, listing6):
        assert parse_program(pretty_print(program)) == program


def test_round_trip_generated_programs():
    for seed in range(60):
        text = random_program_text(seed)
        first = parse_program(text)
        printed = pretty_print(first)
        second = parse_program(printed)
        assert second == first, f"round-trip failed for seed {seed}:\n{text}\n--\n{printed}"


def test_structure_zero_arity_relation_round_trip():
    text = """
    vocabulary V { p\n q }
    structure S : V { p = true\n q = false }
    """
    p = parse_program(text)
    assert parse_program(pretty_print(p)) == p
