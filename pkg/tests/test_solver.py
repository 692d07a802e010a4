import pytest

from conftest import brute_force_models, candidate_space
from modelviz.core import (
    INT,
    FunctionDecl,
    FunctionMap,
    PredicateDecl,
    Relation,
    Sort,
    SortValues,
    Structure,
    Vocabulary,
    is_two_valued,
    merge,
)
from modelviz.errors import (
    ArithmeticOverflow,
    EmptySortDomain,
    FunctionConflict,
    NotTwoValued,
    PartialityViolation,
    SearchBudgetExceeded,
    UnstratifiedDefinition,
)
from modelviz.evaluate import satisfies
from modelviz.fixpoint import evaluate_definition
from modelviz.parser import parse_program
from modelviz.solve import modelexpand, onemodel
from randgen import random_program_text


def keys(models):
    return {m.canonical_key() for m in models}


def ab(model):
    return (model.interpretation("A").get(()), model.interpretation("B").get(()))


def test_listing1_models_match_listing2(listing1):
    found = modelexpand(listing1.theories["T"], listing1.structures["S"], nbmodels=4)
    assert found.exhausted
    assert {ab(m) for m in found.models} == {(4, 5), (5, 5), (5, 4)}
    for m in found.models:
        assert satisfies(listing1.theories["T"], m)
        assert is_two_valued(m)


def test_empty_theory_returns_the_structure_itself():
    voc = Vocabulary("V", sorts=(Sort("Num", INT),),
                     functions=(FunctionDecl("A", (), "Num"),))
    s = Structure("S", voc, {"Num": SortValues((1, 2)),
                             "A": FunctionMap((((), 2),))})
    theory = parse_program("vocabulary W { }\ntheory T : W { }").theories["T"]
    found = modelexpand(theory, s)
    assert found.exhausted
    assert keys(found.models) == {s.canonical_key()}


def test_small_domain_derived_example():
    text = """
    vocabulary V { type Num isa int\n A : Num\n B : Num }
    theory T : V { A + B > 4. }
    structure S : V { Num = {1..3} }
    """
    p = parse_program(text)
    found = modelexpand(p.theories["T"], p.structures["S"])
    assert {ab(m) for m in found.models} == {(2, 3), (3, 2), (3, 3)}
    oracle = brute_force_models(p.theories["T"], p.structures["S"])
    assert keys(found.models) == keys(oracle)


def test_onemodel_is_first_in_canonical_order(listing1):
    m = onemodel(listing1.theories["T"], listing1.structures["S"])
    assert ab(m) == (4, 5)


def test_onemodel_unsat_returns_none():
    text = "vocabulary V { }\ntheory T : V { 1 > 2. }\nstructure S : V { }"
    p = parse_program(text)
    assert onemodel(p.theories["T"], p.structures["S"]) is None


def test_onemodel_chessboard_colors(chessboard):
    m = merge(chessboard.structures["S"], chessboard.structures["S_out"])
    sol = onemodel(chessboard.theories["T"], m)
    color = sol.interpretation("d3_color")
    assert color.get((1, "1-2")) == "black"
    assert color.get((1, "1-1")) == "white"
    assert satisfies(chessboard.theories["T"], sol)


def test_satisfies_listing2_and_negative(listing1):
    theory = listing1.theories["T"]
    m1 = modelexpand(theory, listing1.structures["S"], nbmodels=1).models[0]
    assert satisfies(theory, m1)
    bad_interps = dict(m1.interps)
    bad_interps["A"] = FunctionMap((((), 1),))
    bad_interps["B"] = FunctionMap((((), 1),))
    bad = Structure("bad", m1.vocabulary, bad_interps)
    assert not satisfies(theory, bad)


def test_satisfies_empty_theory_any_structure():
    p = parse_program("vocabulary V { type Num isa int\n A : Num }\n"
                      "theory T : V { }\n"
                      "structure S : V { Num = {1..2}\n A = 1 }")
    assert satisfies(p.theories["T"], p.structures["S"])


def test_satisfies_requires_two_valued(listing1):
    with pytest.raises(NotTwoValued):
        satisfies(listing1.theories["T"], listing1.structures["S"])


def test_evaluate_definition_chessboard_colors(chessboard):
    merged = merge(chessboard.structures["S"], chessboard.structures["S_out"])
    definition = chessboard.theories["T"].definitions[0]
    computed = evaluate_definition(definition, merged)
    color = computed["d3_color"]
    blacks = [p for p, v in color.items() if v == "black"]
    whites = [p for p, v in color.items() if v == "white"]
    assert len(blacks) == 4 and len(whites) == 5
    assert computed["d3_width"].get((1,)) == 14


def test_evaluate_definition_empty_fixpoint():
    text = """
    vocabulary V { type Num isa int\n P(Num) }
    theory T : V { { P(x) <- false. } }
    structure S : V { Num = {1..3} }
    """
    p = parse_program(text)
    computed = evaluate_definition(p.theories["T"].definitions[0], p.structures["S"])
    assert computed["P"].tuples == frozenset()


def test_evaluate_definition_counter_single_step():
    text = """
    vocabulary V {
      type Time isa int
      type Count isa int
      partial Next(Time) : Time
      count(Time) : Count
      countUp(Time)
    }
    theory T : V {
      {
        count(0) = 0.
        count(Next(t)) = count(t) + 1 <- countUp(t).
      }
    }
    structure S : V {
      Time = {0..1}
      Count = {0..5}
      Next = {0, 1}
      countUp = {0}
    }
    """
    p = parse_program(text)
    computed = evaluate_definition(p.theories["T"].definitions[0], p.structures["S"])
    assert computed["count"].get((0,)) == 0
    assert computed["count"].get((1,)) == 1


def test_evaluate_definition_totality_enforced():
    text = """
    vocabulary V {
      type Time isa int
      type Count isa int
      partial Next(Time) : Time
      count(Time) : Count
      countUp(Time)
    }
    theory T : V { { count(Next(t)) = count(t) + 1 <- countUp(t). } }
    structure S : V {
      Time = {0..1}
      Count = {0..5}
      Next = {0, 1}
      countUp = {0}
    }
    """
    p = parse_program(text)
    with pytest.raises(PartialityViolation):
        # nothing defines count at time 0, and count is not partial
        evaluate_definition(p.theories["T"].definitions[0], p.structures["S"])


def test_recursive_definition_reachability():
    text = """
    vocabulary V { type N isa int\n edge(N, N)\n reach(N) }
    theory T : V {
      { reach(1).
        reach(y) <- reach(x) & edge(x, y). }
    }
    structure S : V { N = {1..4}\n edge = {1, 2; 2, 3} }
    """
    p = parse_program(text)
    computed = evaluate_definition(p.theories["T"].definitions[0], p.structures["S"])
    assert computed["reach"].tuples == frozenset({(1,), (2,), (3,)})
    found = modelexpand(p.theories["T"], p.structures["S"])
    assert len(found.models) == 1
    assert found.models[0].interpretation("reach").tuples == frozenset({(1,), (2,), (3,)})


def test_unfounded_models_are_rejected():
    # completion alone would allow p <-> q to hold with both true
    text = """
    vocabulary V { p\n q }
    theory T : V { { p <- q. q <- p. } }
    structure S : V { }
    """
    p = parse_program(text)
    found = modelexpand(p.theories["T"], p.structures["S"])
    assert len(found.models) == 1
    assert found.models[0].interpretation("p").tuples == frozenset()


def test_unstratified_definition_rejected():
    text = """
    vocabulary V { p\n q }
    theory T : V { { p <- ~q. q <- ~p. } }
    structure S : V { }
    """
    p = parse_program(text)
    with pytest.raises(UnstratifiedDefinition):
        modelexpand(p.theories["T"], p.structures["S"])


def test_stratified_negation_across_definitions_in_one_block():
    text = """
    vocabulary V { type N isa int\n base(N)\n other(N) }
    theory T : V {
      { base(1).
        other(x) <- ~base(x). }
    }
    structure S : V { N = {1..3} }
    """
    p = parse_program(text)
    found = modelexpand(p.theories["T"], p.structures["S"])
    assert len(found.models) == 1
    assert found.models[0].interpretation("other").tuples == frozenset({(2,), (3,)})


def test_function_conflict_no_model():
    text = """
    vocabulary V { type N isa int\n f : N\n a\n b }
    theory T : V { a. b. { f = 1 <- a. f = 2 <- b. } }
    structure S : V { N = {1..2} }
    """
    p = parse_program(text)
    assert onemodel(p.theories["T"], p.structures["S"]) is None


def test_function_conflict_raised_by_fixpoint():
    text = """
    vocabulary V { type N isa int\n f : N\n a\n b }
    theory T : V { { f = 1 <- a. f = 2 <- b. } }
    structure S : V { N = {1..2}\n a = true\n b = true }
    """
    p = parse_program(text)
    with pytest.raises(FunctionConflict):
        evaluate_definition(p.theories["T"].definitions[0], p.structures["S"])


def test_empty_sort_domain_error():
    text = """
    vocabulary V { type N isa int\n type M isa int\n f(N) : M }
    theory T : V { }
    structure S : V { N = {1..2} }
    """
    p = parse_program(text)
    with pytest.raises(EmptySortDomain):
        modelexpand(p.theories["T"], p.structures["S"])


def test_arithmetic_overflow_detected():
    text = """
    vocabulary V { type N isa int\n A : N }
    theory T : V { A * A * A * A * A * A * A * A > 0. }
    structure S : V { N = {0..300} }
    """
    p = parse_program(text)
    with pytest.raises(ArithmeticOverflow):
        modelexpand(p.theories["T"], p.structures["S"], nbmodels=1)


def test_search_budget_reports_partial():
    text = """
    vocabulary V { type N isa int\n p(N, N) }
    theory T : V { }
    structure S : V { N = {1..4} }
    """
    p = parse_program(text)
    with pytest.raises(SearchBudgetExceeded) as err:
        modelexpand(p.theories["T"], p.structures["S"], node_budget=40)
    assert err.value.partial is not None
    assert not err.value.partial.exhausted


def test_extension_property(listing1):
    text = """
    vocabulary V { type Num isa int\n A : Num\n B : Num }
    theory T : V { A + B > 4. }
    structure S : V { Num = {1..3}\n A = 2 }
    """
    p = parse_program(text)
    found = modelexpand(p.theories["T"], p.structures["S"])
    assert {ab(m) for m in found.models} == {(2, 3)}
    for m in found.models:
        assert m.interpretation("A").get(()) == 2


def test_determinism_and_monotone_cutoff(listing1):
    theory, s = listing1.theories["T"], listing1.structures["S"]
    full1 = modelexpand(theory, s)
    full2 = modelexpand(theory, s)
    assert [m.canonical_key() for m in full1.models] == \
        [m.canonical_key() for m in full2.models]
    for k in range(1, 5):
        prefix = modelexpand(theory, s, nbmodels=k)
        assert [m.canonical_key() for m in prefix.models] == \
            [m.canonical_key() for m in full1.models[:k]]
        # at the cap we cannot know whether more models exist
        assert prefix.exhausted == (k > 3)


def test_random_theories_match_brute_force_oracle():
    checked = 0
    for seed in range(60):
        text = random_program_text(seed)
        p = parse_program(text)
        theory, s = p.theories["T"], p.structures["S"]
        assert candidate_space(s) <= 512
        oracle = keys(brute_force_models(theory, s))
        found = modelexpand(theory, s)
        assert found.exhausted
        assert keys(found.models) == oracle, f"seed {seed}:\n{text}"
        for m in found.models:
            assert satisfies(theory, m)
        checked += 1
    assert checked == 60
