import random

import pytest

from modelviz.core import (
    CONSTRUCTED,
    INT,
    STRING,
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
from modelviz.errors import (
    ConflictingInterpretation,
    MissingSymbol,
    SignatureClash,
    SortViolation,
)


def small_vocab():
    return Vocabulary(
        "V",
        sorts=(Sort("Num", INT), Sort("Tag", STRING)),
        predicates=(PredicateDecl("P", ("Num",)), PredicateDecl("Q", ("Num", "Num"))),
        functions=(FunctionDecl("A", (), "Num"),
                   FunctionDecl("g", ("Num",), "Tag", partial=True)),
    )


def test_sort_value_validation():
    voc = small_vocab()
    with pytest.raises(SortViolation):
        Structure("S", voc, {"Num": SortValues((1, "two"))})
    with pytest.raises(SortViolation):
        Structure("S", voc, {"Tag": SortValues((3,))})
    with pytest.raises(SortViolation):
        Structure("S", voc, {"Num": SortValues(())})


def test_constructed_sort_is_fixed():
    voc = Vocabulary("V", sorts=(Sort("shape", CONSTRUCTED, ("circ", "rect")),))
    s = Structure("S", voc)
    assert s.sort_values("shape") == ("circ", "rect")
    with pytest.raises(SortViolation):
        Structure("S", voc, {"shape": SortValues(("circ",))})


def test_tuple_outside_domain_rejected():
    voc = small_vocab()
    with pytest.raises(SortViolation):
        Structure("S", voc, {"Num": SortValues((1, 2)),
                             "P": Relation(frozenset({(3,)}))})


def test_fuzz_out_of_domain_tuples():
    voc = small_vocab()
    rng = random.Random(7)
    for _ in range(50):
        values = tuple(sorted(rng.sample(range(-5, 6), rng.randint(1, 4))))
        outside = rng.choice([v for v in range(-9, 10) if v not in values])
        with pytest.raises(SortViolation):
            Structure("S", voc, {"Num": SortValues(values),
                                 "P": Relation(frozenset({(outside,)}))})


def test_function_single_valued_and_in_domain():
    voc = small_vocab()
    base = {"Num": SortValues((1, 2)), "Tag": SortValues(("a",))}
    with pytest.raises(ConflictingInterpretation):
        FunctionMap((((1,), "a"), ((1,), "b")))
    with pytest.raises(SortViolation):
        Structure("S", voc, {**base, "g": FunctionMap((((1,), "z"),))})
    ok = Structure("S", voc, {**base, "g": FunctionMap((((1,), "a"),))})
    assert ok.interpretation("g").get((1,)) == "a"


def test_merge_paper_chessboard_shape(chessboard):
    m = merge(chessboard.structures["S"], chessboard.structures["S_out"])
    assert m.name == "S+S_out"
    for sym in ("X", "isBlack", "time", "color", "width", "height", "key"):
        assert m.is_enumerated(sym)
    assert m.sort_values("X") == (1, 2, 3)
    assert len(m.interpretation("isBlack").tuples) == 4


def test_merge_identity_with_empty():
    voc = small_vocab()
    s = Structure("S", voc, {"Num": SortValues((1,)), "Tag": SortValues(("a",)),
                             "P": Relation(frozenset({(1,)}))})
    empty = Structure("E", Vocabulary("V0"), {})
    merged = merge(s, empty)
    assert merged.canonical_key() == s.canonical_key()


def test_merge_idempotent_overlap():
    voc = small_vocab()
    mk = lambda name: Structure(name, voc, {"Num": SortValues((1,)),
                                            "P": Relation(frozenset({(1,)}))})
    merged = merge(mk("A"), mk("B"))
    assert merged.interpretation("P").tuples == frozenset({(1,)})


def test_merge_conflicting_interpretation():
    voc = small_vocab()
    a = Structure("A", voc, {"Num": SortValues((1,)), "P": Relation(frozenset({(1,)}))})
    b = Structure("B", voc, {"Num": SortValues((1,)), "P": Relation(frozenset())})
    with pytest.raises(ConflictingInterpretation):
        merge(a, b)


def test_merge_signature_clash():
    a = Structure("A", Vocabulary("V1", predicates=(PredicateDecl("P", ()),),), {})
    v2 = Vocabulary("V2", sorts=(Sort("Num", INT),),
                    functions=(FunctionDecl("P", (), "Num"),))
    b = Structure("B", v2, {})
    with pytest.raises(SignatureClash):
        merge(a, b)


def test_merge_unions_sort_domains():
    voc = Vocabulary("V", sorts=(Sort("Num", INT),))
    a = Structure("A", voc, {"Num": SortValues((1, 2))})
    b = Structure("B", voc, {"Num": SortValues((2, 5))})
    assert merge(a, b).sort_values("Num") == (1, 2, 5)


def test_merge_commutative_associative_seeded():
    voc = small_vocab()
    rng = random.Random(3)
    for _ in range(25):
        nums = tuple(sorted(rng.sample(range(0, 6), 3)))
        shared = {"Num": SortValues(nums), "Tag": SortValues(("a", "b"))}
        pick = lambda: Relation(frozenset((v,) for v in nums if rng.random() < 0.5))
        rel = pick()
        a = Structure("A", voc, {**shared, "P": rel})
        b = Structure("B", voc, {**shared, "P": rel,
                                 "A": FunctionMap((((), rng.choice(nums)),))})
        c = Structure("C", voc, {**shared})
        ab_c = merge(merge(a, b), c)
        a_bc = merge(a, merge(b, c))
        ba = merge(b, a)
        assert ab_c.canonical_key() == a_bc.canonical_key()
        assert merge(a, b).canonical_key() == ba.canonical_key()


def test_project_counter_actions(counter):
    from modelviz.ltc import action_vocabulary, split_ltc

    ltc = split_ltc(counter.theories["T"])
    voc = action_vocabulary(ltc)
    assert sorted(voc.all_predicates()) == ["countDown", "countUp", "setValue"]
    full = Structure("M", ltc.ssv.vocabulary, {
        "Count": SortValues((0, 1)),
        "count": FunctionMap((((), 0),)),
        "countUp": Relation(frozenset()),
        "countDown": Relation(frozenset()),
        "setValue": Relation(frozenset()),
    })
    projected = project(full, voc)
    assert set(projected.interps) == {"Count", "countUp", "countDown", "setValue"}


def test_project_identity():
    voc = small_vocab()
    s = Structure("S", voc, {"Num": SortValues((1,)), "Tag": SortValues(("a",)),
                             "P": Relation(frozenset({(1,)}))})
    again = project(s, voc)
    assert again.canonical_key() == s.canonical_key()


def test_project_listing2_m1_to_just_a(listing1):
    from modelviz.solve import modelexpand

    models = modelexpand(listing1.theories["T"], listing1.structures["S"],
                         nbmodels=4).models
    m1 = models[0]
    target = Vocabulary("VA", sorts=(Sort("Num", INT),),
                        functions=(FunctionDecl("A", (), "Num"),))
    projected = project(m1, target)
    assert projected.interpretation("A").get(()) == 4
    assert set(projected.interps) == {"Num", "A"}


def test_project_missing_symbol():
    voc = small_vocab()
    s = Structure("S", voc, {})
    bigger = Vocabulary("W", sorts=(Sort("Num", INT),),
                        predicates=(PredicateDecl("R", ("Num",)),))
    with pytest.raises(MissingSymbol):
        project(s, bigger)


def test_project_of_merge_recovers_left():
    voc_a = Vocabulary("VA", sorts=(Sort("Num", INT),),
                       predicates=(PredicateDecl("P", ("Num",)),))
    voc_b = Vocabulary("VB", sorts=(Sort("Tag", STRING),),
                       predicates=(PredicateDecl("R", ("Tag",)),))
    a = Structure("A", voc_a, {"Num": SortValues((1, 2)),
                               "P": Relation(frozenset({(1,)}))})
    b = Structure("B", voc_b, {"Tag": SortValues(("x",)),
                               "R": Relation(frozenset())})
    back = project(merge(a, b), voc_a)
    assert back.canonical_key() == a.canonical_key()


def test_is_two_valued_cases(listing1):
    from modelviz.solve import modelexpand

    s = listing1.structures["S"]
    assert not is_two_valued(s)  # A and B unspecified
    m1 = modelexpand(listing1.theories["T"], s, nbmodels=1).models[0]
    assert is_two_valued(m1)


def test_partial_function_gap_is_two_valued():
    voc = small_vocab()
    s = Structure("S", voc, {
        "Num": SortValues((1, 2)), "Tag": SortValues(("a",)),
        "P": Relation(frozenset()), "Q": Relation(frozenset()),
        "A": FunctionMap((((), 1),)),
        "g": FunctionMap((((1,), "a"),)),  # gap at 2 is fine: g is partial
    })
    assert is_two_valued(s)


def test_total_function_gap_not_two_valued():
    voc = Vocabulary("V", sorts=(Sort("Num", INT),),
                     functions=(FunctionDecl("f", ("Num",), "Num"),))
    s = Structure("S", voc, {"Num": SortValues((1, 2)),
                             "f": FunctionMap((((1,), 1),))})
    assert not is_two_valued(s)


def test_lift_and_conform():
    voc = small_vocab()
    sub = Vocabulary("Sub", sorts=(Sort("Num", INT),),
                     predicates=(PredicateDecl("P", ("Num",)),))
    s = Structure("S", sub, {"Num": SortValues((1,)), "P": Relation(frozenset({(1,)}))})
    lifted = lift(s, voc)
    assert lifted.vocabulary is voc
    back = conform(lifted, sub)
    assert back.canonical_key() == s.canonical_key()
    with pytest.raises(SignatureClash):
        lift(Structure("S", voc, {}), sub)
