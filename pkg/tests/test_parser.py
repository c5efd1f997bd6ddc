import random
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from hfadvisor.model import (
    BodyLiteral,
    Comparison,
    Constant,
    Number,
    Program,
    Rule,
    Variable,
    lit,
    naf,
    pos,
)
from hfadvisor.parser import ParseError, Query, parse_program, parse_query, print_program
from hfadvisor.patterns import MalformedPattern

from _generators import random_ast_program


def test_minimal_rule():
    program = parse_program("p :- not q.")
    assert program.rules == (Rule(lit("p"), (naf("q"),)),)


def test_stage_b_rule_shape():
    src = (
        "recommendation(beta_blockers, class_1):- accf_stage(b),\n"
        "    history_of_mi_or_acs, measurement(lvef, Data),\n"
        "    reduced_ef(Data), not contraindication(beta_blockers).\n"
    )
    (rule,) = parse_program(src).rules
    assert rule.head == lit("recommendation", "beta_blockers", "class_1")
    assert rule.body == (
        pos("accf_stage", "b"),
        pos("history_of_mi_or_acs"),
        pos("measurement", "lvef", Variable("Data")),
        pos("reduced_ef", Variable("Data")),
        naf("contraindication", "beta_blockers"),
    )


def test_naf_over_strong_negation():
    (rule,) = parse_program(
        "contraindication(blood_pressure_control):- not -history(mi)."
    ).rules
    assert rule.body == (naf(lit("history", "mi", strong_neg=True)),)


def test_malformed_empty_body():
    with pytest.raises(ParseError) as err:
        parse_program("p :- .")
    assert err.value.line == 1


def test_comments_and_whitespace_ignored():
    a = parse_program("p :- not q.  % trailing\n")
    b = parse_program("% leading\n\n  p :-\n     not q.   % note\n%eof\n")
    assert a == b


def test_comparison_and_numbers():
    (rule,) = parse_program("reduced_ef(X) :- measurement(lvef, X), X <= 0.40.").rules
    assert rule.body[1] == Comparison(Variable("X"), "<=", Number(Decimal("0.40")))


def test_negative_number_argument():
    (rule,) = parse_program("delta(-3.5).").rules
    assert str(rule) == "delta(-3.5)."


def test_parenthesized_atom_argument():
    query = parse_query(
        "?-recommendation((hydralazine_and_isosorbide_dinitrate), class_1)."
    )
    assert query.goals == (
        pos("recommendation", "hydralazine_and_isosorbide_dinitrate", "class_1"),
    )


def test_parse_query_variables_and_naf():
    query = parse_query("?- recommendation(T, C).")
    assert query.goals == (
        pos("recommendation", Variable("T"), Variable("C")),
    )
    assert parse_query("?- a, not b.").goals == (pos("a"), naf("b"))
    assert parse_query("a, not b.").goals == (pos("a"), naf("b"))


def test_empty_query_is_an_error():
    with pytest.raises(ParseError):
        parse_query("?-")
    with pytest.raises(ParseError):
        parse_query("")


def test_reserved_prefix_rejected():
    with pytest.raises(ParseError):
        parse_program("__neg_a :- not a.")


def test_abducible_directive():
    program = parse_program("#abducible history/1.\n#abducible pregnancy/0.")
    assert program.abducibles == frozenset({("history", 1), ("pregnancy", 0)})


def test_unknown_pattern_kind():
    with pytest.raises(MalformedPattern) as err:
        parse_program("#pattern mystery(choice(a, class_1)).")
    assert err.value.line == 1


def test_print_program_basics():
    assert print_program(Program((Rule(lit("a"), ()),))) == "a.\n"
    program = Program((Rule(lit("c"), (naf(lit("d", strong_neg=True)),)),))
    assert print_program(program) == "c :- not -d.\n"


def test_kb_files_round_trip():
    from hfadvisor.chf import default_kb_paths

    for path in default_kb_paths():
        text = path.read_text(encoding="utf-8")
        program = parse_program(text)
        assert parse_program(print_program(program)) == program


@settings(max_examples=200)
@given(st.integers(0, 10**9))
def test_round_trip_random_programs(seed):
    program = random_ast_program(random.Random(seed))
    printed = print_program(program)
    assert parse_program(printed) == program


@settings(max_examples=150)
@given(st.integers(0, 10**9), st.integers(0, 10**6), st.sampled_from("@$^&~`"))
def test_error_location_identifies_injected_character(seed, position, bad_char):
    program = random_ast_program(random.Random(seed))
    text = print_program(program)
    index = position % (len(text) + 1)
    mutated = text[:index] + bad_char + text[index:]
    prefix = mutated[:index]
    line = prefix.count("\n") + 1
    column = index - (prefix.rfind("\n") + 1) + 1
    with pytest.raises(ParseError) as err:
        parse_program(mutated)
    # The injected character, or an earlier token boundary on the same line
    # (splitting ":-" blames the now-dangling ":").
    assert err.value.line == line
    assert 1 <= err.value.column <= column


@settings(max_examples=100)
@given(st.integers(0, 10**9))
def test_comment_injection_preserves_ast(seed):
    program = random_ast_program(random.Random(seed))
    printed = print_program(program)
    commented = "% header\n" + printed.replace("\n", "   % note\n \n") + "\n% footer"
    assert parse_program(commented) == program
