import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padiccf.expansion import (
    TERMINATED,
    Algorithm,
    ExplicitStream,
    NonTerminatingDetected,
    PeriodicStream,
    RationalExpander,
    SurdExpander,
    TailStream,
    check_quotient,
    convergents,
    dump_expansion,
    evaluate,
    make_stream,
)
from padiccf.surd import QuadraticSurd

F = Fraction


def test_minus_p_under_ruban():
    s = RationalExpander(-5, 5)
    assert s.take(4) == [0, F(24, 5), F(24, 5), F(24, 5)]
    assert s.nonterminating_cycle is not None
    assert s.periodic_structure() == ([0], [F(24, 5)])


def test_strict_rejects_cycles():
    with pytest.raises(NonTerminatingDetected):
        RationalExpander(-5, 5, strict=True).take(10)


def test_browkin_example():
    s = RationalExpander(F(1, 3), 5, Algorithm.BROWKIN1)
    assert s.take(10) == [2, F(-3, 5)]
    assert s.is_last(1) and s.term(2) is TERMINATED


@settings(max_examples=200)
@given(st.fractions(min_value=-10**4, max_value=10**4, max_denominator=10**4), st.sampled_from([3, 5, 13]))
def test_browkin_terminates_and_reconstructs(q, p):
    terms = RationalExpander(q, p, Algorithm.BROWKIN1).take(300)
    assert len(terms) < 300
    assert evaluate(terms) == q
    assert convergents(terms)[-1].value == q


@given(st.fractions(max_denominator=10**3), st.sampled_from([3, 5, 7]), st.sampled_from(list(Algorithm)))
def test_quotients_are_valid(q, p, algo):
    s = RationalExpander(q, p, algo)
    for n, a in enumerate(s.take(40)):
        check_quotient(a, n, p, algo)


@pytest.mark.parametrize("algo", list(Algorithm))
def test_surd_expansion_recomposes(algo):
    alpha = QuadraticSurd.sqrt(2, 7)
    s = SurdExpander(alpha, algo)
    terms = s.take(20)
    c = convergents(terms)[-1]
    prev = convergents(terms)[-2]
    tail = s.complete_quotient(20)
    assert (tail * c.A + prev.A) / (tail * c.B + prev.B) == alpha


def test_mr_alternates_floors():
    terms = SurdExpander(QuadraticSurd.sqrt(2, 7), Algorithm.MR).take(30)
    for n, a in enumerate(terms):
        check_quotient(a, n, 7, Algorithm.MR)


def test_explicit_and_periodic_streams():
    e = ExplicitStream([1, F(1, 5), F(2, 5)], 5)
    assert e.complete_quotient(1) == F(1, 5) + F(5, 2)
    assert e.is_last(2) and not e.is_last(1)
    with pytest.raises(ValueError):
        ExplicitStream([1, 2], 5)  # a_1 needs negative valuation
    per = PeriodicStream([1], [F(1, 5), F(2, 5)], 5)
    assert per.take(6) == [1, F(1, 5), F(2, 5), F(1, 5), F(2, 5), F(1, 5)]
    with pytest.raises(ValueError):
        PeriodicStream([1], [], 5)


def test_tail_stream():
    base = RationalExpander(F(7, 3), 5)
    tail = TailStream(base, 1)
    assert tail.take(5) == base.take(6)[1:]
    assert tail.complete_quotient(0) == base.complete_quotient(1)
    with pytest.raises(ValueError):
        TailStream(SurdExpander(QuadraticSurd.sqrt(2, 7), Algorithm.MR), 1)


def test_make_stream_and_json():
    s = make_stream(QuadraticSurd.sqrt(2, 7) * 0 + F(1, 3), 5, Algorithm.BROWKIN1)
    assert isinstance(s, RationalExpander)
    data = json.loads(dump_expansion(SurdExpander(QuadraticSurd.sqrt(95, 13)), 3))
    assert data["branch"] == 2 and not data["terminated"] and len(data["terms"]) == 3
    assert data["terms"][0] == {"num": "2", "den": "1"}


def test_algorithm_parse():
    assert Algorithm.parse("Browkin-I") is Algorithm.BROWKIN1
    with pytest.raises(ValueError):
        Algorithm.parse("gauss")
    with pytest.raises(ValueError):
        convergents([])
