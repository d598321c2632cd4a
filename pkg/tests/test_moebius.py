import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padiccf.engine import EventType, RunStatus, SingularMatrixError
from padiccf.expansion import Algorithm, ExplicitStream, PeriodicStream, RationalExpander, SurdExpander
from padiccf.moebius import (
    MoebiusEngine,
    Reason,
    decide_floor,
    decide_floor_ball,
    decide_floor_mr,
    input_transform,
    output_transform,
    run,
)
from padiccf.padic import DigitConvention, PadicContext, floor_rational
from padiccf.surd import QuadraticSurd

F = Fraction


def test_decide_floor_examples():
    d = decide_floor(1, 0, 0, 25, 1, 5)
    assert not d.determinable and (d.v1, d.v2, d.m) == (0, 2, 0)
    assert decide_floor(1, 4, 0, 1, 1, 5).reason is Reason.PATHOLOGICAL
    ok = decide_floor(1, 0, 0, 1, F(3, 5), 5)
    assert ok.determinable and ok.value == F(3, 5)
    assert decide_floor(1, 0, 0, 1, 2, 5, exact=True).value == 2
    with pytest.raises(SingularMatrixError):
        decide_floor(1, 2, 2, 4, 1, 5)


def test_transforms():
    assert input_transform((1, 0, 0, 25), 1) == (1, 1, 25, 0)
    assert output_transform((1, 2, 3, 4), 2) == (3, 4, -5, -6)


def _completions_agree(x, y, z, t, a, p, value):
    ctx = PadicContext(p)
    for d in range(p):
        alpha = a + d * p
        den = z * alpha + t
        if den == 0 or floor_rational((x * alpha + y) / den, ctx) != value:
            return False
    return True


small = st.sampled_from([F(0), F(1), F(2), F(1, 3), F(3), F(-1), F(2, 9), F(9)])


@given(small, small, small, small, st.sampled_from([F(0), F(1), F(2), F(1, 3), F(5, 9), F(2, 3)]))
def test_floor_verdict_is_sound(x, y, z, t, a):
    if x * t == y * z:
        return
    d = decide_floor(x, y, z, t, a, 3)
    if d.determinable:
        assert _completions_agree(x, y, z, t, a, 3, d.value)
    b = decide_floor_ball(x, y, z, t, a, 3)
    if b.determinable:
        assert _completions_agree(x, y, z, t, a, 3, b.value)


def test_mr_decisions():
    s_dec, t_dec = decide_floor_mr(1, 0, 0, 1, F(3, 5), "s", 5)
    assert s_dec.determinable and t_dec.determinable
    assert (s_dec.value, t_dec.value) == (F(3, 5), F(-2, 5))
    with pytest.raises(ValueError):
        decide_floor_mr(1, 0, 0, 1, 1, "u", 5)


def test_never_output_witness():
    stream = PeriodicStream([1], [F(1, 5)], 5)
    trace = run((1, 0, 0, 25), stream, max_inputs=500)
    assert trace.outputs == [] and trace.status is RunStatus.INPUT_BUDGET_EXHAUSTED and trace.stalled
    assert trace.events[-1].type is EventType.INPUT_BUDGET_EXHAUSTED


def test_exact_rule_sees_past_the_witness():
    # the value is known to lie in a ball whose floor is fixed, even though
    # the good-case rule never fires
    stream = PeriodicStream([1], [F(1, 5)], 5)
    trace = run((1, 0, 0, 25), stream, max_inputs=500, max_outputs=3, rule="exact")
    assert len(trace.outputs) == 3


def test_rational_input_finishes():
    stream = RationalExpander(F(7, 3), 5, Algorithm.BROWKIN1)
    trace = run((2, 1, 1, 3), stream)
    gamma = (2 * F(7, 3) + 1) / (F(7, 3) + 3)
    assert trace.status is RunStatus.FINISHED
    assert trace.outputs == RationalExpander(gamma, 5, Algorithm.BROWKIN1).take(100)
    # the Ruban expansion of the same value never ends
    ruban = run((2, 1, 1, 3), RationalExpander(F(7, 3), 5), max_outputs=40)
    assert ruban.status is RunStatus.OUTPUT_LIMIT
    assert ruban.outputs == RationalExpander(gamma, 5).take(40)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=4, max_size=4),
       st.fractions(min_value=-100, max_value=100, max_denominator=100),
       st.sampled_from([Algorithm.RUBAN, Algorithm.BROWKIN1]),
       st.sampled_from(["standard", "exact"]))
def test_rational_oracle(c, alpha, algo, rule):
    x, y, z, t = c
    if x * t == y * z or z * alpha + t == 0:
        return
    gamma = (x * alpha + y) / (z * alpha + t)
    stream = RationalExpander(alpha, 5, algo)
    if stream.nonterminating_cycle is None and len(stream.take(200)) >= 200:
        return
    trace = run(c, stream, max_inputs=2000, max_outputs=200, rule=rule)
    ref = RationalExpander(gamma, 5, algo).take(200)
    assert trace.outputs == ref[:len(trace.outputs)]
    if trace.status is RunStatus.FINISHED:
        assert trace.outputs == ref


@pytest.mark.parametrize("algo", [Algorithm.RUBAN, Algorithm.BROWKIN1, Algorithm.MR])
@pytest.mark.parametrize("rule", ["standard", "exact"])
def test_surd_oracle_prefix(algo, rule):
    rng = random.Random(5)
    alpha = QuadraticSurd.sqrt(95, 13)
    for _ in range(10):
        c = [rng.randint(-50, 50) for _ in range(4)]
        if c[0] * c[3] == c[1] * c[2]:
            continue
        gamma = (alpha * c[0] + c[1]) / (alpha * c[2] + c[3])
        trace = run(c, SurdExpander(alpha, algo), max_inputs=400, max_outputs=20, rule=rule)
        ref = SurdExpander(gamma, algo).take(20)
        assert trace.outputs == ref[:len(trace.outputs)]
        assert len(trace.outputs) > 0


def test_exact_tail_of_explicit_stream():
    stream = ExplicitStream([1, F(1, 5), F(2, 5)], 5, Algorithm.BROWKIN1)
    value = 1 + 1 / (F(1, 5) + 1 / F(2, 5))
    trace = run((0, 1, 1, 0), stream)
    assert trace.status is RunStatus.FINISHED
    assert trace.outputs == RationalExpander(1 / value, 5, Algorithm.BROWKIN1).take(50)


def test_engine_validation():
    stream = RationalExpander(2, 5)
    with pytest.raises(SingularMatrixError):
        MoebiusEngine((1, 2, 2, 4), stream)
    with pytest.raises(ValueError):
        MoebiusEngine((1, 0, 0, 1), stream, rule="fast")
    with pytest.raises(ValueError):
        run((1, 0, 0, 1), stream, max_inputs=-1)


def test_trace_serialization():
    trace = run((1, 0, 0, 1), RationalExpander(F(7, 3), 5), record_states=True)
    data = trace.to_json()
    assert data[0]["type"] == EventType.CONSUMED_INPUT.value
    assert all(ev.state is not None for ev in trace.events)
    assert [e for e, _ in trace.emissions()] == list(range(len(trace.outputs)))
