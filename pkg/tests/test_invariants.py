import dataclasses
import random
from fractions import Fraction

import pytest

from padiccf.bilinear import rank, run_bilinear
from padiccf.engine import EventType
from padiccf.expansion import Algorithm, RationalExpander, SurdExpander
from padiccf.invariants import InvariantViolation, check_bilinear_trace, check_moebius_trace
from padiccf.moebius import run
from padiccf.surd import QuadraticSurd


@pytest.mark.parametrize("algo", list(Algorithm))
@pytest.mark.parametrize("rule", ["standard", "exact"])
def test_moebius_traces_hold(algo, rule):
    rng = random.Random(11)
    alpha = QuadraticSurd.sqrt(95, 13)
    for _ in range(5):
        c = [rng.randint(-200, 200) for _ in range(4)]
        if c[0] * c[3] == c[1] * c[2]:
            continue
        gamma = (alpha * c[0] + c[1]) / (alpha * c[2] + c[3])
        stream = SurdExpander(alpha, algo)
        trace = run(c, stream, max_inputs=300, max_outputs=20, record_states=True, rule=rule)
        assert check_moebius_trace(trace, stream, gamma) == len(trace.events)


def test_rational_trace_with_finite_tail():
    stream = RationalExpander(Fraction(7, 3), 5, Algorithm.BROWKIN1)
    trace = run((2, 1, 1, 3), stream, record_states=True)
    gamma = (2 * Fraction(7, 3) + 1) / (Fraction(7, 3) + 3)
    check_moebius_trace(trace, stream, gamma)


def test_tampered_output_is_caught():
    alpha = QuadraticSurd.sqrt(2, 7)
    stream = SurdExpander(alpha)
    trace = run((1, 2, 3, 5), stream, max_outputs=5, record_states=True)
    gamma = (alpha + 2) / (alpha * 3 + 5)
    for n, ev in enumerate(trace.events):
        if ev.type is EventType.EMITTED_OUTPUT:
            trace.events[n] = dataclasses.replace(ev, quotient=ev.quotient + 1)
            break
    with pytest.raises(InvariantViolation):
        check_moebius_trace(trace, stream, gamma)


def test_states_required():
    stream = SurdExpander(QuadraticSurd.sqrt(2, 7))
    trace = run((1, 0, 0, 1), stream, max_outputs=2)
    with pytest.raises(ValueError):
        check_moebius_trace(trace, stream, QuadraticSurd.sqrt(2, 7))


@pytest.mark.parametrize("rule", ["standard", "exact"])
def test_bilinear_traces_hold(rule):
    rng = random.Random(4)
    alpha = QuadraticSurd.sqrt(2, 7)
    done = 0
    while done < 5:
        c = [rng.randint(-100, 100) for _ in range(8)]
        beta = (alpha * rng.randint(1, 5) + rng.randint(-5, 5)) / (alpha * rng.randint(-5, 5) + rng.randint(1, 5))
        den = alpha * beta * c[4] + alpha * c[5] + beta * c[6] + c[7]
        if rank(c) != 2 or not den:
            continue
        gamma = (alpha * beta * c[0] + alpha * c[1] + beta * c[2] + c[3]) / den
        sa, sb = SurdExpander(alpha), SurdExpander(beta)
        trace = run_bilinear(c, sa, sb, max_inputs=800, max_outputs=15, record_states=True, rule=rule)
        check_bilinear_trace(trace, sa, sb, gamma)
        done += 1


def test_bilinear_wrong_gamma_is_caught():
    alpha = QuadraticSurd.sqrt(2, 7)
    sa, sb = SurdExpander(alpha), SurdExpander(alpha + 1)
    trace = run_bilinear((1, 0, 0, 0, 0, 0, 0, 1), sa, sb, max_outputs=3, record_states=True, rule="exact")
    with pytest.raises(InvariantViolation):
        check_bilinear_trace(trace, sa, sb, alpha * alpha)
