"""Pieces shared by the Möbius and bilinear engines: events, traces, exact checks."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .expansion import TERMINATED, Algorithm, CFStream, RationalExpander
from .padic import fraction_json


class SingularMatrixError(ValueError):
    """The coefficient matrix does not have full rank."""


class EventType(enum.Enum):
    CONSUMED_INPUT = "ConsumedInput"
    CONSUMED_ALPHA = "ConsumedAlphaInput"
    CONSUMED_BETA = "ConsumedBetaInput"
    EMITTED_OUTPUT = "EmittedOutput"
    SWITCHED_TO_EXACT_TAIL = "SwitchedToExactTail"
    SWAPPED_ROLES = "SwappedRoles"
    FINISHED = "Finished"
    INPUT_BUDGET_EXHAUSTED = "InputBudgetExhausted"
    STALLED = "Stalled"


class RunStatus(enum.Enum):
    FINISHED = "finished"  # the output expansion ended exactly
    OUTPUT_LIMIT = "output_limit"  # max_outputs reached
    INPUT_BUDGET_EXHAUSTED = "input_budget_exhausted"
    STALLED = "stalled"  # bilinear swap bound hit


@dataclass(frozen=True)
class EngineEvent:
    type: EventType
    index: int
    quotient: Optional[Fraction] = None
    # matrix after the event, plus the input counters (j, or (j_alpha, j_beta))
    state: Optional[tuple] = None
    inputs: Optional[tuple] = None
    outputs: int = 0

    def to_json(self) -> dict:
        return {
            "type": self.type.value,
            "index": self.index,
            "quotient": None if self.quotient is None else fraction_json(self.quotient),
        }


@dataclass
class Trace:
    p: int
    algorithm: Algorithm
    coeffs: tuple
    events: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    status: Optional[RunStatus] = None
    inputs_consumed: tuple = (0,)

    @property
    def stalled(self) -> bool:
        """Budget hit (or swap bound hit) without any output."""
        return self.status in (RunStatus.INPUT_BUDGET_EXHAUSTED, RunStatus.STALLED) and not self.outputs

    def to_json(self) -> list:
        return [e.to_json() for e in self.events]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    def emissions(self) -> list[tuple[int, tuple]]:
        """(output index, input counters at emission) for each emitted quotient."""
        return [(e.index, e.inputs) for e in self.events if e.type is EventType.EMITTED_OUTPUT]


def stream_algorithm_check(stream: CFStream, allow_mr: bool = True) -> None:
    if not allow_mr and stream.algorithm is Algorithm.MR:
        raise ValueError("this engine supports only Ruban and Browkin I streams")


def vanishes(stream: CFStream, j: int, x: Fraction, y: Fraction, period_limit: int = 10_000) -> Optional[bool]:
    """Decide exactly whether ``x*alpha_j + y = 0``; None when unknowable."""
    if x == 0:
        return y == 0
    cq = stream.complete_quotient(j)
    if cq is not None:
        return x * cq + y == 0
    structure = stream.periodic_structure()
    if structure is None:
        return None
    pre, period = structure
    target = RationalExpander(-y / x, stream.p, stream.algorithm, start_index=j)
    cycle = target.detect_cycle(period_limit)
    if cycle is None:
        # a finite expansion (or none found in time) never equals an infinite periodic one
        return False if target.terminated_length is not None else None
    rest_pre = max(0, len(pre) - j)
    span = max(cycle[0], rest_pre) + math.lcm(cycle[1], len(period))
    for i in range(span):
        a = stream.term(j + i)
        if a is TERMINATED or a != target.term(i):
            return False
    return True


def cf_compose(outputs, tail):
    """``[l_0, ..., l_{k-1}, tail]`` where ``tail`` may be None for infinity."""
    value = tail
    for l in reversed(outputs):
        if value is None:
            value = Fraction(l)
        elif value == 0:
            value = None
        else:
            value = l + 1 / value
    return value


def integer_row(values) -> tuple[int, ...]:
    """Scale rationals to integers without a common factor (same projective point)."""
    fr = [Fraction(v) for v in values]
    den = math.lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = math.gcd(*ints)
    return tuple(i // g for i in ints) if g > 1 else tuple(ints)


def strip_p(values: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Divide out the common power of p; entries only ever pick up p-power factors."""
    while all(v % p == 0 for v in values):
        values = tuple(v // p for v in values)
    return values
