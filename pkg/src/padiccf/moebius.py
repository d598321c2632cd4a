"""Streaming p-adic continued fraction of (x*alpha + y)/(z*alpha + t).

The state matrix ``(x, y, z, t)`` always describes the current output tail
as a function of the current input complete quotient ``alpha_j``. Consuming
``a_j`` is a right multiplication, emitting ``l`` a left one; both flip the
sign of the determinant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import (
    EngineEvent,
    EventType,
    RunStatus,
    SingularMatrixError,
    Trace,
    integer_row,
    strip_p,
    vanishes,
)
from .expansion import TERMINATED, Algorithm, CFStream
from .padic import INF, DigitConvention, PadicContext, floor_rational, vp


class Reason(enum.Enum):
    EXACT = "exact"
    PATHOLOGICAL = "pathological"
    CONDITION_FAILED = "condition_failed"
    OK = "ok"


@dataclass(frozen=True)
class FloorDecision:
    determinable: bool
    value: Optional[Fraction]
    v1: object
    v2: object
    m: object
    reason: Reason


class Phase(enum.Enum):
    SEEKING_GOOD_CASE = "seeking_good_case"
    GOOD_CASE = "good_case"
    EXACT_TAIL = "exact_tail"


def _fr4(x, y, z, t):
    return Fraction(x), Fraction(y), Fraction(z), Fraction(t)


def _check_det(x, y, z, t):
    if x * t - y * z == 0:
        raise SingularMatrixError("coefficients (x, y, z, t) have xt - yz = 0")


def decide_floor(x, y, z, t, floor_alpha, p: int, convention: DigitConvention = DigitConvention.RUBAN, exact: bool = False) -> FloorDecision:
    """Is the floor of (x*alpha+y)/(z*alpha+t) fixed by ``floor(alpha)`` alone?

    ``convention`` is the floor used both for alpha and for the image
    (Ruban or Browkin s).
    """
    x, y, z, t = _fr4(x, y, z, t)
    _check_det(x, y, z, t)
    a = Fraction(floor_alpha)
    ctx = PadicContext(p)
    num, den = x * a + y, z * a + t
    if exact:
        if den == 0:
            raise ZeroDivisionError("the transformation has a pole at alpha")
        return FloorDecision(True, floor_rational(num / den, ctx, convention), vp(num, p), vp(den, p), INF, Reason.EXACT)
    v1, v2 = vp(num, p), vp(den, p)
    if v1 >= vp(x, p) + 1 or v2 >= vp(z, p) + 1:
        return FloorDecision(False, None, v1, v2, None, Reason.PATHOLOGICAL)
    m = min(vp(x, p) - v1, vp(z, p) - v2)
    if m >= v2 - v1:
        return FloorDecision(True, floor_rational(num / den, ctx, convention), v1, v2, m, Reason.OK)
    return FloorDecision(False, None, v1, v2, m, Reason.CONDITION_FAILED)


def decide_floor_mr(x, y, z, t, known, knowledge: str, p: int) -> tuple[FloorDecision, FloorDecision]:
    """Decisions for ``(s(gamma), t(gamma))`` given ``s(alpha)`` or ``t(alpha)``.

    ``knowledge`` is ``"s"`` (alpha known modulo p) or ``"t"`` (modulo 1).
    """
    if knowledge not in ("s", "t"):
        raise ValueError("knowledge must be 's' or 't'")
    x, y, z, t = _fr4(x, y, z, t)
    _check_det(x, y, z, t)
    a = Fraction(known)
    ctx = PadicContext(p)
    num, den = x * a + y, z * a + t
    v1, v2 = vp(num, p), vp(den, p)
    slack = 1 if knowledge == "s" else 0
    if v1 >= vp(x, p) + slack or v2 >= vp(z, p) + slack:
        bad = FloorDecision(False, None, v1, v2, None, Reason.PATHOLOGICAL)
        return bad, bad
    m = min(vp(x, p) - v1, vp(z, p) - v2)
    # the image is known modulo p**(v1 - v2 + m + slack)
    need_s = v2 - v1 + 1 - slack
    need_t = need_s - 1
    gamma0 = num / den
    out = []
    for need, conv in ((need_s, DigitConvention.BROWKIN_S), (need_t, DigitConvention.BROWKIN_T)):
        if m >= need:
            out.append(FloorDecision(True, floor_rational(gamma0, ctx, conv), v1, v2, m, Reason.OK))
        else:
            out.append(FloorDecision(False, None, v1, v2, m, Reason.CONDITION_FAILED))
    return out[0], out[1]


def input_transform(state, a):
    x, y, z, t = state
    return (x * a + y, x, z * a + t, z)


def output_transform(state, l):
    x, y, z, t = state
    return (z, t, x - l * z, y - l * t)


def good_case(state, a, p: int) -> bool:
    x, y, z, t = state
    return vp(x * a, p) < vp(y, p) and vp(z * a, p) < vp(t, p)


def is_pathological(state, a, p: int, slack: int = 1) -> bool:
    """Carry-over test; ``slack`` is 1 when alpha is known mod p, 0 when mod 1."""
    x, y, z, t = state
    return vp(x * a + y, p) >= vp(x, p) + slack or vp(z * a + t, p) >= vp(z, p) + slack


def decide_floor_ball(x, y, z, t, floor_alpha, p: int, convention: DigitConvention = DigitConvention.RUBAN,
                      knowledge: str = "s") -> FloorDecision:
    """Exact test: does every alpha with this floor give the same image floor?

    With ``alpha = a + d`` and ``vp(d) >= s`` (s = 1 for a Ruban or s floor,
    0 for a t floor), ``gamma - gamma0 = d*det / (D0*D)``. Away from the pole
    ``vp(D) = vp(D0)``, so the images fill the ball of valuation
    ``s + vp(det) - 2*vp(D0)`` around ``gamma0``.
    """
    x, y, z, t = _fr4(x, y, z, t)
    det = x * t - y * z
    if det == 0:
        raise SingularMatrixError("coefficients (x, y, z, t) have xt - yz = 0")
    s = 1 if knowledge == "s" else 0
    a = Fraction(floor_alpha)
    num, den = x * a + y, z * a + t
    v1, v2 = vp(num, p), vp(den, p)
    if v2 >= vp(z, p) + s:
        return FloorDecision(False, None, v1, v2, None, Reason.PATHOLOGICAL)
    radius = s + vp(det, p) - 2 * v2
    need = 0 if convention is DigitConvention.BROWKIN_T else 1
    if radius >= need:
        return FloorDecision(True, floor_rational(num / den, PadicContext(p), convention), v1, v2, radius, Reason.OK)
    return FloorDecision(False, None, v1, v2, radius, Reason.CONDITION_FAILED)


class MoebiusEngine:
    """Single-use state machine; see :func:`run`."""

    def __init__(self, coeffs, stream: CFStream, max_inputs: int = 10_000, max_outputs: int = 100,
                 stall_window: int = 30, record_states: bool = False, rule: str = "standard",
                 start_output: int = 0):
        if rule not in ("standard", "exact"):
            raise ValueError("rule must be 'standard' or 'exact'")
        self.rule = rule
        x, y, z, t = _fr4(*coeffs)
        _check_det(x, y, z, t)
        if max_inputs < 0 or max_outputs < 0:
            raise ValueError("budgets must be non-negative")
        # projective integer matrix: only the ratio of the entries matters
        self.state = integer_row((x, y, z, t))
        self.stream = stream
        self.p = stream.p
        self.ctx = PadicContext(self.p)
        self.algorithm = stream.algorithm
        self.N = max_inputs
        self.M = max_outputs
        self.W = stall_window
        self.record = record_states
        self.j = 0
        # a collapsed bilinear run continues the output numbering
        self.k = start_output
        self.phase = Phase.SEEKING_GOOD_CASE
        self.trace = Trace(self.p, self.algorithm, self.state)

    # -- bookkeeping -----------------------------------------------------

    def _event(self, kind, index, quotient=None):
        self.trace.events.append(EngineEvent(
            kind, index, quotient,
            self.state if self.record else None,
            (self.j,), self.k,
        ))

    def _consume(self, a) -> bool:
        if self.j >= self.N:
            return False
        n, d = a.numerator, a.denominator
        x, y, z, t = self.state
        self.state = strip_p((x * n + y * d, x * d, z * n + t * d, z * d), self.p)
        self.j += 1
        self._event(EventType.CONSUMED_INPUT, self.j - 1, a)
        return True

    def _emit(self, l):
        self.trace.outputs.append(l)
        n, d = l.numerator, l.denominator
        x, y, z, t = self.state
        self.state = strip_p((z * d, t * d, x * d - n * z, y * d - n * t), self.p)
        self.k += 1
        self._event(EventType.EMITTED_OUTPUT, self.k - 1, l)

    def _stop(self, status: RunStatus):
        self.trace.status = status
        self.trace.inputs_consumed = (self.j,)
        kind = EventType.INPUT_BUDGET_EXHAUSTED if status is RunStatus.INPUT_BUDGET_EXHAUSTED else EventType.FINISHED
        self._event(kind, self.k)
        return self.trace

    # -- main loop -------------------------------------------------------

    def run(self) -> Trace:
        streak = 0
        while True:
            if self.k >= self.M:
                return self._stop(RunStatus.OUTPUT_LIMIT)
            if self.phase is Phase.EXACT_TAIL:
                if self._exact_step():
                    return self._stop(RunStatus.FINISHED)
                continue
            a = self.stream.term(self.j)
            if a is TERMINATED:
                raise ValueError("input stream is empty")
            if self.stream.is_last(self.j):
                if not self._consume(a):
                    return self._stop(RunStatus.INPUT_BUDGET_EXHAUSTED)
                self.phase = Phase.EXACT_TAIL
                self._event(EventType.SWITCHED_TO_EXACT_TAIL, self.j - 1, a)
                continue

            knowledge = "t" if self.algorithm.convention(self.j) is DigitConvention.BROWKIN_T else "s"
            pathological = is_pathological(self.state, a, self.p, 1 if knowledge == "s" else 0)
            if pathological:
                streak += 1
                if streak >= self.W:
                    streak = 0
                    verdict = self._vanishing_check()
                    if verdict is not None:
                        return self._stop(verdict)
            else:
                streak = 0

            if self.rule == "exact":
                emitted = self._ball_step(a, knowledge)
            elif pathological:
                emitted = False
            elif self.algorithm is Algorithm.MR:
                emitted = self._mr_step(a, knowledge)
            else:
                emitted = self._algorithm1_step(a)
            if not emitted and not self._consume(a):
                return self._stop(RunStatus.INPUT_BUDGET_EXHAUSTED)

    def _algorithm1_step(self, a) -> bool:
        """Good-case emission rule; False means consume ``a``."""
        if not good_case(self.state, a, self.p):
            self.phase = Phase.SEEKING_GOOD_CASE
            return False
        self.phase = Phase.GOOD_CASE
        x, y, z, t = self.state
        u = vp(z, self.p) - vp(x, self.p)
        if u < 0:
            # vp(gamma) = -u > 0, so the floor is 0
            self._emit(Fraction(0))
            return True
        if -vp(a, self.p) < u:
            return False
        conv = self.algorithm.convention(self.k)
        l = floor_rational((x * a + y) / (z * a + t), self.ctx, conv)
        dec = decide_floor(x, y, z, t, a, self.p, conv)
        if not dec.determinable or dec.value != l:
            raise AssertionError(f"emission rule disagrees with the floor criterion at output {self.k}")
        self._emit(l)
        return True

    def _mr_step(self, a, knowledge: str) -> bool:
        x, y, z, t = self.state
        ds, dt = decide_floor_mr(x, y, z, t, a, knowledge, self.p)
        target = ds if self.k % 2 == 0 else dt
        if target.determinable:
            self._emit(target.value)
            return True
        return False

    def _ball_step(self, a, knowledge: str) -> bool:
        x, y, z, t = self.state
        dec = decide_floor_ball(x, y, z, t, a, self.p, self.algorithm.convention(self.k), knowledge)
        if dec.determinable:
            self._emit(dec.value)
            return True
        return False

    def _exact_step(self) -> bool:
        """One output of the exact rational tail; True when finished."""
        x, y, z, t = self.state
        # the input is used up, so the tail value is x/z
        if z == 0:
            if self.k == 0:
                raise ZeroDivisionError("the transformation has a pole at alpha")
            return True
        g = Fraction(x, z)
        self._emit(floor_rational(g, self.ctx, self.algorithm.convention(self.k)))
        return False

    def _vanishing_check(self) -> Optional[RunStatus]:
        x, y, z, t = self.state
        if vanishes(self.stream, self.j, x, y):
            if self.k > 0:
                raise AssertionError("an output tail cannot vanish")
            self._emit(Fraction(0))
            return RunStatus.FINISHED
        if vanishes(self.stream, self.j, z, t):
            if self.k == 0:
                raise ZeroDivisionError("the transformation has a pole at alpha")
            # the previous output was the exact value of its tail
            return RunStatus.FINISHED
        return None


def run(coeffs, stream: CFStream, max_inputs: int = 10_000, max_outputs: int = 100,
        stall_window: int = 30, record_states: bool = False, rule: str = "standard") -> Trace:
    """Run the Möbius engine and return its trace.

    ``rule="standard"`` follows the good-case emission rule (Ruban, Browkin I)
    or the s/t determinability thresholds (MR). ``rule="exact"`` emits as soon
    as the residue-ball test of :func:`decide_floor_ball` proves the floor.
    """
    return MoebiusEngine(coeffs, stream, max_inputs, max_outputs, stall_window, record_states, rule).run()
