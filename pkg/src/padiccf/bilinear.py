"""Streaming p-adic continued fraction of a bilinear fractional transformation

    gamma = (x*a*b + y*a + z*b + t) / (e*a*b + f*a + g*b + h)

of two streams alpha and beta. The state is the 2x4 matrix of coefficients
acting on the current complete quotients ``(alpha_ja, beta_jb)``.
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
)
from .expansion import TERMINATED, Algorithm, CFStream, TailStream
from .moebius import MoebiusEngine
from .padic import INF, DigitConvention, PadicContext, PadicDigits, floor_rational, vp
from .propagation import PropagationResult, _result


def rank(state) -> int:
    top, bottom = state[:4], state[4:]
    if any(top[i] * bottom[j] - top[j] * bottom[i] for i in range(4) for j in range(i + 1, 4)):
        return 2
    return 1 if any(state) else 0


def _check_rank(state):
    if rank(state) != 2:
        raise SingularMatrixError("the 2x4 coefficient matrix must have rank 2")


def bilinear_form(x, y, z, t, a, b):
    return x * a * b + y * a + z * b + t


def alpha_input(state, a):
    x, y, z, t, e, f, g, h = state
    return (x * a + z, y * a + t, x, y, e * a + g, f * a + h, e, f)


def beta_input(state, b):
    x, y, z, t, e, f, g, h = state
    return (x * b + y, x, z * b + t, z, e * b + f, e, g * b + h, g)


def bilinear_output(state, l):
    x, y, z, t, e, f, g, h = state
    return (e, f, g, h, x - l * e, y - l * f, z - l * g, t - l * h)


def bilinear_digit_count(x, y, z, t, alpha: PadicDigits, beta: PadicDigits) -> PropagationResult:
    """Digits of ``x*alpha*beta + y*alpha + z*beta + t`` fixed by two windows.

    ``k = M - v`` where v is the valuation of the form at the known parts
    and M the first valuation that some unknown digit can reach.
    """
    if not len(alpha) or not len(beta):
        raise ValueError("windows must be nonempty")
    p = alpha.context.p
    x, y, z, t = (Fraction(c) for c in (x, y, z, t))
    ra, rb = -alpha.start, -beta.start
    ha, hb = len(alpha), len(beta)
    M = min(
        vp(x, p) - ra - rb + min(ha, hb),
        vp(y, p) - ra + ha,
        vp(z, p) - rb + hb,
    )
    known = bilinear_form(x, y, z, t, alpha.reconstruct(), beta.reconstruct())
    return _result(known, M - vp(known, p), alpha.context)


class BilinearReason(enum.Enum):
    NO_DIGITS = "no_digits"
    CONDITION_FAILED = "condition_failed"
    POLE = "pole"
    OK = "ok"


@dataclass(frozen=True)
class BilinearFloorDecision:
    determinable: bool
    value: Optional[Fraction]
    v1: object
    v2: object
    M_num: object
    M_den: object
    k_num: object
    k_den: object
    reason: BilinearReason


def _floor_knowledge_M(x, y, z, ra, rb, p):
    # known digits h = r + 1 for both inputs
    return min(vp(x, p) + 1 - max(ra, rb), vp(y, p) + 1, vp(z, p) + 1)


def decide_floor_bilinear(state, floor_alpha, floor_beta, p: int,
                          convention: DigitConvention = DigitConvention.RUBAN) -> BilinearFloorDecision:
    """Is the image floor fixed by ``floor(alpha)`` and ``floor(beta)``?"""
    x, y, z, t, e, f, g, h = (Fraction(c) for c in state)
    _check_rank((x, y, z, t, e, f, g, h))
    a, b = Fraction(floor_alpha), Fraction(floor_beta)
    ra, rb = max(0, -vp(a, p)), max(0, -vp(b, p))
    num = bilinear_form(x, y, z, t, a, b)
    den = bilinear_form(e, f, g, h, a, b)
    v1, v2 = vp(num, p), vp(den, p)
    M_num = _floor_knowledge_M(x, y, z, ra, rb, p)
    M_den = _floor_knowledge_M(e, f, g, ra, rb, p)
    k_num, k_den = M_num - v1, M_den - v2
    fields = (v1, v2, M_num, M_den, k_num, k_den)
    if k_num <= 0 or k_den <= 0:
        return BilinearFloorDecision(False, None, *fields, BilinearReason.NO_DIGITS)
    if v1 - v2 + min(k_num, k_den) - 1 >= 0:
        value = floor_rational(num / den, PadicContext(p), convention)
        return BilinearFloorDecision(True, value, *fields, BilinearReason.OK)
    return BilinearFloorDecision(False, None, *fields, BilinearReason.CONDITION_FAILED)


def ball_error_terms(state, a, b, p: int):
    """Valuations bounding ``gamma - gamma0`` over alpha in a+pZ_p, beta in b+pZ_p.

    Returns ``(alpha_term, beta_term, radius)`` or None when the denominator
    can vanish on the polydisc. The image differs from gamma0 by at least
    valuation ``radius``, attained somewhere.
    """
    x, y, z, t, e, f, g, h = (Fraction(c) for c in state)
    a, b = Fraction(a), Fraction(b)
    N0 = bilinear_form(x, y, z, t, a, b)
    D0 = bilinear_form(e, f, g, h, a, b)
    v2 = vp(D0, p)
    if min(vp(e * b + f, p) + 1, vp(e * a + g, p) + 1, vp(e, p) + 2) <= v2:
        return None
    A = (x * b + y) * D0 - (e * b + f) * N0
    B = (x * a + z) * D0 - (e * a + g) * N0
    C = x * D0 - e * N0
    ta, tb, tc = vp(A, p) + 1, vp(B, p) + 1, vp(C, p) + 2
    return ta - 2 * v2, tb - 2 * v2, min(ta, tb, tc) - 2 * v2


def decide_floor_bilinear_ball(state, a, b, p: int, convention: DigitConvention = DigitConvention.RUBAN) -> BilinearFloorDecision:
    """Exact counterpart of :func:`decide_floor_bilinear`."""
    x, y, z, t, e, f, g, h = (Fraction(c) for c in state)
    _check_rank((x, y, z, t, e, f, g, h))
    a, b = Fraction(a), Fraction(b)
    num = bilinear_form(x, y, z, t, a, b)
    den = bilinear_form(e, f, g, h, a, b)
    v1, v2 = vp(num, p), vp(den, p)
    terms = ball_error_terms(state, a, b, p)
    if terms is None:
        return BilinearFloorDecision(False, None, v1, v2, None, None, None, None, BilinearReason.POLE)
    radius = terms[2]
    if radius >= 1:
        value = floor_rational(num / den, PadicContext(p), convention)
        return BilinearFloorDecision(True, value, v1, v2, None, None, radius, radius, BilinearReason.OK)
    return BilinearFloorDecision(False, None, v1, v2, None, None, radius, radius, BilinearReason.CONDITION_FAILED)


# the engine reads the state through a view in which the lead variable plays
# the role of beta; swapping y<->z and f<->g exchanges the two variables
def _view(state, lead_is_beta: bool):
    if lead_is_beta:
        return state
    x, y, z, t, e, f, g, h = state
    return (x, z, y, t, e, g, f, h)


def _pair_ok(c, d, q, p) -> bool:
    """vp(c*q) < vp(d), with both coefficients zero counting as satisfied."""
    if c == 0 and d == 0:
        return True
    return vp(c * q, p) < vp(d, p)


def hp_good_case(view, q_lead, p) -> bool:
    x, y, z, t, e, f, g, h = view
    return all(_pair_ok(c, d, q_lead, p) for c, d in ((x, y), (z, t), (e, f), (g, h)))


def no_carry(view, q_other, p) -> bool:
    x, y, z, t, e, f, g, h = view
    return all(
        vp(c * q_other + d, p) == min(vp(c * q_other, p), vp(d, p))
        for c, d in ((x, z), (e, g))
    )


def good1(view, q_lead, q_other, p) -> bool:
    x, y, z, t, e, f, g, h = view
    return (
        _pair_ok(x, y, q_lead, p) and _pair_ok(z, t, q_lead, p) and _pair_ok(x, z, q_other, p)
        and _pair_ok(e, f, q_lead, p) and _pair_ok(g, h, q_lead, p) and _pair_ok(e, g, q_other, p)
    )


class _Phase(enum.Enum):
    SEEK_LEAD = "seek_lead"
    EXTRA_LEAD = "extra_lead"
    CHECK_CARRY = "check_carry"
    TARGET = "target"


class BilinearEngine:
    """Single-use state machine; see :func:`run_bilinear`."""

    def __init__(self, coeffs, alpha: CFStream, beta: CFStream, max_inputs: int = 10_000,
                 max_outputs: int = 100, max_swaps: int = 64, record_states: bool = False,
                 rule: str = "standard", stall_window: int = 30):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != 8:
            raise ValueError("need 8 coefficients x,y,z,t,e,f,g,h")
        _check_rank(coeffs)
        if alpha.p != beta.p:
            raise ValueError("streams use different primes")
        if alpha.algorithm is not beta.algorithm:
            raise ValueError("streams use different algorithms")
        if alpha.algorithm is Algorithm.MR:
            raise ValueError("the bilinear engine supports Ruban and Browkin I streams")
        if rule not in ("standard", "exact"):
            raise ValueError("rule must be 'standard' or 'exact'")
        self.state = integer_row(coeffs)
        self.alpha, self.beta = alpha, beta
        self.p = alpha.p
        self.ctx = PadicContext(self.p)
        self.algorithm = alpha.algorithm
        self.conv = self.algorithm.convention(0)
        self.N, self.M, self.S = max_inputs, max_outputs, max_swaps
        self.W = stall_window
        self.record = record_states
        self.rule = rule
        self.ja = self.jb = 0
        self.k = 0
        self.lead_is_beta = True
        self.phase = _Phase.SEEK_LEAD
        self.swaps_since_output = 0
        self.trace = Trace(self.p, self.algorithm, self.state)

    # -- bookkeeping -----------------------------------------------------

    def _event(self, kind, index, quotient=None, state=None):
        self.trace.events.append(EngineEvent(
            kind, index, quotient,
            (state if state is not None else self.state) if self.record else None,
            (self.ja, self.jb), self.k,
        ))

    @property
    def used(self) -> int:
        return self.ja + self.jb

    def _consume(self, which: str) -> bool:
        if self.used >= self.N:
            return False
        x, y, z, t, e, f, g, h = self.state
        if which == "alpha":
            a = self.alpha.term(self.ja)
            n, d = a.numerator, a.denominator
            new = (x * n + z * d, y * n + t * d, x * d, y * d, e * n + g * d, f * n + h * d, e * d, f * d)
            self.ja += 1
            kind, index, q = EventType.CONSUMED_ALPHA, self.ja - 1, a
        else:
            b = self.beta.term(self.jb)
            n, d = b.numerator, b.denominator
            new = (x * n + y * d, x * d, z * n + t * d, z * d, e * n + f * d, e * d, g * n + h * d, g * d)
            self.jb += 1
            kind, index, q = EventType.CONSUMED_BETA, self.jb - 1, b
        self.state = strip_p(new, self.p)
        self._event(kind, index, q)
        return True

    def _consume_lead(self) -> bool:
        return self._consume("beta" if self.lead_is_beta else "alpha")

    def _consume_other(self) -> bool:
        return self._consume("alpha" if self.lead_is_beta else "beta")

    def _emit(self, l: Fraction):
        self.trace.outputs.append(l)
        x, y, z, t, e, f, g, h = self.state
        n, d = l.numerator, l.denominator
        self.state = strip_p(
            (e * d, f * d, g * d, h * d, x * d - n * e, y * d - n * f, z * d - n * g, t * d - n * h), self.p
        )
        self.k += 1
        self.swaps_since_output = 0
        self.phase = _Phase.SEEK_LEAD
        self._event(EventType.EMITTED_OUTPUT, self.k - 1, l)

    def _stop(self, status: RunStatus) -> Trace:
        self.trace.status = status
        self.trace.inputs_consumed = (self.ja, self.jb)
        kind = {
            RunStatus.INPUT_BUDGET_EXHAUSTED: EventType.INPUT_BUDGET_EXHAUSTED,
            RunStatus.STALLED: EventType.STALLED,
        }.get(status, EventType.FINISHED)
        self._event(kind, self.k)
        return self.trace

    # -- main loop -------------------------------------------------------

    def run(self) -> Trace:
        while True:
            if self.k >= self.M:
                return self._stop(RunStatus.OUTPUT_LIMIT)
            a = self.alpha.term(self.ja)
            b = self.beta.term(self.jb)
            if a is TERMINATED or b is TERMINATED:
                raise ValueError("input stream is empty")
            if self.alpha.is_last(self.ja):
                return self._collapse("alpha")
            if self.beta.is_last(self.jb):
                return self._collapse("beta")

            if self.rule == "exact":
                dec = decide_floor_bilinear_ball(self.state, a, b, self.p, self.conv)
                if dec.determinable:
                    self._emit(dec.value)
                    continue
                if not self._consume(self._exact_choice(a, b)):
                    return self._stop(RunStatus.INPUT_BUDGET_EXHAUSTED)
                continue

            dec = decide_floor_bilinear(self.state, a, b, self.p, self.conv)
            if dec.determinable:
                self._emit(dec.value)
                continue
            step = self._standard_step(a, b)
            if step is None:
                return self._stop(RunStatus.STALLED)
            if not step:
                return self._stop(RunStatus.INPUT_BUDGET_EXHAUSTED)

    def _exact_choice(self, a, b) -> str:
        p = self.p
        terms = ball_error_terms(self.state, a, b, p)
        if terms is None:
            # refine whichever input moves the denominator onto zero
            x, y, z, t, e, f, g, h = self.state
            v2 = vp(bilinear_form(e, f, g, h, a, b), p)
            if vp(e * b + f, p) + 1 <= v2:
                return "alpha"
            if vp(e * a + g, p) + 1 <= v2:
                return "beta"
        else:
            ta, tb, radius = terms
            if min(ta, tb) <= radius:
                return "alpha" if ta <= tb else "beta"
        # only the cross term binds: both inputs must shrink
        return "alpha" if self.ja <= self.jb else "beta"

    def _standard_step(self, a, b):
        """Pick and consume one input; False on budget, None on stall."""
        q_lead, q_other = (b, a) if self.lead_is_beta else (a, b)
        view = _view(self.state, self.lead_is_beta)
        if self.phase is _Phase.SEEK_LEAD:
            if hp_good_case(view, q_lead, self.p):
                self.phase = _Phase.EXTRA_LEAD
            return self._consume_lead()
        if self.phase is _Phase.EXTRA_LEAD:
            self.phase = _Phase.CHECK_CARRY
        if self.phase is _Phase.CHECK_CARRY:
            if no_carry(view, q_other, self.p):
                self.phase = _Phase.TARGET
                return self._consume_other()
            self.swaps_since_output += 1
            if self.swaps_since_output > self.S:
                return None
            self.lead_is_beta = not self.lead_is_beta
            self.phase = _Phase.SEEK_LEAD
            self._event(EventType.SWAPPED_ROLES, self.swaps_since_output)
            return True
        # TARGET: grow both valuations past u = vp(e) - vp(x)
        x, e = view[0], view[4]
        u = vp(e, self.p) - vp(x, self.p)
        if u < 0 and good1(view, q_lead, q_other, self.p):
            # vp(gamma) = -u > 0
            self._emit(Fraction(0))
            return True
        if -vp(q_other, self.p) < u:
            return self._consume_other()
        if -vp(q_lead, self.p) < u:
            return self._consume_lead()
        # thresholds met without a verdict: Good1 failed, start over
        self.phase = _Phase.SEEK_LEAD
        return self._consume_lead()

    def _collapse(self, which: str) -> Trace:
        """One input is exact: finish with a Möbius engine on the other."""
        if self.used >= self.N:
            return self._stop(RunStatus.INPUT_BUDGET_EXHAUSTED)
        self._consume(which)
        self._event(EventType.SWITCHED_TO_EXACT_TAIL, (self.ja if which == "alpha" else self.jb) - 1)
        x, y, z, t, e, f, g, h = self.state
        # the consumed variable is now infinite, leaving its leading coefficients
        if which == "alpha":
            coeffs, other, j0 = (x, y, e, f), self.beta, self.jb
        else:
            coeffs, other, j0 = (x, z, e, g), self.alpha, self.ja
        if coeffs[0] * coeffs[3] - coeffs[1] * coeffs[2] == 0:
            raise SingularMatrixError("the collapsed transformation is degenerate")
        engine = MoebiusEngine(coeffs, TailStream(other, j0), max_inputs=self.N - self.used,
                               max_outputs=self.M, stall_window=self.W, record_states=self.record,
                               rule=self.rule, start_output=self.k)
        sub = engine.run()
        for ev in sub.events:
            j = j0 + ev.inputs[0]
            ja, jb = (self.ja, j) if which == "alpha" else (j, self.jb)
            kind = ev.type
            if kind is EventType.CONSUMED_INPUT:
                kind = EventType.CONSUMED_BETA if which == "alpha" else EventType.CONSUMED_ALPHA
                index = j0 + ev.index
            else:
                index = ev.index
            state = None
            if ev.state is not None:
                X, Y, Z, T = ev.state
                # embed the Möbius state as a bilinear one that ignores the spent variable
                state = (0, 0, X, Y, 0, 0, Z, T) if which == "alpha" else (0, X, 0, Y, 0, Z, 0, T)
            self.trace.events.append(EngineEvent(kind, index, ev.quotient, state, (ja, jb), ev.outputs))
        self.trace.outputs.extend(sub.outputs)
        self.k += len(sub.outputs)
        if which == "alpha":
            self.jb = j0 + sub.inputs_consumed[0]
        else:
            self.ja = j0 + sub.inputs_consumed[0]
        self.trace.status = sub.status
        self.trace.inputs_consumed = (self.ja, self.jb)
        return self.trace


def run_bilinear(coeffs, alpha: CFStream, beta: CFStream, max_inputs: int = 10_000, max_outputs: int = 100,
                 max_swaps: int = 64, record_states: bool = False, rule: str = "standard") -> Trace:
    """Run the bilinear engine; ``coeffs`` is ``(x, y, z, t, e, f, g, h)``."""
    return BilinearEngine(coeffs, alpha, beta, max_inputs, max_outputs, max_swaps, record_states, rule).run()
