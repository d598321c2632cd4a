"""Trace checkers for the two engines.

Each checker walks a trace recorded with ``record_states=True`` and raises
:class:`InvariantViolation` on the first broken property. The semantic
identity needs exact complete quotients, so the streams should be expanders
(rational or quadratic surd inputs).
"""

from __future__ import annotations

from fractions import Fraction

from .bilinear import _view, decide_floor_bilinear, good1, no_carry, rank
from .engine import EventType, Trace
from .expansion import CFStream
from .moebius import good_case
from .padic import vp


class InvariantViolation(AssertionError):
    pass


def _fail(msg, event_no):
    raise InvariantViolation(f"event {event_no}: {msg}")


def _convergent_matrix(outputs):
    """``(A, A', B, B')`` with ``[l_0, ..., l_{k-1}, T] = (A T + A') / (B T + B')``."""
    A, A1, B, B1 = Fraction(1), Fraction(0), Fraction(0), Fraction(1)
    for l in outputs:
        A, A1 = l * A + A1, A
        B, B1 = l * B + B1, B
    return A, A1, B, B1


def _composes_to(gamma, outputs, num, den) -> bool:
    """``gamma == [outputs; num/den]``, cross-multiplied so den = 0 means an infinite tail."""
    A, A1, B, B1 = _convergent_matrix(outputs)
    top = num * A + den * A1
    bottom = num * B + den * B1
    if not bottom:
        return False
    return gamma * bottom == top


def _moebius_parts(state, alpha):
    x, y, z, t = state
    if alpha is None:  # alpha_j is infinite once the last quotient is consumed
        return x, z
    return x * alpha + y, z * alpha + t


def _bilinear_parts(state, alpha, beta):
    x, y, z, t, e, f, g, h = state
    if alpha is None and beta is None:
        return x, e
    if alpha is None:
        return x * beta + y, e * beta + f
    if beta is None:
        return x * alpha + z, e * alpha + g
    return (x * alpha * beta + y * alpha + z * beta + t,
            e * alpha * beta + f * alpha + g * beta + h)


def _states(trace: Trace):
    prev = trace.coeffs
    for n, ev in enumerate(trace.events):
        if ev.state is None:
            raise ValueError("trace was recorded without states")
        yield n, ev, prev
        prev = ev.state


def _r(q, p):
    v = vp(q, p)
    return -v if v < 0 else 0


def check_moebius_trace(trace: Trace, stream: CFStream, gamma) -> int:
    """Semantic identity, good-case persistence and constancy.

    Returns the number of events checked.
    """
    p = trace.p
    outputs = []
    armed = [False, False]  # per row: the persistence hypothesis held since the last output
    for n, ev, before in _states(trace):
        if ev.type is EventType.CONSUMED_INPUT:
            a = ev.quotient
            x, y, z, t = before
            r = _r(a, p)
            for row, (c, d) in enumerate(((x, y), (z, t))):
                if armed[row] and r >= 1 and not vp(c * a, p) < vp(d, p):
                    _fail(f"row {row} left the good case after the persistence hypothesis held", n)
                if r < 1:
                    armed[row] = False  # persistence needs r >= 1 at every step
                elif ev.index >= 1:
                    mu = min(vp(c * a, p), vp(d, p))
                    armed[row] = armed[row] or vp(c * a + d, p) <= mu + r
            if good_case(before, a, p):
                X, _, Z, _ = ev.state
                if vp(Z, p) - vp(X, p) != vp(z, p) - vp(x, p):
                    _fail("vp(z) - vp(x) changed inside the good case", n)
        elif ev.type is EventType.EMITTED_OUTPUT:
            outputs.append(ev.quotient)
            armed = [False, False]
        j = ev.inputs[0]
        num, den = _moebius_parts(ev.state, stream.complete_quotient(j))
        if not _composes_to(gamma, outputs, num, den):
            _fail("the emitted quotients and the state no longer compose to gamma", n)
    return len(trace.events)


def check_bilinear_trace(trace: Trace, alpha: CFStream, beta: CFStream, gamma) -> int:
    """Semantic identity, rank 2, transition conclusions and the fast-path equivalence."""
    p = trace.p
    outputs = []
    for n, ev, before in _states(trace):
        if rank(ev.state) != 2:
            _fail("rank dropped below 2", n)
        ja, jb = ev.inputs
        if ev.type in (EventType.CONSUMED_ALPHA, EventType.CONSUMED_BETA):
            _check_transition(before, ev, alpha, beta, p, n)
        elif ev.type is EventType.EMITTED_OUTPUT:
            outputs.append(ev.quotient)
        qa, qb = alpha.term(ja), beta.term(jb)
        if ev.type is not EventType.SWITCHED_TO_EXACT_TAIL and qa and qb and _r(qa, p) >= 1 and _r(qb, p) >= 1:
            _check_fast_path(ev.state, qa, qb, p, n)
        num, den = _bilinear_parts(ev.state, alpha.complete_quotient(ja), beta.complete_quotient(jb))
        if not _composes_to(gamma, outputs, num, den):
            _fail("the emitted quotients and the state no longer compose to gamma", n)
    return len(trace.events)


def _check_transition(before, ev, alpha, beta, p, n):
    # view in which the consumed variable plays alpha and the other plays beta
    consumed_alpha = ev.type is EventType.CONSUMED_ALPHA
    ja, jb = ev.inputs
    if consumed_alpha:
        q_in, q_next, q_fixed = ev.quotient, alpha.term(ja), beta.term(jb)
    else:
        q_in, q_next, q_fixed = ev.quotient, beta.term(jb), alpha.term(ja)
    if not q_next or not q_fixed or _r(q_in, p) < 1 or _r(q_next, p) < 1 or _r(q_fixed, p) < 1:
        return
    # _view(.., False) exchanges the variables, so a consumed beta reads as alpha
    pre = _view(before, consumed_alpha)
    post = _view(ev.state, consumed_alpha)
    for off in (0, 4):
        x, y, z, t = pre[off:off + 4]
        hyp = (vp(x * q_fixed, p) < vp(y, p) and vp(z * q_fixed, p) < vp(t, p)
               and vp(x * q_in + z, p) == min(vp(x * q_in, p), vp(z, p)))
        if not hyp:
            continue
        X, Y, Z, T = post[off:off + 4]
        if not (vp(X * q_fixed, p) < vp(Y, p) and vp(Z * q_fixed, p) < vp(T, p) and vp(X * q_next, p) < vp(Z, p)):
            _fail("transition conclusions failed after an input", n)


def _check_fast_path(state, a, b, p, n):
    if not good1(state, b, a, p):
        return
    x, e = state[0], state[4]
    if x == 0 or e == 0:
        return
    u = vp(e, p) - vp(x, p)
    fast = min(_r(a, p), _r(b, p)) >= u
    dec = decide_floor_bilinear(state, a, b, p)
    if dec.determinable != fast:
        _fail(f"fast path says {fast}, floor criterion says {dec.determinable}", n)
