"""How many digits of 1/a, ab, a+b and xa+y follow from known digit windows.

Every operation evaluates the known parts exactly and then extracts digits;
only the digit count comes from the valuation bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    INF,
    DigitConvention,
    PadicContext,
    PadicDigits,
    digits_of_rational,
    floor_rational,
    vp,
)


@dataclass(frozen=True)
class PropagationResult:
    window: PadicDigits
    determined_count: int

    @property
    def empty(self) -> bool:
        return self.determined_count == 0


def _empty(ctx: PadicContext) -> PropagationResult:
    return PropagationResult(PadicDigits(INF, (), ctx), 0)


def _result(value: Fraction, k, ctx: PadicContext) -> PropagationResult:
    if k == INF or value == 0:
        # the known part vanished; nothing about the leading digit is certain
        return _empty(ctx)
    k = int(k)
    if k <= 0:
        return _empty(ctx)
    return PropagationResult(digits_of_rational(value, ctx, k), k)


def _require(window: PadicDigits, name: str) -> None:
    if len(window) == 0:
        raise ValueError(f"{name} window is empty")


def invert_window(alpha: PadicDigits) -> PropagationResult:
    """Digits of 1/alpha: exactly as many as alpha has."""
    _require(alpha, "alpha")
    known = alpha.reconstruct()
    return _result(1 / known, len(alpha), alpha.context)


def multiply_windows(alpha: PadicDigits, beta: PadicDigits) -> PropagationResult:
    _require(alpha, "alpha")
    _require(beta, "beta")
    _same_context(alpha, beta)
    k = min(len(alpha), len(beta))
    return _result(alpha.reconstruct() * beta.reconstruct(), k, alpha.context)


def add_windows(alpha: PadicDigits, beta: PadicDigits) -> PropagationResult:
    _require(alpha, "alpha")
    _require(beta, "beta")
    _same_context(alpha, beta)
    known = alpha.reconstruct() + beta.reconstruct()
    k = min(alpha.end, beta.end) - vp(known, alpha.context.p)
    return _result(known, k, alpha.context)


def affine_window(x, y, alpha: PadicDigits) -> PropagationResult:
    """Digits of ``x*alpha + y`` for exact rationals x != 0 and y."""
    x, y = Fraction(x), Fraction(y)
    if x == 0:
        raise ValueError("x must be nonzero")
    _require(alpha, "alpha")
    p = alpha.context.p
    known = x * alpha.reconstruct() + y
    k = vp(x, p) + alpha.start + len(alpha) - vp(known, p)
    return _result(known, k, alpha.context)


def unique_bad_quotient(x, y, ctx: PadicContext, convention: DigitConvention | None = None) -> Fraction:
    """The one floor value ``a`` with ``vp(x*a + y) >= vp(x) + 1``.

    That condition says ``a`` agrees with ``-y/x`` in every digit of valuation
    at most zero, so ``a`` is the floor of ``-y/x``.
    """
    conv = ctx.convention if convention is None else convention
    if conv is DigitConvention.BROWKIN_T:
        raise ValueError("the bad quotient is defined for the Ruban and s floors")
    x, y = Fraction(x), Fraction(y)
    if x == 0:
        raise ValueError("x must be nonzero")
    return floor_rational(-y / x, ctx, conv)


def _same_context(a: PadicDigits, b: PadicDigits) -> None:
    if a.context.p != b.context.p or a.context.convention.balanced != b.context.convention.balanced:
        raise ValueError("windows use different primes or digit alphabets")
