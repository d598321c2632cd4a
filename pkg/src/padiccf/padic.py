"""Exact p-adic primitives: valuations, digit windows and the p-adic floors.

All scalars are :class:`fractions.Fraction`. The p-adic valuation of zero is
the float ``INF`` so it takes part in ``min`` and ``<`` like any integer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

INF = math.inf

Number = Union[int, Fraction]


class InsufficientPrecision(ValueError):
    """A digit window does not reach far enough to evaluate a floor."""


class DigitConvention(enum.Enum):
    RUBAN = "ruban"
    BROWKIN_S = "browkin_s"
    BROWKIN_T = "browkin_t"

    @property
    def balanced(self) -> bool:
        return self is not DigitConvention.RUBAN


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PadicContext:
    """An odd prime together with the digit alphabet in use."""

    p: int
    convention: DigitConvention = DigitConvention.RUBAN

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p!r}")
        if self.p == 2:
            raise ValueError("p = 2 is not supported (balanced digits need odd p)")
        if not isinstance(self.convention, DigitConvention):
            object.__setattr__(self, "convention", DigitConvention(self.convention))

    def with_convention(self, convention: DigitConvention) -> "PadicContext":
        return PadicContext(self.p, convention)

    @property
    def alphabet(self) -> range:
        if self.convention.balanced:
            h = (self.p - 1) // 2
            return range(-h, h + 1)
        return range(self.p)


def _as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, (int, Rational)):
        return Fraction(q)
    raise TypeError(f"expected a rational number, got {type(q).__name__}")


def vp_int(n: int, p: int):
    """Exponent of ``p`` in the integer ``n`` (``INF`` for zero)."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(q, p) -> Union[int, float]:
    """p-adic valuation of a rational; ``p`` may be an int or a context."""
    if isinstance(p, PadicContext):
        p = p.p
    q = _as_fraction(q)
    if q == 0:
        return INF
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def split_p(n: int, p: int) -> tuple[int, int]:
    """Return ``(e, m)`` with ``n = p**e * m`` and ``p`` not dividing ``m``."""
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e, n


def _reduce_residue(w: int, modulus: int, balanced: bool) -> int:
    w %= modulus
    if balanced and 2 * w > modulus:
        w -= modulus
    return w


def floor_from_residue(w: int, e: int, p: int, convention: DigitConvention) -> Fraction:
    """Floor of a number ``alpha`` given ``w = p**e * alpha`` modulo a big enough power.

    ``e >= 0`` is the power of ``p`` cleared from the denominator. For the
    Ruban and s floors ``w`` must be known modulo ``p**(e+1)``; for the t floor
    modulo ``p**e``.
    """
    if convention is DigitConvention.BROWKIN_T:
        if e == 0:
            return Fraction(0)
        return Fraction(_reduce_residue(w, p**e, True), p**e)
    return Fraction(_reduce_residue(w, p ** (e + 1), convention.balanced), p**e)


def floor_rational(q, ctx: PadicContext, convention: DigitConvention | None = None) -> Fraction:
    """p-adic floor of an exact rational under ``convention`` (default: the context's)."""
    conv = ctx.convention if convention is None else convention
    q = _as_fraction(q)
    if q == 0:
        return Fraction(0)
    p = ctx.p
    e, d = split_p(q.denominator, p)
    modulus = p ** (e + 1)
    w = q.numerator * pow(d, -1, modulus)
    return floor_from_residue(w, e, p, conv)


def in_representative_set(a, p: int, convention: DigitConvention) -> bool:
    """Membership in R, B or T (Ruban, s and t floor values)."""
    a = _as_fraction(a)
    e, rest = split_p(a.denominator, p)
    if rest != 1:
        return False
    c = a.numerator
    if convention is DigitConvention.RUBAN:
        return 0 <= c < p ** (e + 1)
    if convention is DigitConvention.BROWKIN_S:
        return 2 * abs(c) < p ** (e + 1)
    return 2 * abs(c) < p**e or c == 0


@dataclass(frozen=True)
class PadicDigits:
    """Known leading digits of a p-adic number.

    The window stands for ``sum(digits[i] * p**(start + i))`` plus an unknown
    tail of valuation at least ``start + len(digits)``. An empty window with
    ``start = INF`` represents zero.
    """

    start: Union[int, float]
    digits: tuple[int, ...]
    context: PadicContext

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        alphabet = self.context.alphabet
        for d in self.digits:
            if d not in alphabet:
                raise ValueError(f"digit {d} outside the alphabet for p={self.context.p}")
        if self.digits and self.digits[0] == 0:
            raise ValueError("leading digit of a window must be nonzero")

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def end(self):
        """First valuation not covered by the window."""
        return self.start + len(self.digits)

    def reconstruct(self) -> Fraction:
        if not self.digits:
            return Fraction(0)
        p = self.context.p
        total = sum(d * p**i for i, d in enumerate(self.digits))
        return Fraction(total) * Fraction(p) ** self.start

    def digit_at(self, n: int) -> int:
        if not self.start <= n < self.end:
            raise InsufficientPrecision(f"digit of valuation {n} is not in the window")
        return self.digits[n - self.start]


def digits_of_rational(q, ctx: PadicContext, count: int) -> PadicDigits:
    """First ``count`` digits of ``q`` starting at its valuation."""
    if count < 0:
        raise ValueError("count must be non-negative")
    q = _as_fraction(q)
    if q == 0:
        return PadicDigits(INF, (), ctx)
    p = ctx.p
    start = vp(q, p)
    unit = q / Fraction(p) ** start
    modulus = p**count
    w = unit.numerator * pow(unit.denominator, -1, modulus) % modulus if count else 0
    balanced = ctx.convention.balanced
    out = []
    for _ in range(count):
        c = w % p
        if balanced and 2 * c > p:
            c -= p
        out.append(c)
        w = (w - c) // p
    return PadicDigits(start, tuple(out), ctx)


def _window_floor(window: PadicDigits, upto: int) -> Fraction:
    """Sum of the window digits of valuation <= ``upto``."""
    if len(window) == 0:
        if window.start == INF:
            return Fraction(0)
        if window.start > upto:
            return Fraction(0)
        raise InsufficientPrecision("empty window cannot determine the floor")
    if window.start > upto:
        return Fraction(0)
    if window.end <= upto:
        raise InsufficientPrecision(
            f"window ends at valuation {window.end - 1}, floor needs {upto}"
        )
    p = window.context.p
    total = Fraction(0)
    for n in range(window.start, upto + 1):
        total += window.digit_at(n) * Fraction(p) ** n
    return total


def _floor(alpha, ctx: PadicContext | None, convention: DigitConvention) -> Fraction:
    if isinstance(alpha, PadicDigits):
        if alpha.context.convention.balanced != convention.balanced:
            raise ValueError("window digits use a different representative set")
        upto = -1 if convention is DigitConvention.BROWKIN_T else 0
        return _window_floor(alpha, upto)
    if ctx is None:
        raise TypeError("a context (or prime) is required for rational input")
    if isinstance(ctx, int):
        ctx = PadicContext(ctx, convention)
    return floor_rational(alpha, ctx, convention)


def floor_ruban(alpha, ctx: PadicContext | int | None = None) -> Fraction:
    """Ruban floor: digits of valuation <= 0 with representatives 0..p-1."""
    return _floor(alpha, ctx, DigitConvention.RUBAN)


def floor_s(alpha, ctx: PadicContext | int | None = None) -> Fraction:
    """Browkin s floor: balanced digits of valuation <= 0."""
    return _floor(alpha, ctx, DigitConvention.BROWKIN_S)


def floor_t(alpha, ctx: PadicContext | int | None = None) -> Fraction:
    """Browkin t floor: balanced digits of valuation < 0."""
    return _floor(alpha, ctx, DigitConvention.BROWKIN_T)


def floor_with(alpha, p: int, convention: DigitConvention) -> Fraction:
    return _floor(alpha, PadicContext(p, convention), convention)


def format_fraction(q: Fraction) -> str:
    q = _as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fraction_json(q: Fraction) -> dict:
    q = _as_fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def parse_fraction(text: str) -> Fraction:
    """Parse ``NUM/DEN`` or an integer; floats are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def sum_digits(digits: Sequence[int], start: int, p: int) -> Fraction:
    return sum((Fraction(d) * Fraction(p) ** (start + i) for i, d in enumerate(digits)), Fraction(0))
