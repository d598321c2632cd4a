"""Exact arithmetic in Q(sqrt(D)) embedded in Q_p through a chosen square root.

An element is stored as ``(P + Q*sqrt(D)) / R`` with integers and ``R > 0``,
reduced by the common gcd. The embedding is fixed by ``branch``, the residue
mod p of the p-adic root.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from .padic import (
    INF,
    DigitConvention,
    PadicContext,
    PadicDigits,
    floor_from_residue,
    split_p,
    vp_int,
)

_ROOT_CACHE: dict[tuple[int, int, int], tuple[int, int]] = {}
_ROOT_LOCK = threading.Lock()


def _check_radicand(D: int, p: int) -> None:
    if D <= 0:
        raise ValueError(f"D must be positive, got {D}")
    if math.isqrt(D) ** 2 == D:
        raise ValueError(f"D = {D} is a perfect square")
    if D % p == 0:
        raise ValueError(f"p = {p} divides D = {D}")
    if pow(D, (p - 1) // 2, p) != 1:
        raise ValueError(f"{D} is not a quadratic residue mod {p}")


def square_roots_mod_p(D: int, p: int) -> tuple[int, int]:
    """Both roots of D mod p, smaller first."""
    roots = [r for r in range(1, p) if (r * r - D) % p == 0]
    if len(roots) != 2:
        raise ValueError(f"{D} is not a nonzero quadratic residue mod {p}")
    return roots[0], roots[1]


def hensel_sqrt(D: int, p: int, branch: int, K: int) -> int:
    """Square root of D modulo p**K that is congruent to ``branch`` mod p."""
    if isinstance(p, PadicContext):
        p = p.p
    if K < 0:
        raise ValueError("K must be non-negative")
    if K == 0:
        return 0
    if (branch * branch - D) % p:
        raise ValueError(f"branch {branch} is not a square root of {D} mod {p}")
    branch %= p
    key = (D, p, branch)
    with _ROOT_LOCK:
        have_k, r = _ROOT_CACHE.get(key, (1, branch))
    if have_k < K:
        k = have_k
        while k < K:
            k *= 2
            mod = p**k
            r = (r - (r * r - D) * pow(2 * r, -1, mod)) % mod
        with _ROOT_LOCK:
            if _ROOT_CACHE.get(key, (0, 0))[0] < k:
                _ROOT_CACHE[key] = (k, r)
        have_k = k
    return r % p**K


class QuadraticSurd:
    """An element ``(P + Q*sqrt(D))/R`` of Q(sqrt(D)) inside Q_p."""

    __slots__ = ("P", "Q", "R", "D", "p", "branch")

    def __init__(self, P: int, Q: int, R: int, D: int, p: int, branch: int | None = None, *, _checked=False):
        if not _checked:
            if R == 0:
                raise ZeroDivisionError("denominator is zero")
            _check_radicand(D, p)
            roots = square_roots_mod_p(D, p)
            if branch is None:
                branch = roots[0]
            branch %= p
            if branch not in roots:
                raise ValueError(f"branch {branch} is not a square root of {D} mod {p}")
        if R < 0:
            P, Q, R = -P, -Q, -R
        g = math.gcd(math.gcd(P, Q), R)
        if g > 1:
            P, Q, R = P // g, Q // g, R // g
        self.P, self.Q, self.R, self.D, self.p, self.branch = P, Q, R, D, p, branch

    @classmethod
    def sqrt(cls, D: int, p: int, branch: int | None = None) -> "QuadraticSurd":
        return cls(0, 1, 1, D, p, branch)

    def _new(self, P: int, Q: int, R: int) -> "QuadraticSurd":
        return QuadraticSurd(P, Q, R, self.D, self.p, self.branch, _checked=True)

    def _lift(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if (other.D, other.p, other.branch) != (self.D, self.p, self.branch):
                raise ValueError("surds live in different fields or embeddings")
            return other
        q = Fraction(other)
        return self._new(q.numerator, 0, q.denominator)

    # -- field structure -------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.Q == 0

    def to_fraction(self) -> Fraction:
        if self.Q:
            raise ValueError("surd is irrational")
        return Fraction(self.P, self.R)

    def conjugate(self) -> "QuadraticSurd":
        """Galois conjugate, expressed in the same embedding."""
        return self._new(self.P, -self.Q, self.R)

    def other_branch(self) -> "QuadraticSurd":
        """Same symbolic expression under the other p-adic square root."""
        return QuadraticSurd(self.P, self.Q, self.R, self.D, self.p, self.p - self.branch, _checked=True)

    def norm(self) -> Fraction:
        return Fraction(self.P * self.P - self.D * self.Q * self.Q, self.R * self.R)

    def __add__(self, other):
        o = self._lift(other)
        return self._new(self.P * o.R + o.P * self.R, self.Q * o.R + o.Q * self.R, self.R * o.R)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.P, -self.Q, self.R)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return self._new(
            self.P * o.P + self.D * self.Q * o.Q,
            self.P * o.Q + self.Q * o.P,
            self.R * o.R,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        n = self.P * self.P - self.D * self.Q * self.Q
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # 1/((P+Q√D)/R) = R(P-Q√D)/(P²-DQ²)
        return self._new(self.R * self.P, -self.R * self.Q, n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self.P, self.Q, self.R) == (o.P, o.Q, o.R)

    def __hash__(self):
        if self.Q == 0:
            return hash(Fraction(self.P, self.R))
        return hash((self.P, self.Q, self.R, self.D, self.p, self.branch))

    def __bool__(self):
        return self.P != 0 or self.Q != 0

    def __repr__(self):
        return f"QuadraticSurd(({self.P} + {self.Q}*sqrt({self.D}))/{self.R}, p={self.p}, branch={self.branch})"

    # -- p-adic structure ------------------------------------------------

    def _numerator_mod(self, K: int) -> int:
        """``P + Q*sqrt(D)`` modulo p**K."""
        return (self.P + self.Q * hensel_sqrt(self.D, self.p, self.branch, K)) % self.p**K

    def valuation(self):
        if not self:
            return INF
        if self.Q == 0:
            num_v = vp_int(self.P, self.p)
        else:
            # both conjugates are p-integral, so vp(P+Q√D) <= vp(norm)
            bound = vp_int(self.P * self.P - self.D * self.Q * self.Q, self.p)
            w = self._numerator_mod(bound + 1)
            num_v = vp_int(w, self.p)
        return num_v - vp_int(self.R, self.p)

    def floor(self, convention: DigitConvention) -> Fraction:
        p = self.p
        e, unit = split_p(self.R, p)
        K = e if convention is DigitConvention.BROWKIN_T else e + 1
        if K == 0:
            return Fraction(0)
        mod = p**K
        w = self._numerator_mod(K) * pow(unit, -1, mod)
        return floor_from_residue(w, e, p, convention)

    def digits(self, count: int, convention: DigitConvention = DigitConvention.RUBAN) -> PadicDigits:
        ctx = PadicContext(self.p, convention)
        v = self.valuation()
        if v == INF:
            return PadicDigits(INF, (), ctx)
        p = self.p
        e, unit = split_p(self.R, p)
        # p**(v+e) divides P + Q√D; take count digits past that
        K = v + e + count
        mod = p**K
        w = self._numerator_mod(K) * pow(unit, -1, mod) % mod
        w //= p ** (v + e)
        out = []
        for _ in range(count):
            c = w % p
            if convention.balanced and 2 * c > p:
                c -= p
            out.append(c)
            w = (w - c) // p
        return PadicDigits(v, tuple(out), ctx)

    def approximation(self, K: int) -> Fraction:
        """A rational agreeing with self modulo p**K."""
        p = self.p
        e, unit = split_p(self.R, p)
        mod = p ** (K + e) if K + e > 0 else 1
        w = self._numerator_mod(K + e) * pow(unit, -1, mod) % mod if K + e > 0 else 0
        return Fraction(w, p**e)


def surd_from_spec(a: int, b: int, c: int, D: int, p: int, branch: int | None = None) -> QuadraticSurd:
    """``(a + b*sqrt(D))/c`` with ``b != 0``."""
    if b == 0:
        raise ValueError("b must be nonzero for an irrational surd")
    return QuadraticSurd(a, b, c, D, p, branch)
