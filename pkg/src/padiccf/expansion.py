"""Partial-quotient streams and convergents.

A stream is a lazily extended list of partial quotients ``a_0, a_1, ...``.
Expanders (rational or quadratic surd inputs) also expose the exact complete
quotients ``alpha_n``; the engines use them for their exact-tail switch and
for the symbolic vanishing checks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .padic import (
    DigitConvention,
    PadicContext,
    floor_rational,
    fraction_json,
    in_representative_set,
    vp,
)
from .surd import QuadraticSurd


class Algorithm(enum.Enum):
    RUBAN = "ruban"
    BROWKIN1 = "browkin1"
    MR = "mr"

    def convention(self, n: int) -> DigitConvention:
        """Floor used for the n-th partial quotient."""
        if self is Algorithm.RUBAN:
            return DigitConvention.RUBAN
        if self is Algorithm.BROWKIN1 or n % 2 == 0:
            return DigitConvention.BROWKIN_S
        return DigitConvention.BROWKIN_T

    @classmethod
    def parse(cls, text) -> "Algorithm":
        if isinstance(text, Algorithm):
            return text
        key = str(text).strip().lower().replace("_", "").replace("-", "")
        aliases = {"ruban": cls.RUBAN, "browkin1": cls.BROWKIN1, "browkini": cls.BROWKIN1, "browkin": cls.BROWKIN1, "mr": cls.MR}
        if key not in aliases:
            raise ValueError(f"unknown algorithm {text!r}")
        return aliases[key]


class NonTerminatingDetected(Exception):
    """A rational input re-entered an earlier complete quotient."""

    def __init__(self, start: int, period: int):
        super().__init__(f"complete quotients repeat: cycle starts at {start} with period {period}")
        self.start = start
        self.period = period


class _Terminated:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TERMINATED"

    def __bool__(self):
        return False


TERMINATED = _Terminated()


def check_quotient(a: Fraction, n: int, p: int, algorithm: Algorithm) -> None:
    """Raise if ``a`` cannot be the n-th partial quotient under ``algorithm``."""
    conv = algorithm.convention(n)
    if not in_representative_set(a, p, conv):
        raise ValueError(f"a_{n} = {a} is not a valid {conv.value} floor value for p={p}")
    if n >= 1:
        bound = 0 if (algorithm is Algorithm.MR and n % 2 == 0) else -1
        if vp(a, p) > bound:
            raise ValueError(f"a_{n} = {a} has valuation {vp(a, p)} > {bound}")


class CFStream:
    """Base class: a cursor plus a cache of produced terms."""

    def __init__(self, p: int, algorithm: Algorithm):
        PadicContext(p)  # validates p
        self.p = p
        self.algorithm = Algorithm.parse(algorithm)
        self._terms: list[Fraction] = []
        self._last: Optional[int] = None
        self._cursor = 0

    # subclasses produce term n given that terms < n exist; return TERMINATED past the end
    def _produce(self, n: int):
        raise NotImplementedError

    def _extend_to(self, n: int) -> bool:
        while len(self._terms) <= n:
            if self._last is not None:
                return False
            k = len(self._terms)
            a = self._produce(k)
            if a is TERMINATED:
                self._last = k - 1
                return False
            self._terms.append(a)
        return True

    def term(self, n: int):
        """``a_n``, or ``TERMINATED`` if the expansion is shorter."""
        if n < 0:
            raise IndexError(n)
        if not self._extend_to(n):
            return TERMINATED
        return self._terms[n]

    def is_last(self, n: int) -> bool:
        """True when ``a_n`` exists and ``alpha_n = a_n`` exactly."""
        if self.term(n) is TERMINATED:
            return False
        self._extend_to(n + 1)
        return self._last == n

    def complete_quotient(self, n: int):
        """Exact ``alpha_n`` when known (Fraction or QuadraticSurd), else None."""
        return None

    def next_quotient(self):
        a = self.term(self._cursor)
        if a is not TERMINATED:
            self._cursor += 1
        return a

    def take(self, count: int) -> list[Fraction]:
        out = []
        for n in range(count):
            a = self.term(n)
            if a is TERMINATED:
                break
            out.append(a)
        return out

    def __iter__(self) -> Iterator[Fraction]:
        n = 0
        while True:
            a = self.term(n)
            if a is TERMINATED:
                return
            yield a
            n += 1

    @property
    def terminated_length(self) -> Optional[int]:
        """Number of terms if the expansion is known to be finite."""
        return None if self._last is None else self._last + 1

    @property
    def nonterminating_cycle(self) -> Optional[tuple[int, int]]:
        return None

    def periodic_structure(self) -> Optional[tuple[list[Fraction], list[Fraction]]]:
        """``(preperiod, period)`` when the stream is known to be eventually periodic."""
        return None

    def branch(self) -> Optional[int]:
        return None


class ExplicitStream(CFStream):
    """A finite list of partial quotients; its value is the finite continued fraction."""

    def __init__(self, terms: Sequence, p: int, algorithm: Algorithm = Algorithm.RUBAN, validate: bool = True):
        super().__init__(p, algorithm)
        self._given = [Fraction(a) for a in terms]
        if validate:
            for n, a in enumerate(self._given):
                check_quotient(a, n, p, self.algorithm)
        self._tails: dict[int, Fraction] = {}

    def _produce(self, n):
        return self._given[n] if n < len(self._given) else TERMINATED

    def complete_quotient(self, n):
        if n >= len(self._given):
            return None
        if n not in self._tails:
            self._tails[n] = evaluate(self._given[n:])
        return self._tails[n]


class PeriodicStream(CFStream):
    """``[pre_0, ..., pre_{k-1}, period, period, ...]`` without end."""

    def __init__(self, preperiod: Sequence, period: Sequence, p: int, algorithm: Algorithm = Algorithm.RUBAN, validate: bool = True):
        super().__init__(p, algorithm)
        self.preperiod = [Fraction(a) for a in preperiod]
        self.period = [Fraction(a) for a in period]
        if not self.period:
            raise ValueError("period must be nonempty")
        if validate:
            for n in range(len(self.preperiod) + 2 * len(self.period)):
                check_quotient(self._at(n), n, p, self.algorithm)

    def _at(self, n):
        k = len(self.preperiod)
        if n < k:
            return self.preperiod[n]
        return self.period[(n - k) % len(self.period)]

    def _produce(self, n):
        return self._at(n)

    def periodic_structure(self):
        return list(self.preperiod), list(self.period)


class RationalExpander(CFStream):
    """Exact expansion of a rational number."""

    def __init__(self, value, p: int, algorithm: Algorithm = Algorithm.RUBAN, strict: bool = False, start_index: int = 0):
        super().__init__(p, algorithm)
        self.value = Fraction(value)
        self.strict = strict
        # MR parity offset, for expanding a tail that starts at an odd position
        self.start_index = start_index
        self._alphas: list[Fraction] = [self.value]
        self._seen: dict[tuple[Fraction, int], int] = {}
        self._cycle: Optional[tuple[int, int]] = None

    def _produce(self, n):
        if n >= len(self._alphas):
            return TERMINATED
        alpha = self._alphas[n]
        parity = (n + self.start_index) % 2 if self.algorithm is Algorithm.MR else 0
        key = (alpha, parity)
        if self._cycle is None and n >= 1:
            if key in self._seen:
                m = self._seen[key]
                self._cycle = (m, n - m)
                if self.strict:
                    raise NonTerminatingDetected(m, n - m)
            else:
                self._seen[key] = n
        a = floor_rational(alpha, PadicContext(self.p), self.algorithm.convention(n + self.start_index))
        if alpha != a:
            self._alphas.append(1 / (alpha - a))
        return a

    def complete_quotient(self, n):
        if self.term(n) is TERMINATED:
            return None
        return self._alphas[n]

    @property
    def nonterminating_cycle(self):
        return self._cycle

    def detect_cycle(self, limit: int = 10_000) -> Optional[tuple[int, int]]:
        """Expand until termination or a repeated complete quotient."""
        n = 0
        while self._cycle is None and n < limit:
            if self.term(n) is TERMINATED:
                return None
            n += 1
        return self._cycle

    def periodic_structure(self):
        cyc = self.detect_cycle()
        if cyc is None:
            return None
        start, period = cyc
        terms = self.take(start + period)
        return terms[:start], terms[start:]


class SurdExpander(CFStream):
    """Exact expansion of an element of Q(sqrt(D)) in Q_p."""

    def __init__(self, surd: QuadraticSurd, algorithm: Algorithm = Algorithm.RUBAN):
        super().__init__(surd.p, algorithm)
        self.surd = surd
        self._alphas: list[QuadraticSurd] = [surd]

    def _produce(self, n):
        if n >= len(self._alphas):
            return TERMINATED
        alpha = self._alphas[n]
        a = alpha.floor(self.algorithm.convention(n))
        rest = alpha - a
        if rest:
            self._alphas.append(rest.inverse())
        return a

    def complete_quotient(self, n):
        if self.term(n) is TERMINATED:
            return None
        return self._alphas[n]

    def branch(self):
        return self.surd.branch


class TailStream(CFStream):
    """The stream ``[a_j, a_{j+1}, ...]`` of another stream (same algorithm)."""

    def __init__(self, base: CFStream, offset: int):
        super().__init__(base.p, base.algorithm)
        if base.algorithm is Algorithm.MR and offset % 2:
            raise ValueError("an MR tail must start at an even index")
        self.base = base
        self.offset = offset

    def _produce(self, n):
        return self.base.term(self.offset + n)

    def complete_quotient(self, n):
        return self.base.complete_quotient(self.offset + n)

    def periodic_structure(self):
        structure = self.base.periodic_structure()
        if structure is None:
            return None
        pre, period = structure
        if self.offset <= len(pre):
            return pre[self.offset:], period
        shift = (self.offset - len(pre)) % len(period)
        return [], period[shift:] + period[:shift]

    def branch(self):
        return self.base.branch()


def make_stream(value, p: int, algorithm: Algorithm, strict: bool = False) -> CFStream:
    """Expander for a rational or surd value."""
    if isinstance(value, QuadraticSurd):
        if value.is_rational:
            return RationalExpander(value.to_fraction(), p, algorithm, strict)
        return SurdExpander(value, algorithm)
    return RationalExpander(Fraction(value), p, algorithm, strict)


@dataclass(frozen=True)
class Convergent:
    A: Fraction
    B: Fraction
    index: int

    @property
    def value(self) -> Fraction:
        return self.A / self.B


def convergents(quotients: Iterable) -> list[Convergent]:
    out = []
    A_prev, A = Fraction(1), None
    B_prev, B = Fraction(0), None
    for n, a in enumerate(quotients):
        a = Fraction(a)
        if n == 0:
            A, B = a, Fraction(1)
        else:
            A, A_prev = a * A + A_prev, A
            B, B_prev = a * B + B_prev, B
        out.append(Convergent(A, B, n))
    if not out:
        raise ValueError("need at least one partial quotient")
    return out


def evaluate(quotients: Sequence) -> Fraction:
    """Value of a finite continued fraction."""
    if not quotients:
        raise ValueError("empty continued fraction")
    value = Fraction(quotients[-1])
    for a in reversed(quotients[:-1]):
        value = Fraction(a) + 1 / value
    return value


def expansion_to_json(stream: CFStream, count: int) -> dict:
    terms = stream.take(count)
    finished = len(terms) < count or (bool(terms) and stream.is_last(len(terms) - 1))
    cycle = stream.nonterminating_cycle
    data = {
        "p": stream.p,
        "algo": stream.algorithm.value,
        "terms": [fraction_json(a) for a in terms],
        "terminated": bool(finished),
    }
    if stream.branch() is not None:
        data["branch"] = stream.branch()
    if cycle is not None:
        data["nonterminating_cycle"] = cycle[0]
    return data


def dump_expansion(stream: CFStream, count: int) -> str:
    return json.dumps(expansion_to_json(stream, count), indent=2)
