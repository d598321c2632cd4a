"""Monte-Carlo frequencies of partial quotients under the Haar measure on pZ_p."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .expansion import Algorithm
from .padic import DigitConvention, PadicContext, floor_rational, in_representative_set, vp


class HaarSampler:
    """Truncated Haar-uniform elements of pZ_p: ``sum(c_n p^n, n=1..depth)``."""

    def __init__(self, p: int, seed: int = 0, depth: int = 100):
        PadicContext(p)
        if depth < 1:
            raise ValueError("depth must be at least 1")
        self.p = p
        self.depth = depth
        self.seed = seed
        self._rng = random.Random(seed)

    def sample(self) -> Fraction:
        # digits c_1..c_depth uniform in {0..p-1}, read as one integer
        return Fraction(self._rng.randrange(self.p ** self.depth) * self.p)

    def counted_positions(self, quotients: int) -> int:
        """Quotients per sample inside the faithfully sampled prefix."""
        return min(quotients, self.depth // 3)


def _expand(x: Fraction, p: int, algorithm: Algorithm, count: int) -> list[Fraction]:
    """``a_1, ..., a_count`` (fewer if the rational sample runs out)."""
    ctx = PadicContext(p)
    out = []
    alpha = x  # a_0 = 0 for x in pZ_p under every floor
    for n in range(1, count + 1):
        if alpha == 0:
            break
        alpha = 1 / alpha
        a = floor_rational(alpha, ctx, algorithm.convention(n))
        out.append(a)
        alpha -= a
    return out


def _positions(odd_only: bool, count: int) -> list[int]:
    """0-based offsets into ``a_1..a_count`` that are counted."""
    if odd_only:
        return list(range(0, count, 2))  # a_1, a_3, ...
    return list(range(count))


@dataclass(frozen=True)
class FrequencyReport:
    target: str
    k: int
    expected: Fraction
    observed: Fraction
    samples: int
    positions: int

    def as_row(self) -> list[str]:
        return [self.target, str(self.k), _fmt(self.expected), _fmt(self.observed), str(self.samples), str(self.positions)]


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _draw(sampler: HaarSampler, algorithm: Algorithm, samples: int, quotients: int):
    count = sampler.counted_positions(quotients)
    for _ in range(samples):
        yield _expand(sampler.sample(), sampler.p, algorithm, count)


def _check_algorithm(algorithm, odd_only):
    algorithm = Algorithm.parse(algorithm)
    if odd_only is None:
        odd_only = algorithm is Algorithm.MR
    if odd_only and algorithm is not Algorithm.MR:
        raise ValueError("odd-position statistics are defined for the MR algorithm")
    return algorithm, odd_only


def expected_value_frequency(y, p: int, algorithm: Algorithm, odd_only: bool = False) -> Fraction:
    k = -vp(Fraction(y), p)
    if odd_only:
        return Fraction(1, p ** (2 * k - 1))
    return Fraction(1, p ** (2 * k))


def frequency_of_value(y, algorithm, sampler: HaarSampler, quotients_per_sample: int, samples: int,
                       odd_only: Optional[bool] = None) -> FrequencyReport:
    """Observed share of positions ``j >= 1`` with ``a_j = y``.

    For MR only the odd positions (t-floors) are counted.
    """
    algorithm, odd_only = _check_algorithm(algorithm, odd_only)
    y = Fraction(y)
    p = sampler.p
    conv = DigitConvention.BROWKIN_T if odd_only else algorithm.convention(1)
    if not in_representative_set(y, p, conv) or vp(y, p) >= 0:
        raise ValueError(f"{y} is not a possible partial quotient a_j (j >= 1) for p={p}")
    hits = total = 0
    for terms in _draw(sampler, algorithm, samples, quotients_per_sample):
        for i in _positions(odd_only, len(terms)):
            total += 1
            hits += terms[i] == y
    observed = Fraction(hits, total) if total else Fraction(0)
    return FrequencyReport(("odd:" if odd_only else "") + _fmt(y), -vp(y, p), expected_value_frequency(y, p, algorithm, odd_only),
                           observed, samples, total)


def valuation_histogram(algorithm, sampler: HaarSampler, quotients_per_sample: int, samples: int,
                        k_max: int, odd_only: Optional[bool] = None) -> list[FrequencyReport]:
    """Observed share of positions with ``vp(a_j) = -k`` for ``k = 1..k_max``.

    The expected share is ``(p-1) p^-k``, also for the MR odd positions.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    algorithm, odd_only = _check_algorithm(algorithm, odd_only)
    p = sampler.p
    counts = [0] * (k_max + 1)
    total = 0
    for terms in _draw(sampler, algorithm, samples, quotients_per_sample):
        for i in _positions(odd_only, len(terms)):
            total += 1
            k = -vp(terms[i], p)
            if 1 <= k <= k_max:
                counts[k] += 1
    prefix = "odd:" if odd_only else ""
    return [
        FrequencyReport(f"{prefix}v=-{k}", k, Fraction(p - 1, p ** k),
                        Fraction(counts[k], total) if total else Fraction(0), samples, total)
        for k in range(1, k_max + 1)
    ]


def joint_frequency(y1, y2, algorithm, sampler: HaarSampler, samples: int) -> tuple[Fraction, Fraction, Fraction]:
    """Observed ``P(a_1 = y1, a_2 = y2)``, ``P(a_1 = y1)`` and ``P(a_2 = y2)``."""
    algorithm = Algorithm.parse(algorithm)
    y1, y2 = Fraction(y1), Fraction(y2)
    both = first = second = 0
    for _ in range(samples):
        terms = _expand(sampler.sample(), sampler.p, algorithm, 2)
        if len(terms) < 2:
            continue
        first += terms[0] == y1
        second += terms[1] == y2
        both += terms[0] == y1 and terms[1] == y2
    return Fraction(both, samples), Fraction(first, samples), Fraction(second, samples)


def values_with_valuation(p: int, k: int, convention: DigitConvention) -> list[Fraction]:
    """All representatives of valuation ``-k``, in increasing numerator order."""
    out = []
    for num in range(-(p ** (k + 1)), p ** (k + 1)):
        q = Fraction(num, p ** k)
        if vp(q, p) == -k and in_representative_set(q, p, convention):
            out.append(q)
    return out


CSV_HEADER = ["target", "k", "expected", "observed", "samples", "positions"]


def write_csv(reports: Iterable[FrequencyReport], path_or_file: Union[str, object]) -> None:
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in reports:
            w.writerow(r.as_row())

    if isinstance(path_or_file, str):
        with open(path_or_file, "w", newline="") as fh:
            dump(fh)
    else:
        dump(path_or_file)
