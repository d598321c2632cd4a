"""Input/output staircases: how many inputs each output quotient needs."""

from __future__ import annotations

import csv
import random
from typing import Iterable, Union

from .bilinear import BilinearEngine, rank
from .engine import EventType, Trace
from .expansion import Algorithm, SurdExpander
from .moebius import MoebiusEngine
from .surd import QuadraticSurd

MOBIUS_HEADER = ["trial", "output_index", "input_index"]
BILINEAR_HEADER = ["trial", "output_index", "alpha_inputs", "beta_inputs"]


def random_moebius_coeffs(rng: random.Random, coeff_range: int) -> tuple[int, int, int, int]:
    while True:
        x, y, z, t = (rng.randint(0, coeff_range) for _ in range(4))
        if x * t - y * z:
            return x, y, z, t


def random_bilinear_coeffs(rng: random.Random, coeff_range: int) -> tuple[int, ...]:
    while True:
        c = tuple(rng.randint(0, coeff_range) for _ in range(8))
        if rank(c) == 2:
            return c


def _emission_rows(trace: Trace, trial: int) -> list[tuple]:
    return [(trial, index, *inputs) for index, inputs in trace.emissions()]


def mobius_staircase(p: int, algorithm, D: int, trials: int, outputs: int, coeff_range: int, seed: int,
                     branch=None, max_inputs: int = 4_000, rule: str = "standard") -> list[tuple]:
    """Rows ``(trial, output_index, input_index)``.

    ``input_index`` counts the inputs consumed when the output was emitted.
    """
    algorithm = Algorithm.parse(algorithm)
    alpha = QuadraticSurd.sqrt(D, p, branch)
    rng = random.Random(seed)
    stream = SurdExpander(alpha, algorithm)  # shared: the expansion is cached across trials
    rows = []
    for trial in range(trials):
        coeffs = random_moebius_coeffs(rng, coeff_range)
        trace = MoebiusEngine(coeffs, stream, max_inputs=max_inputs, max_outputs=outputs, rule=rule).run()
        rows.extend(_emission_rows(trace, trial))
    return sorted(rows)


def bilinear_staircase(p: int, algorithm, D_alpha: int, D_beta: int, trials: int, outputs: int,
                       coeff_range: int, seed: int, max_inputs: int = 8_000, rule: str = "standard") -> list[tuple]:
    """Rows ``(trial, output_index, alpha_inputs, beta_inputs)``."""
    algorithm = Algorithm.parse(algorithm)
    alpha = SurdExpander(QuadraticSurd.sqrt(D_alpha, p), algorithm)
    beta = SurdExpander(QuadraticSurd.sqrt(D_beta, p), algorithm)
    rng = random.Random(seed)
    rows = []
    for trial in range(trials):
        coeffs = random_bilinear_coeffs(rng, coeff_range)
        trace = BilinearEngine(coeffs, alpha, beta, max_inputs=max_inputs, max_outputs=outputs, rule=rule).run()
        rows.extend(_emission_rows(trace, trial))
    return sorted(rows)


def plateaus(rows: Iterable[tuple], min_outputs: int = 3) -> dict[int, int]:
    """Input indices at which at least ``min_outputs`` outputs were emitted in a row."""
    counts: dict[tuple, int] = {}
    for row in rows:
        counts[(row[0], row[2])] = counts.get((row[0], row[2]), 0) + 1
    out: dict[int, int] = {}
    for (_, j), n in counts.items():
        if n >= min_outputs:
            out[j] = out.get(j, 0) + 1
    return dict(sorted(out.items()))


def write_rows(header: list[str], rows: Iterable[tuple], path_or_file: Union[str, object]) -> None:
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    if isinstance(path_or_file, str):
        with open(path_or_file, "w", newline="") as fh:
            dump(fh)
    else:
        dump(path_or_file)
