import io
import random

from padiccf.experiments import (
    BILINEAR_HEADER,
    MOBIUS_HEADER,
    bilinear_staircase,
    mobius_staircase,
    plateaus,
    random_bilinear_coeffs,
    random_moebius_coeffs,
    write_rows,
)


def test_mobius_rows_are_monotone():
    rows = mobius_staircase(13, "ruban", 95, trials=3, outputs=40, coeff_range=100, seed=1)
    assert rows == sorted(rows)
    for trial in range(3):
        mine = [r for r in rows if r[0] == trial]
        assert [r[1] for r in mine] == list(range(len(mine)))
        inputs = [r[2] for r in mine]
        assert inputs == sorted(inputs)


def test_reproducible_with_seed():
    a = mobius_staircase(13, "browkin1", 95, 2, 20, 50, seed=3)
    b = mobius_staircase(13, "browkin1", 95, 2, 20, 50, seed=3)
    assert a == b


def test_bilinear_rows():
    rows = bilinear_staircase(7, "ruban", 79, 151, trials=2, outputs=10, coeff_range=50, seed=0, rule="exact")
    assert rows and all(len(r) == 4 for r in rows)


def test_plateaus():
    rows = [(0, 0, 5), (0, 1, 5), (0, 2, 5), (0, 3, 9), (1, 0, 5), (1, 1, 5), (1, 2, 5)]
    assert plateaus(rows, 3) == {5: 2}


def test_random_coefficients():
    rng = random.Random(0)
    x, y, z, t = random_moebius_coeffs(rng, 10)
    assert x * t != y * z and all(0 <= c <= 10 for c in (x, y, z, t))
    assert len(random_bilinear_coeffs(rng, 10)) == 8


def test_write_rows():
    buf = io.StringIO()
    write_rows(MOBIUS_HEADER, [(0, 0, 3)], buf)
    assert buf.getvalue() == "trial,output_index,input_index\n0,0,3\n"
    assert BILINEAR_HEADER[2:] == ["alpha_inputs", "beta_inputs"]
