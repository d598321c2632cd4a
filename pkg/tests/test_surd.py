from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padiccf.padic import DigitConvention, PadicContext, floor_rational, vp
from padiccf.surd import QuadraticSurd, hensel_sqrt, square_roots_mod_p, surd_from_spec


def test_roots_of_95_mod_13():
    assert square_roots_mod_p(95, 13) == (2, 11)
    assert QuadraticSurd.sqrt(95, 13).branch == 2


@pytest.mark.parametrize("D,p", [(95, 13), (2, 7), (151, 7), (79, 7), (6, 5)])
@pytest.mark.parametrize("K", [1, 5, 40])
def test_hensel(D, p, K):
    for branch in square_roots_mod_p(D, p):
        r = hensel_sqrt(D, p, branch, K)
        assert (r * r - D) % p**K == 0 and r % p == branch


@pytest.mark.parametrize("D,p", [(4, 5), (3, 5), (10, 5), (-2, 7)])
def test_bad_radicands(D, p):
    with pytest.raises(ValueError):
        QuadraticSurd.sqrt(D, p)


def test_bad_branch():
    with pytest.raises(ValueError):
        QuadraticSurd.sqrt(2, 7, 1)
    with pytest.raises(ValueError):
        surd_from_spec(1, 0, 1, 2, 7)


coeff = st.integers(-50, 50)


@given(coeff, coeff.filter(bool), coeff.filter(bool), coeff, coeff, coeff.filter(bool))
def test_field_arithmetic_matches_approximations(P, Q, R, P2, Q2, R2):
    a = QuadraticSurd(P, Q, R, 2, 7)
    b = QuadraticSurd(P2, Q2, R2, 2, 7)
    K = 30
    p = 7

    def close(s, q):
        return vp(s.approximation(K) - q, p) >= K - 10

    ax, bx = a.approximation(K), b.approximation(K)
    assert close(a + b, ax + bx)
    assert close(a * b, ax * bx)
    assert close(a - b, ax - bx)
    assert (a / b) * b == a
    assert a * a.inverse() == 1


def test_sqrt_squares_back():
    s = QuadraticSurd.sqrt(95, 13)
    assert s * s == 95
    assert (s * s).is_rational and (s * s).to_fraction() == 95
    with pytest.raises(ValueError):
        s.to_fraction()


@pytest.mark.parametrize("conv", [DigitConvention.RUBAN, DigitConvention.BROWKIN_S, DigitConvention.BROWKIN_T])
def test_floor_agrees_with_approximation(conv):
    s = (QuadraticSurd.sqrt(95, 13) + 3) / 169
    q = s.approximation(10)
    assert s.floor(conv) == floor_rational(q, PadicContext(13), conv)


def test_valuation_and_digits():
    s = QuadraticSurd.sqrt(2, 7) * 49
    assert s.valuation() == 2
    w = s.digits(5)
    assert w.start == 2 and vp(s.approximation(12) - w.reconstruct(), 7) >= w.end


def test_branches_are_distinct_embeddings():
    s = QuadraticSurd.sqrt(95, 13)
    assert s.other_branch().branch == 11
    assert s.floor(DigitConvention.RUBAN) == 2
    assert s.other_branch().floor(DigitConvention.RUBAN) == 11
    with pytest.raises(ValueError):
        s + s.other_branch()
    assert s.conjugate().floor(DigitConvention.RUBAN) == 11
