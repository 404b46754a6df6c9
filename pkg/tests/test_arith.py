import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.arith import (
    as_integer,
    bernoulli_number,
    bernoulli_poly,
    divisors,
    factorize,
    is_exact,
    sigma,
    to_mp,
    valuation,
    von_mangoldt,
)


def test_factorize_examples():
    assert factorize(12).factors == ((2, 2), (3, 1))
    assert factorize(-7).factors == ((7, 1),)
    assert factorize(1).factors == ()
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_large_semiprime():
    p, q = 999_983, 1_000_003
    assert factorize(p * q).factors == ((p, 1), (q, 1))


@given(st.integers(min_value=-10**9, max_value=10**9).filter(lambda x: x != 0))
@settings(max_examples=200, deadline=None)
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert math.prod(p**v for p, v in f.factors) == abs(n)
    primes = [p for p, _ in f.factors]
    assert primes == sorted(set(primes))
    assert all(v >= 1 for _, v in f.factors)


def test_divisors_examples():
    assert divisors(6) == [1, 2, 3, 6]
    assert divisors(-4) == [1, 2, 4]
    assert divisors(1) == [1]
    with pytest.raises(ValueError):
        divisors(0)


def test_valuation():
    assert valuation(48, 2) == 4
    assert valuation(48, 3) == 1
    assert valuation(48, 5) == 0


def test_sigma_examples():
    assert sigma(6, 0) == 4
    assert sigma(4, -3) == Fraction(73, 64)
    assert sigma(-6, 2) == 50
    with pytest.raises(ValueError):
        sigma(0, 1)


def test_sigma_complex_exponent():
    nu = mpmath.mpc(-1.5, 2)
    expected = sum(mpmath.power(d, nu) for d in (1, 2, 3, 6))
    assert abs(sigma(6, nu) - expected) < 1e-12


def test_sigma_multiplicative():
    rng = random.Random(1)
    checked = 0
    while checked < 100:
        m, n = rng.randint(1, 10**4), rng.randint(1, 10**4)
        if math.gcd(m, n) != 1:
            continue
        for nu in (0, 1, -2, 3):
            assert sigma(m * n, nu) == sigma(m, nu) * sigma(n, nu)
        checked += 1


def test_von_mangoldt_examples():
    assert abs(von_mangoldt(9) - math.log(3)) < 1e-14
    assert von_mangoldt(12) == 0
    assert von_mangoldt(1) == 0


def test_von_mangoldt_sums_to_log():
    for n in range(1, 2001):
        total = mpmath.fsum(von_mangoldt(ell) for ell in divisors(n))
        assert abs(total - mpmath.log(n)) < 1e-12


def test_bernoulli_numbers():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(1) == Fraction(-1, 2)
    assert bernoulli_number(2) == Fraction(1, 6)
    assert bernoulli_number(3) == 0
    assert bernoulli_number(12) == Fraction(-691, 2730)


def test_bernoulli_poly_examples():
    assert bernoulli_poly(1, Fraction(3, 4)) == Fraction(1, 4)
    assert bernoulli_poly(2, Fraction(1, 2)) == Fraction(-1, 12)
    assert bernoulli_poly(3, Fraction(1, 2)) == 0


@given(
    st.integers(min_value=0, max_value=30),
    st.fractions(min_value=-3, max_value=3, max_denominator=50),
)
@settings(max_examples=150, deadline=None)
def test_bernoulli_poly_identities(k, a):
    assert bernoulli_poly(k, 1 - a) == (-1) ** k * bernoulli_poly(k, a)
    step = k * a ** (k - 1) if k else 0
    assert bernoulli_poly(k, a + 1) - bernoulli_poly(k, a) == step


def test_bernoulli_poly_float_argument():
    assert abs(bernoulli_poly(2, mpmath.mpf("0.25")) - mpmath.mpf(-1) / 48) < 1e-14


def test_exactness_helpers():
    assert is_exact(3) and is_exact(Fraction(1, 3))
    assert not is_exact(0.5)
    assert as_integer(Fraction(4, 2)) == 2
    assert as_integer(Fraction(1, 2)) is None
    assert as_integer(mpmath.mpf(3)) == 3
    assert to_mp(Fraction(1, 4)) == mpmath.mpf("0.25")
