import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from shiftconv.errors import PoleError
from shiftconv.regsum import (
    continued_sign,
    reduce_mod_one,
    reg_sum_pow,
    reg_sum_pow_array,
    reg_sum_pow_log,
    reg_sum_pow_log_array,
)
from shiftconv.zeta import hurwitz_zeta_nonpos

M = 10**6


def _bilateral(a, s, with_log=False):
    m = np.arange(-M, M + 1, dtype=np.float64) + a
    t = np.abs(m) ** -s * np.sign(m) ** s
    if with_log:
        t = t * np.log(np.abs(m))
    return math.fsum(t.tolist())


def test_pow_matches_direct_bilateral_sum(ctx):
    direct = _bilateral(0.5, 2)
    tail = 2.0 / (M - 1)
    v = reg_sum_pow(ctx, 2, Fraction(1, 2)).value
    assert abs(float(v) - direct) <= tail + 1e-12
    with mpmath.workdps(60):
        assert abs(v - mpmath.pi**2) < mpmath.mpf(10) ** -45


def test_log_matches_direct_bilateral_sum(ctx):
    direct = _bilateral(0.5, 2, with_log=True)
    tail = 2.0 * (math.log(M) + 1) / (M - 1)
    v = reg_sum_pow_log(ctx, 2, Fraction(1, 2)).value
    assert abs(float(v) - direct) <= tail + 1e-12


def test_vanishing_examples(ctx):
    for s, a in [(0, Fraction(1, 3)), (-3, Fraction(1, 4))]:
        r = reg_sum_pow(ctx, s, a)
        assert r.value == 0 and r.mode == "exact"


def test_log_at_zero_is_log2(ctx):
    # -(d_s zeta(0, 1/2) * 2) with d_s zeta(0, a) = log Gamma(a) - log(2 pi)/2
    with mpmath.workdps(60):
        ref = -2 * (mpmath.loggamma(mpmath.mpf(1) / 2) - mpmath.log(2 * mpmath.pi) / 2)
        assert abs(reg_sum_pow_log(ctx, 0, Fraction(1, 2)).value - ref) < mpmath.mpf(10) ** -45
        assert abs(ref - mpmath.log(2)) < mpmath.mpf(10) ** -50


def test_reflection(ctx):
    rng = random.Random(11)
    for s in range(-6, 7):
        if s == 1:
            continue
        for _ in range(4):
            q = rng.randint(2, 30)
            p = rng.randint(1, q - 1)
            a = Fraction(p, q)
            sign = (-1) ** (s % 2)
            with mpmath.workdps(60):
                lhs = reg_sum_pow(ctx, s, a).value
                rhs = sign * reg_sum_pow(ctx, s, -a).value
                assert abs(mpmath.mpmathify(lhs) - rhs) <= mpmath.mpf(10) ** -45 * max(1, abs(rhs))
                lhs = reg_sum_pow_log(ctx, s, a).value
                rhs = sign * reg_sum_pow_log(ctx, s, -a).value
                assert abs(lhs - rhs) <= mpmath.mpf(10) ** -45 * max(1, abs(rhs))


def test_vanishing_grid_exact(ctx):
    rng = random.Random(2)
    for s in range(0, -13, -1):
        for _ in range(10):
            q = rng.randint(2, 97)
            a = Fraction(rng.randint(1, q - 1), q) + rng.randint(-3, 3)
            if a.denominator == 1:
                continue
            assert reg_sum_pow(ctx, s, a).value == 0


def test_bernoulli_reflection_exact():
    for s in range(0, -13, -1):
        for a in (Fraction(1, 3), Fraction(2, 7), Fraction(5, 11)):
            assert hurwitz_zeta_nonpos(s, 1 - a) == (-1) ** (1 - s) * hurwitz_zeta_nonpos(s, a)


def test_convergent_agreement(ctx):
    # integer s >= 2: the bilateral series converges and matches its value
    for s in (2, 3, 4, 5):
        a = Fraction(2, 7)
        with mpmath.workdps(40):
            af = mpmath.mpf(2) / 7
            ref = mpmath.nsum(lambda m: (m + af) ** -s, [-mpmath.inf, mpmath.inf])
            assert abs(reg_sum_pow(ctx, s, a).value - ref) < mpmath.mpf(10) ** -25


def test_noninteger_exponent(ctx):
    s = mpmath.mpf("2.5")
    a = Fraction(1, 4)
    with mpmath.workdps(60):
        ref = mpmath.zeta(s, 0.25) + mpmath.expjpi(s) * mpmath.zeta(s, 0.75)
        assert abs(reg_sum_pow(ctx, s, a).value - ref) < mpmath.mpf(10) ** -40


def test_errors(ctx):
    with pytest.raises(PoleError):
        reg_sum_pow(ctx, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        reg_sum_pow(ctx, 2, 3)
    with pytest.raises(ValueError):
        reg_sum_pow_log(ctx, 2, Fraction(4, 2))


def test_helpers(ctx):
    assert reduce_mod_one(Fraction(-1, 3)) == Fraction(2, 3)
    assert continued_sign(ctx, 3) == -1
    assert continued_sign(ctx, -4) == 1
    assert abs(continued_sign(ctx, Fraction(1, 2)) - 1j) < 1e-40


def test_array_kernels(ctx):
    a = np.array([0.125, -0.25, 0.5, 1 / 3])
    for s in (2, 3, 6):
        got = reg_sum_pow_array(s, a)
        gotl = reg_sum_pow_log_array(s, a)
        for x, g, gl in zip(a, got, gotl):
            q = Fraction(x).limit_denominator(1000)
            ref = float(reg_sum_pow(ctx, s, q).value)
            refl = float(reg_sum_pow_log(ctx, s, q).value)
            assert abs(g - ref) <= 1e-13 * max(1, abs(ref))
            assert abs(gl - refl) <= 1e-12 * max(1, abs(refl))
    with pytest.raises(ValueError):
        reg_sum_pow_array(1, a)
