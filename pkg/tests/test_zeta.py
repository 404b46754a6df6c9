import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftconv.errors import PoleError
from shiftconv.zeta import (
    ZetaContext,
    hurwitz_zeta,
    hurwitz_zeta_array,
    hurwitz_zeta_nonpos,
    hurwitz_zeta_s_deriv,
    kernel_self_test,
    riemann_zeta,
    riemann_zeta_deriv,
)


def close(x, y, digits):
    with mpmath.workdps(digits + 10):
        return abs(mpmath.mpmathify(x) - mpmath.mpmathify(y)) <= mpmath.mpf(10) ** -digits * max(1, abs(mpmath.mpmathify(y)))


def test_nonpositive_exact_values():
    assert hurwitz_zeta_nonpos(0, Fraction(1, 3)) == Fraction(1, 6)
    assert hurwitz_zeta_nonpos(-1, 1) == Fraction(-1, 12)
    assert hurwitz_zeta_nonpos(-2, Fraction(1, 2)) == 0
    with pytest.raises(ValueError):
        hurwitz_zeta_nonpos(1, Fraction(1, 2))


def test_nonpositive_values_match_independent_continuation():
    # mpmath's own Hurwitz zeta is an independent implementation
    rng = random.Random(3)
    with mpmath.workdps(40):
        for s in range(0, -11, -1):
            for _ in range(5):
                q = rng.randint(2, 40)
                a = Fraction(rng.randint(1, q), q)
                ref = mpmath.zeta(s, mpmath.mpf(a.numerator) / a.denominator)
                assert close(hurwitz_zeta_nonpos(s, a), ref, 30)


def test_classical_values(ctx):
    with mpmath.workdps(60):
        assert close(hurwitz_zeta(ctx, 2, 1), mpmath.pi**2 / 6, 48)
        assert close(hurwitz_zeta(ctx, 3, Fraction(1, 2)), 7 * mpmath.zeta(3), 48)
        assert close(riemann_zeta_deriv(ctx, 0), -mpmath.log(2 * mpmath.pi) / 2, 48)
        assert close(riemann_zeta_deriv(ctx, -2), -mpmath.zeta(3) / (4 * mpmath.pi**2), 48)


def test_numeric_path_matches_exact_nonpositive(ctx):
    # a float argument forces Euler-Maclaurin
    a = Fraction(1, 3)
    with mpmath.workdps(70):
        num = hurwitz_zeta(ctx, -2, mpmath.mpf(1) / 3)
    assert close(num, hurwitz_zeta_nonpos(-2, a), 45)


def test_riemann_zeta_exact_points(ctx):
    assert riemann_zeta(ctx, 0) == Fraction(-1, 2)
    assert riemann_zeta(ctx, -2) == 0
    assert riemann_zeta(ctx, -1) == Fraction(-1, 12)


def test_pole(ctx):
    with pytest.raises(PoleError):
        hurwitz_zeta(ctx, 1, Fraction(1, 2))
    with pytest.raises(PoleError):
        riemann_zeta_deriv(ctx, 1)


@given(
    st.floats(min_value=-8, max_value=8).filter(lambda s: abs(s - 1) > 1e-3),
    st.floats(min_value=0.05, max_value=3),
)
@settings(max_examples=40, deadline=None)
def test_shift_recurrence(s, a):
    ctx = ZetaContext(30)
    with mpmath.workdps(40):
        a = mpmath.mpf(a)
        lhs = hurwitz_zeta(ctx, s, a) - hurwitz_zeta(ctx, s, a + 1)
        assert close(lhs, mpmath.power(mpmath.mpf(a), -s), 24)


def test_half_shift_identity():
    ctx = ZetaContext(30)
    rng = random.Random(5)
    for _ in range(20):
        s = mpmath.mpf(rng.uniform(-6, 6))
        if abs(s - 1) < 1e-3:
            continue
        with mpmath.workdps(40):
            ref = (mpmath.power(2, s) - 1) * riemann_zeta(ctx, s)
        assert close(hurwitz_zeta(ctx, s, Fraction(1, 2)), ref, 25)


def test_complex_argument(ctx):
    s = mpmath.mpc(0.5, 14)
    with mpmath.workdps(60):
        assert close(hurwitz_zeta(ctx, s, Fraction(1, 3)), mpmath.zeta(s, mpmath.mpf(1) / 3), 45)


def test_derivative_matches_finite_difference(ctx):
    fine = ZetaContext(70)
    for s, a in [(2, 1), (mpmath.mpf("-1.5"), Fraction(2, 7)), (-3, Fraction(1, 4))]:
        with mpmath.workdps(80):
            h = mpmath.mpf(10) ** -17
            fd = (hurwitz_zeta(fine, s + h, a) - hurwitz_zeta(fine, s - h, a)) / (2 * h)
            assert close(hurwitz_zeta_s_deriv(ctx, s, a), fd, 25)


def test_float_kernel_against_mp():
    a = np.array([0.1, 0.5, 1.0, 2.75, 40.0])
    for s in (1.5, 2.0, 7.0, 30.0):
        got = hurwitz_zeta_array(s, a)
        dgot = hurwitz_zeta_array(s, a, derivative=True)
        for x, g, dg in zip(a, got, dgot):
            with mpmath.workdps(40):
                ref = float(mpmath.zeta(s, x))
                dref = float(mpmath.zeta(s, x, derivative=1))
            assert abs(g - ref) <= 1e-13 * abs(ref)
            assert abs(dg - dref) <= 1e-12 * abs(dref)
    with pytest.raises(ValueError):
        hurwitz_zeta_array(0.5, a)


def test_kernel_self_test_passes():
    rows = kernel_self_test(ZetaContext(50), n_rational=5)
    assert rows and all(ok for *_, ok in rows)


def test_context_validation():
    with pytest.raises(ValueError):
        ZetaContext(2)
