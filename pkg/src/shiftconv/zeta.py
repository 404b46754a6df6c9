"""Riemann and Hurwitz zeta values and their s-derivatives.

Two routes are provided.  At nonpositive integers the Hurwitz function is a
Bernoulli polynomial and is returned exactly.  Everywhere else it is
evaluated by Euler-Maclaurin summation after shifting the argument upward,
with the s-derivative obtained by differentiating that expansion term by
term.  A float64 array kernel with the same structure serves the bulk
evaluations inside the identity engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .arith import as_integer, bernoulli_number, bernoulli_poly, is_exact
from .errors import NonConvergenceError, PoleError

__all__ = [
    "ZetaContext",
    "DEFAULT_CONTEXT",
    "hurwitz_zeta_nonpos",
    "hurwitz_zeta",
    "hurwitz_zeta_s_deriv",
    "riemann_zeta",
    "riemann_zeta_deriv",
    "zeta_value",
    "zeta_deriv_value",
    "hurwitz_zeta_array",
    "kernel_self_test",
]

_GUARD_DIGITS = 15


@dataclass(frozen=True)
class ZetaContext:
    """Working precision (decimal digits) and Euler-Maclaurin controls.

    ``shift_threshold`` is how far the argument is moved up before the
    asymptotic tail is applied; ``euler_maclaurin_terms`` caps the number of
    Bernoulli corrections.  Both default to values sized for ``precision``.
    """

    precision: int = 50
    euler_maclaurin_terms: int | None = None
    shift_threshold: int | None = None

    def __post_init__(self):
        if self.precision < 5:
            raise ValueError("precision must be at least 5 digits")
        if self.euler_maclaurin_terms is None:
            object.__setattr__(self, "euler_maclaurin_terms", 2 * self.precision + 20)
        if self.shift_threshold is None:
            object.__setattr__(self, "shift_threshold", math.ceil(0.6 * self.precision) + 10)
        if self.euler_maclaurin_terms < 1 or self.shift_threshold < 1:
            raise ValueError("Euler-Maclaurin controls must be positive")

    def workprec(self, extra: int = 0):
        """Context manager setting mpmath's working precision for this context."""
        return mpmath.workdps(self.precision + _GUARD_DIGITS + int(extra))

    def round(self, x):
        """Round an mpmath value to the declared precision."""
        if is_exact(x):
            return x
        with mpmath.workdps(self.precision):
            return +x


DEFAULT_CONTEXT = ZetaContext()


# -- exact values ----------------------------------------------------------


def hurwitz_zeta_nonpos(s: int, a):
    """``zeta(s, a) = B_{1-s}(a) / (s - 1)`` for integer ``s <= 0``."""
    s = as_integer(s)
    if s is None or s > 0:
        raise ValueError("hurwitz_zeta_nonpos needs an integer s <= 0")
    return bernoulli_poly(1 - s, a) / (s - 1)


def _exact_riemann(s: int) -> Fraction:
    # zeta(-m) = -B_{m+1}/(m+1) for m >= 0 (B_1 = -1/2 gives zeta(0) = -1/2)
    m = -s
    return -bernoulli_number(m + 1) / (m + 1) if m > 0 else Fraction(-1, 2)


# -- Euler-Maclaurin core ---------------------------------------------------


def _check_args(s, a):
    if s == 1:
        raise PoleError("zeta(s, a) has a pole at s = 1")
    if mpmath.re(a) <= 0 or mpmath.im(a) != 0:
        raise ValueError("Hurwitz argument a must be real and positive")


def _em(ctx: ZetaContext, s, a, deriv: bool):
    """Euler-Maclaurin evaluation of zeta(s, a) or its s-derivative."""
    s = mpmath.mpmathify(s)
    a = mpmath.mpmathify(a)
    M = max(ctx.shift_threshold, int(abs(s)) + 1)
    # digits lost to cancellation between the head sum and the tail
    lost = max(0.0, float(1 - mpmath.re(s)) * math.log10(float(a) + M))
    with ctx.workprec(extra=math.ceil(lost)):
        eps = mpmath.mpf(10) ** (-(ctx.precision + 5))
        head = mpmath.mpf(0)
        for k in range(M):
            t = (a + k) ** (-s)
            head += -mpmath.log(a + k) * t if deriv else t
        x = a + M
        lx = mpmath.log(x)
        x1s = x ** (1 - s)
        xs = x ** (-s)
        if deriv:
            val = head - lx * x1s / (s - 1) - x1s / (s - 1) ** 2 - lx * xs / 2
        else:
            val = head + x1s / (s - 1) + xs / 2
        scale = max(abs(head), abs(x1s / (s - 1)), abs(xs), mpmath.mpf(1) * 10 ** (-ctx.precision))
        P, dP = s, mpmath.mpf(1)
        w = x ** (-s - 1) / 2
        x2 = x * x
        for j in range(1, ctx.euler_maclaurin_terms + 1):
            term = bernoulli_number(2 * j) * ((dP - P * lx) if deriv else P) * w
            val += term
            if abs(term) <= eps * scale:
                break
            f1, f2 = s + 2 * j - 1, s + 2 * j
            dP = dP * f1 * f2 + P * (f1 + f2)
            P = P * f1 * f2
            w = w / (x2 * (2 * j + 1) * (2 * j + 2))
        else:
            raise NonConvergenceError(
                f"Euler-Maclaurin did not converge in {ctx.euler_maclaurin_terms} terms for s={s}"
            )
        return val


def _real_if_possible(z):
    if isinstance(z, mpmath.mpc) and z.imag == 0:
        return z.real
    return z


def hurwitz_zeta(ctx: ZetaContext, s, a):
    """Analytic continuation of ``sum_{m >= 0} (m + a)**(-s)`` for real ``a > 0``."""
    _check_args(s, a)
    si = as_integer(s)
    if si is not None and si <= 0 and is_exact(a):
        return hurwitz_zeta_nonpos(si, a)
    return _real_if_possible(ctx.round(_em(ctx, s, a, deriv=False)))


def hurwitz_zeta_s_deriv(ctx: ZetaContext, s, a):
    """``d/ds zeta(s, a)`` by term-wise differentiated Euler-Maclaurin."""
    _check_args(s, a)
    return _real_if_possible(ctx.round(_em(ctx, s, a, deriv=True)))


def riemann_zeta(ctx: ZetaContext, s):
    si = as_integer(s)
    if si is not None and si <= 0:
        return _exact_riemann(si)
    return hurwitz_zeta(ctx, s, 1)


def riemann_zeta_deriv(ctx: ZetaContext, s):
    return hurwitz_zeta_s_deriv(ctx, s, 1)


def zeta_value(ctx: ZetaContext, s):
    """Riemann zeta, exact (Fraction) at nonpositive integers."""
    return riemann_zeta(ctx, s)


def zeta_deriv_value(ctx: ZetaContext, s):
    return riemann_zeta_deriv(ctx, s)


# -- float64 array kernel -------------------------------------------------

_F_SHIFT = 24
_F_TERMS = 18
_F_BERN = np.array(
    [float(bernoulli_number(2 * j)) for j in range(1, _F_TERMS + 1)], dtype=np.float64
)


def hurwitz_zeta_array(s: float, a, derivative: bool = False) -> np.ndarray:
    """Vectorized float64 Hurwitz zeta (or its s-derivative) over an array of ``a > 0``.

    Restricted to real ``1 < s <= 80``, where every summand is positive and
    the relative error stays below about 1e-13.
    """
    s = float(s)
    if s == 1.0:
        raise PoleError("zeta(s, a) has a pole at s = 1")
    if not 1.0 < s <= 80.0:
        raise ValueError("float kernel supports 1 < s <= 80")
    a = np.asarray(a, dtype=np.float64)
    if np.any(a <= 0):
        raise ValueError("Hurwitz argument a must be positive")
    k = np.arange(_F_SHIFT, dtype=np.float64)
    base = a[..., None] + k
    pw = base ** (-s)
    if derivative:
        head = -(np.log(base) * pw).sum(axis=-1)
    else:
        head = pw.sum(axis=-1)
    x = a + _F_SHIFT
    lx = np.log(x)
    x1s = x ** (1.0 - s)
    xs = x ** (-s)
    if derivative:
        val = head - lx * x1s / (s - 1) - x1s / (s - 1) ** 2 - lx * xs / 2
    else:
        val = head + x1s / (s - 1) + xs / 2
    P, dP = s, 1.0
    w = x ** (-s - 1) / 2
    x2 = x * x
    for j in range(1, _F_TERMS + 1):
        B = _F_BERN[j - 1]
        val = val + B * ((dP - P * lx) if derivative else P) * w
        f1, f2 = s + 2 * j - 1, s + 2 * j
        dP = dP * f1 * f2 + P * (f1 + f2)
        P = P * f1 * f2
        w = w / (x2 * (2 * j + 1) * (2 * j + 2))
    return val


# -- self test -------------------------------------------------------------


def kernel_self_test(ctx: ZetaContext, n_rational: int = 20, seed: int = 0):
    """Check the numerical kernels against exact and classical values.

    Returns a list of ``(name, error, tolerance, passed)`` rows.
    """
    import random

    rng = random.Random(seed)
    rows = []
    tol_full = mpmath.mpf(10) ** (-(ctx.precision - 2))
    worst = mpmath.mpf(0)
    for s in range(0, -11, -1):
        for _ in range(n_rational):
            q = rng.randint(2, 60)
            a = Fraction(rng.randint(1, q), q)
            exact = hurwitz_zeta_nonpos(s, a)
            with ctx.workprec():
                num = _em(ctx, s, mpmath.mpf(a.numerator) / a.denominator, deriv=False)
                err = abs(num - mpmath.mpf(exact.numerator) / exact.denominator)
                err /= max(1, abs(mpmath.mpf(exact.numerator) / exact.denominator))
            worst = max(worst, err)
    rows.append(("hurwitz_zeta vs Bernoulli values", worst, tol_full, worst <= tol_full))
    tol40 = mpmath.mpf(10) ** -40
    with ctx.workprec():
        d0 = riemann_zeta_deriv(ctx, 0)
        e0 = abs(d0 + mpmath.log(2 * mpmath.pi) / 2)
        rows.append(("zeta'(0) = -log(2 pi)/2", e0, tol40, e0 <= tol40))
        dm2 = riemann_zeta_deriv(ctx, -2)
        z3 = riemann_zeta(ctx, 3)
        e2 = abs(dm2 + z3 / (4 * mpmath.pi**2))
        rows.append(("zeta'(-2) = -zeta(3)/(4 pi^2)", e2, tol40, e2 <= tol40))
    return rows
