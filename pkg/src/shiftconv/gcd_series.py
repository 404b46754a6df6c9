"""Dirichlet series twisted by ``gcd(c, d)``.

``F_d(t1, t2) = sum_{c >= 1} c**t1 gcd(c, d)**t2`` factors as
``zeta(-t1) prod_{p | d} f_p`` with
``f_p = 1 + (1 - p**-t2) sum_{i=1}^{v_p(d)} p**(i (t1 + t2))``.
The finite product gives the continuation to all ``t1 != -1`` and, by the
product rule, both partial derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import as_integer, divisors, factorize, to_mp, von_mangoldt
from .errors import PoleError
from .zeta import ZetaContext, riemann_zeta, riemann_zeta_deriv

__all__ = [
    "GcdSeriesParams",
    "gcd_pow_dirichlet",
    "gcd_log_dirichlet",
    "gcd_series_value",
    "gcd_series_partials",
    "gcd_deriv_t1",
    "gcd_deriv_t2",
    "gcd_series_direct",
]


@dataclass(frozen=True)
class GcdSeriesParams:
    """Exponents of ``sum_c c**t1 gcd(c, d)**t2``."""

    d: int
    t1: object
    t2: object

    def __post_init__(self):
        if int(self.d) < 1:
            raise ValueError("d must be positive")

    @classmethod
    def from_sk(cls, d: int, s, k) -> "GcdSeriesParams":
        """The series ``sum_c gcd(c, d)**k / c**(s + k)``."""
        return cls(d, -s - k, k)

    def value(self, ctx: ZetaContext):
        return gcd_series_value(ctx, self.d, self.t1, self.t2)

    def partials(self, ctx: ZetaContext):
        return gcd_series_partials(ctx, self.d, self.t1, self.t2)


def _local_factor_exact(p: int, v: int, t1: int, t2: int) -> Fraction:
    q = Fraction(p) ** (t1 + t2)
    return 1 + (1 - Fraction(p) ** (-t2)) * sum(q**i for i in range(1, v + 1))


def gcd_series_value(ctx: ZetaContext, d: int, t1, t2):
    """``F_d(t1, t2)`` under continuation; exact when ``t1 <= 0``, ``t2`` are integers."""
    if d < 1:
        raise ValueError("d must be positive")
    if t1 == -1:
        raise PoleError("F_d(t1, t2) has a pole at t1 = -1")
    i1, i2 = as_integer(t1), as_integer(t2)
    fac = factorize(d).factors
    z = riemann_zeta(ctx, -t1) if i1 is None else riemann_zeta(ctx, -i1)
    if i1 is not None and i2 is not None and isinstance(z, Fraction):
        prod = Fraction(1)
        for p, v in fac:
            prod *= _local_factor_exact(p, v, i1, i2)
        return z * prod
    if z == 0:
        return mpmath.mpf(0)
    with ctx.workprec():
        t1m, t2m = mpmath.mpmathify(t1), mpmath.mpmathify(t2)
        prod = mpmath.mpf(1)
        for p, v in fac:
            q = mpmath.power(p, t1m + t2m)
            prod *= 1 + (1 - mpmath.power(p, -t2m)) * mpmath.fsum(q**i for i in range(1, v + 1))
        return ctx.round(to_mp(z) * prod)


def gcd_pow_dirichlet(ctx: ZetaContext, d: int, s, k):
    """``sum_c gcd(c, d)**k / c**(s + k)`` continued in ``(s, k)``."""
    if s + k == 1:
        raise PoleError("pole at s + k = 1")
    return gcd_series_value(ctx, d, -s - k, k)


def gcd_log_dirichlet(ctx: ZetaContext, d: int, s):
    """``sum_c log(gcd(c, d)) / c**s = zeta(s) sum_{l | d} Lambda(l) l**-s``."""
    if s == 1:
        raise PoleError("pole at s = 1")
    if d < 1:
        raise ValueError("d must be positive")
    z = riemann_zeta(ctx, s)
    if z == 0 or d == 1:
        return mpmath.mpf(0)
    with ctx.workprec():
        sm = mpmath.mpmathify(s)
        acc = mpmath.fsum(
            von_mangoldt(ell) * mpmath.power(ell, -sm) for ell in divisors(d) if ell > 1
        )
        return ctx.round(to_mp(z) * acc)


def gcd_series_partials(ctx: ZetaContext, d: int, t1, t2):
    """``(F, dF/dt1, dF/dt2)`` at ``(t1, t2)``, from the Euler product by the product rule."""
    if d < 1:
        raise ValueError("d must be positive")
    if t1 == -1:
        raise PoleError("F_d(t1, t2) has a pole at t1 = -1")
    fac = factorize(d).factors
    with ctx.workprec():
        t1m, t2m = mpmath.mpmathify(t1), mpmath.mpmathify(t2)
        z = to_mp(riemann_zeta(ctx, -t1))
        dz = -riemann_zeta_deriv(ctx, -t1)  # d/dt1 zeta(-t1)
        vals, d1s, d2s = [], [], []
        for p, v in fac:
            lp = mpmath.log(p)
            q = mpmath.power(p, t1m + t2m)
            w = 1 - mpmath.power(p, -t2m)
            geo = mpmath.fsum(q**i for i in range(1, v + 1))
            dgeo = mpmath.fsum(i * lp * q**i for i in range(1, v + 1))
            vals.append(1 + w * geo)
            d1s.append(w * dgeo)
            d2s.append(lp * mpmath.power(p, -t2m) * geo + w * dgeo)
        prod = mpmath.fprod(vals) if vals else mpmath.mpf(1)
        sum1 = mpmath.mpf(0)
        sum2 = mpmath.mpf(0)
        for j in range(len(vals)):
            others = mpmath.fprod(vals[:j] + vals[j + 1 :]) if len(vals) > 1 else mpmath.mpf(1)
            sum1 += d1s[j] * others
            sum2 += d2s[j] * others
        F = z * prod
        F1 = dz * prod + z * sum1
        F2 = z * sum2
        return ctx.round(F), ctx.round(F1), ctx.round(F2)


def gcd_deriv_t1(ctx: ZetaContext, d: int, r):
    """``d/dt1 F_d`` at ``(r, 0)``, which is ``-zeta'(-r)``."""
    return gcd_series_partials(ctx, d, r, 0)[1]


def gcd_deriv_t2(ctx: ZetaContext, d: int, r):
    """``d/dt2 F_d`` at ``(r, 0)``, which is ``zeta(-r) sum_{l | d} Lambda(l) l**r``."""
    return gcd_series_partials(ctx, d, r, 0)[2]


def gcd_series_direct(d: int, t1, t2, cutoff: int, ctx: ZetaContext | None = None):
    """Partial sum ``sum_{c <= cutoff} c**t1 gcd(c, d)**t2`` and a bound on the rest.

    The bound ``G cutoff**(s + 1) / -(s + 1)`` with ``s = Re t1`` and
    ``G = max_{g | d} g**Re t2`` dominates the tail by an integral comparison.
    """
    re1 = float(mpmath.re(t1))
    re12 = float(mpmath.re(mpmath.mpmathify(t1) + t2))
    if re1 >= -1 or re12 >= -1:
        raise ValueError("direct series needs Re t1 < -1 and Re(t1 + t2) < -1")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    prec = ctx.workprec() if ctx is not None else mpmath.workdps(mpmath.mp.dps)
    with prec:
        t1m, t2m = mpmath.mpmathify(t1), mpmath.mpmathify(t2)
        gpow = {g: mpmath.power(g, t2m) for g in divisors(d)}
        value = mpmath.fsum(mpmath.power(c, t1m) * gpow[math.gcd(c, d)] for c in range(1, cutoff + 1))
        G = max(abs(x) for x in gpow.values())
        tail = G * mpmath.power(cutoff, re1 + 1) / -(re1 + 1)
        if ctx is not None:
            value = ctx.round(value)
    return value, tail
