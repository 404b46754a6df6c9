"""Regularized bilateral sums over a shifted integer lattice.

``sum_{m in Z} (m + a)**(-s)`` is assigned the value
``zeta(s, a) + e^{i pi s} zeta(s, 1 - a)`` with ``a`` reduced into (0, 1),
and the log-weighted sum ``sum_{m in Z} (m + a)**(-s) log|m + a|`` the value
``-(d_s zeta(s, a) + e^{i pi s} d_s zeta(s, 1 - a))``.  Both agree with the
convergent series whenever it converges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .arith import as_integer, is_exact
from .errors import PoleError
from .zeta import ZetaContext, hurwitz_zeta, hurwitz_zeta_array, hurwitz_zeta_s_deriv

__all__ = [
    "RegularizedSumValue",
    "reduce_mod_one",
    "continued_sign",
    "reg_sum_pow",
    "reg_sum_pow_log",
    "reg_sum_pow_array",
    "reg_sum_pow_log_array",
]


@dataclass(frozen=True)
class RegularizedSumValue:
    value: object
    mode: str  # "exact" or "numeric"
    s: object
    a: object

    def __complex__(self):
        return complex(self.value)


def reduce_mod_one(a):
    """Fractional part of ``a`` in [0, 1), exact for rational input."""
    if is_exact(a):
        a = Fraction(a)
        return a - math.floor(a)
    a = mpmath.mpmathify(a)
    return a - mpmath.floor(a)


def continued_sign(ctx: ZetaContext, s):
    """``e^{i pi s}``; exactly ``(-1)**s`` for integer ``s``."""
    k = as_integer(s)
    if k is not None:
        return -1 if k % 2 else 1
    with ctx.workprec():
        return mpmath.expjpi(mpmath.mpmathify(s))


def _reduced(a):
    ar = reduce_mod_one(a)
    if ar == 0:
        raise ValueError("regularized sum needs a non-integer shift a")
    return ar


def reg_sum_pow(ctx: ZetaContext, s, a) -> RegularizedSumValue:
    """Regularized ``sum_{m in Z} (m + a)**(-s)``."""
    if s == 1:
        raise PoleError("regularized sum has a pole at s = 1")
    ar = _reduced(a)
    sign = continued_sign(ctx, s)
    k = as_integer(s)
    exact = k is not None and k <= 0 and is_exact(ar)
    if exact:
        value = hurwitz_zeta(ctx, k, ar) + sign * hurwitz_zeta(ctx, k, 1 - ar)
        return RegularizedSumValue(value, "exact", k, a)
    with ctx.workprec():
        if is_exact(ar):
            ar = mpmath.mpf(ar.numerator) / ar.denominator
        value = hurwitz_zeta(ctx, s, ar) + sign * hurwitz_zeta(ctx, s, 1 - ar)
    return RegularizedSumValue(ctx.round(value), "numeric", s, a)


def reg_sum_pow_log(ctx: ZetaContext, s, a) -> RegularizedSumValue:
    """Regularized ``sum_{m in Z} (m + a)**(-s) log|m + a|``."""
    if s == 1:
        raise PoleError("regularized sum has a pole at s = 1")
    ar = _reduced(a)
    sign = continued_sign(ctx, s)
    with ctx.workprec():
        if is_exact(ar):
            ar = mpmath.mpf(ar.numerator) / ar.denominator
        value = -(hurwitz_zeta_s_deriv(ctx, s, ar) + sign * hurwitz_zeta_s_deriv(ctx, s, 1 - ar))
    return RegularizedSumValue(ctx.round(value), "numeric", s, a)


def reg_sum_pow_array(s: int, a) -> np.ndarray:
    """Float64 ``reg_sum_pow`` for an integer ``s >= 2`` over an array of shifts."""
    s = int(s)
    if s < 2:
        raise ValueError("array kernel needs an integer s >= 2")
    ar = np.mod(np.asarray(a, dtype=np.float64), 1.0)
    if np.any(ar == 0):
        raise ValueError("regularized sum needs non-integer shifts")
    sign = -1.0 if s % 2 else 1.0
    return hurwitz_zeta_array(s, ar) + sign * hurwitz_zeta_array(s, 1.0 - ar)


def reg_sum_pow_log_array(s: int, a) -> np.ndarray:
    """Float64 ``reg_sum_pow_log`` for an integer ``s >= 2``."""
    s = int(s)
    if s < 2:
        raise ValueError("array kernel needs an integer s >= 2")
    ar = np.mod(np.asarray(a, dtype=np.float64), 1.0)
    if np.any(ar == 0):
        raise ValueError("regularized sum needs non-integer shifts")
    sign = -1.0 if s % 2 else 1.0
    return -(hurwitz_zeta_array(s, ar, True) + sign * hurwitz_zeta_array(s, 1.0 - ar, True))
