"""Integer solutions of ``a d - b c = n`` and the lattice sums built on them.

For fixed ``(n, c, d)`` with ``g = gcd(c, d)`` dividing ``n`` the solutions
form one arithmetic progression ``b = b* + m (d/g)``, ``a = a* + m (c/g)``.
Writing ``u = b* g / d`` and ``v = c d / g`` gives ``b c = (m + u) v``, which
turns a sum of ``f(bc)`` over the solutions into a bilateral sum over a
shifted lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import to_mp
from .regsum import continued_sign, reg_sum_pow, reg_sum_pow_log
from .zeta import ZetaContext, riemann_zeta, riemann_zeta_deriv

__all__ = [
    "SolutionFamily",
    "balanced_residue",
    "solution_family",
    "enumerate_solutions",
    "family_members",
    "t_pow",
    "t_pow_log",
]


@dataclass(frozen=True)
class SolutionFamily:
    n: int
    c: int
    d: int
    g: int
    b_star: int
    a_star: int
    step: int
    u: Fraction
    v: Fraction

    def member(self, m: int) -> tuple[int, int]:
        """The solution ``(a, b)`` with index ``m``."""
        return self.a_star + m * (self.c // self.g), self.b_star + m * self.step


def balanced_residue(x: int, m: int) -> int:
    """Representative of ``x mod m`` in ``(-m/2, m/2]``."""
    r = x % m
    if 2 * r > m:
        r -= m
    return r


def solution_family(n: int, c: int, d: int) -> SolutionFamily | None:
    """Bezout data for ``a d - b c = n``, or None when ``gcd(c, d)`` does not divide ``n``.

    ``b*`` has minimal absolute value; at a tie the positive one is taken, so
    ``u`` lies in ``(-1/2, 1/2]``.
    """
    if n == 0 or c < 1 or d < 1:
        raise ValueError("need n != 0 and c, d >= 1")
    g = math.gcd(c, d)
    if n % g:
        return None
    step = d // g
    if step == 1:
        b_star = 0
    else:
        # b (c/g) = -n/g  (mod d/g)
        b_star = balanced_residue(-(n // g) * pow(c // g, -1, step), step)
    a_star, rem = divmod(n + b_star * c, d)
    assert rem == 0
    return SolutionFamily(n, c, d, g, b_star, a_star, step, Fraction(b_star, step), Fraction(c * d, g))


def enumerate_solutions(n: int, c: int, d: int, M: int) -> list[tuple[int, int]]:
    """All ``(a, b)`` with ``a, b != 0``, ``a d - b c = n`` and ``|b| <= M``, by exhaustive scan."""
    if M < 1:
        raise ValueError("M must be positive")
    out = []
    for b in range(-M, M + 1):
        if b == 0:
            continue
        a, rem = divmod(n + b * c, d)
        if rem == 0 and a != 0:
            out.append((a, b))
    return out


def family_members(fam: SolutionFamily, M: int) -> list[tuple[int, int]]:
    """Members of the family with ``|b| <= M`` after dropping ``a = 0`` and ``b = 0``."""
    lo = -((M + fam.b_star) // fam.step)
    hi = (M - fam.b_star) // fam.step
    out = []
    for m in range(lo, hi + 1):
        a, b = fam.member(m)
        if a != 0 and b != 0:
            out.append((a, b))
    return out


def _even_factor(ctx: ZetaContext, x):
    # e^{i pi x} + 1, exact 2 or 0 at integers
    sign = continued_sign(ctx, x)
    return sign + 1


def t_pow(ctx: ZetaContext, n: int, c: int, d: int, P: int):
    """``sum f(bc)`` over solutions with ``a, b != 0`` for ``f(x) = x**P``.

    Divergent bilateral sums carry their regularized values.  The ``m``-term
    with ``b c = 0`` is never included.
    """
    fam = solution_family(n, c, d)
    if fam is None:
        return 0
    P = int(P)
    # a = 0 is a member exactly when c | n, with b c = -n
    corr = Fraction(-n) ** P if n % c == 0 else 0
    if fam.u == 0:
        E = _even_factor(ctx, P)
        if E == 0:
            return -corr
        z = riemann_zeta(ctx, -P)
        main = fam.v**P * E * z
    else:
        main = fam.v**P * reg_sum_pow(ctx, -P, fam.u).value
    if isinstance(main, Fraction) or isinstance(main, int):
        return main - corr
    with ctx.workprec():
        return ctx.round(main - to_mp(corr))


def t_pow_log(ctx: ZetaContext, n: int, c: int, d: int, Q: int):
    """As :func:`t_pow` with ``f(x) = x**Q log|x|``."""
    fam = solution_family(n, c, d)
    if fam is None:
        return 0
    Q = int(Q)
    with ctx.workprec():
        corr = mpmath.mpf(-n) ** Q * mpmath.log(abs(n)) if n % c == 0 else mpmath.mpf(0)
        vQ = to_mp(fam.v**Q)
        lv = mpmath.log(to_mp(fam.v))
        if fam.u == 0:
            E = _even_factor(ctx, Q)
            if E == 0:
                return ctx.round(-corr)
            main = vQ * E * (lv * to_mp(riemann_zeta(ctx, -Q)) - riemann_zeta_deriv(ctx, -Q))
        else:
            r = to_mp(reg_sum_pow(ctx, -Q, fam.u).value)
            rl = reg_sum_pow_log(ctx, -Q, fam.u).value
            main = vQ * (lv * r + rl)
        return ctx.round(main - corr)
