"""
Special values behind the convolution identities
================================================

Hurwitz zeta at nonpositive integers, the regularized bilateral sums built
from it, and the gcd-twisted Dirichlet series.  Everything printed as a
fraction is exact.
"""

from fractions import Fraction

import mpmath

from shiftconv.gcd_series import gcd_log_dirichlet, gcd_pow_dirichlet, gcd_series_direct
from shiftconv.regsum import reg_sum_pow, reg_sum_pow_log
from shiftconv.zeta import ZetaContext, hurwitz_zeta, riemann_zeta_deriv

ctx = ZetaContext(precision=30)

# At s = 0, -1, -2, ... the Hurwitz function is a Bernoulli polynomial, so
# zeta(s, 1 - a) = (-1)^(s + 1) zeta(s, a).
a = Fraction(2, 7)
for s in (0, -1, -2, -3):
    print(s, hurwitz_zeta(ctx, s, a), hurwitz_zeta(ctx, s, 1 - a))

# Those signs make the regularized sum over all of Z vanish there.
print([reg_sum_pow(ctx, s, a).value for s in range(0, -6, -1)])

# Away from the nonpositive integers it does not vanish; at s = 2 it is
# pi^2 / sin^2(pi a).
v = reg_sum_pow(ctx, 2, a).value
print(v, mpmath.pi**2 / mpmath.sin(mpmath.pi * mpmath.mpf(2) / 7) ** 2)

# the log-weighted version is a difference of s-derivatives
print(reg_sum_pow_log(ctx, 3, Fraction(1, 3)).value)

# %%
# gcd series
# ----------
# sum_c c^-s gcd(c, d)^k has an Euler product; compare with a direct partial sum.
d, s, k = 12, 3, 1
closed = gcd_pow_dirichlet(ctx, d, s, k)
direct, tail = gcd_series_direct(d, -s - k, k, 20000, ctx)
print(closed, direct, "tail bound", mpmath.nstr(tail, 3))

# exact values: -d^k/2 on the line s + k = 0, zero on s + k = -2, -4, ...
print([gcd_pow_dirichlet(ctx, d, -k, k) for k in range(-2, 3)])
print([gcd_pow_dirichlet(ctx, d, -k - 2, k) for k in range(-2, 3)])

# the log series sum_c c^-s log gcd(c, d)
print(gcd_log_dirichlet(ctx, 6, 2))
print(riemann_zeta_deriv(ctx, 0), -mpmath.log(2 * mpmath.pi) / 2)
