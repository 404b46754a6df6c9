"""
Power- and log-weighted convolution sums
========================================

Truncate sum sigma_r1(n1) sigma_r2(n2) n2^P at |n1| <= N and compare with the
right-hand side assembled from zeta values, gcd series and regularized sums.
"""

import mpmath

from shiftconv.arith import to_mp
from shiftconv.convsum import lhs_log_truncated, lhs_pow_truncated
from shiftconv.identities import (
    ConvolutionSpec,
    informal_value_pow,
    theorem1_rhs,
    theorem2_rhs,
)
from shiftconv.zeta import ZetaContext

ctx = ZetaContext(precision=30)
n, r1, r2, P = 6, -3, -2, -6

rhs = theorem1_rhs(ctx, ConvolutionSpec(n, r1, r2, P), d_cutoff=300)
for name, value in rhs.terms.items():
    print(f"{name:22s} {mpmath.nstr(to_mp(value), 15)}")
print("total", mpmath.nstr(rhs.total, 15), "d-tail estimate", f"{rhs.tail_estimate:.1e}")

# the direct sum with its rigorous tail bound
for N in (10**3, 10**4, 10**5):
    lhs = lhs_pow_truncated(ctx, n, r1, r2, P, N)
    gap = abs(float(to_mp(lhs.value) - to_mp(rhs.total)))
    print(N, lhs.value, f"|lhs - rhs| = {gap:.1e}", f"tail <= {lhs.tail_bound:.1e}")

# %%
# The log weight n2^Q log|n2| works the same way.
rhs = theorem2_rhs(ctx, ConvolutionSpec(2, -3, -5, -6, with_log=True), d_cutoff=300)
lhs = lhs_log_truncated(ctx, 2, -3, -5, -6, 10**5)
print(mpmath.nstr(rhs.total, 15), lhs.value)

# %%
# Outside the convergent range the d-sum still collapses when r2 is even and
# r2 + P >= 0: the right-hand side becomes a finite expression.
spec = ConvolutionSpec(6, -3, 2, -2)
rhs = theorem1_rhs(ctx, spec, d_cutoff=40)
print(rhs.notes)
print(mpmath.nstr(rhs.total, 20), mpmath.nstr(to_mp(informal_value_pow(ctx, 6, -3, 2, -2)), 20))
