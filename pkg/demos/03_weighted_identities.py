"""
Weighted sums and where the pattern stops
=========================================

Three weights whose sums have known or conjectured closed forms, then a scan
over random weights of growing degree.
"""

import mpmath

from shiftconv.conjectures import (
    chester_check,
    conj13_first_check,
    decay_constraints,
    footnote_family_scan,
    summarize_scan,
)
from shiftconv.convsum import TruncationConfig
from shiftconv.weights import eq19_weight, weight_asymptotics
from shiftconv.zeta import ZetaContext

ctx = ZetaContext(precision=30)

# The weight 2 + (n2 - n1)/n log|n1/n2| falls off like -n^2/(6 n1^2) along n1 + n2 = n,
# which is what makes the unweighted divisor sums converge.
print(weight_asymptotics(eq19_weight(1), 1, 6).leading())

# Partial sums on a log-spaced ladder, extrapolated with the N^-1 log^2 N tail.
rep = conj13_first_check(ctx, 6)
print(rep.verdict, rep.lhs, mpmath.nstr(rep.rhs, 15), f"+- {rep.error_bar:.1e}")
for N, S in rep.ladder[::8]:
    print(f"  N={N:>6d}  S_N={S:.12f}")

rep = chester_check(ctx, 3)
print(rep.verdict, rep.lhs, mpmath.nstr(rep.rhs, 15), f"+- {rep.error_bar:.1e}")

# %%
# The weight family
# -----------------
# Weights of degree D with a fast enough decay form a space of dimension 2D + 1.
for D in range(6):
    print(D, decay_constraints(D).dimension)

# A cheaper ladder is enough to see the change at degree 5.
trunc = TruncationConfig((1000, 10_000, 50_000), points_per_decade=10)
reports = []
for D in (3, 4, 5):
    reports += footnote_family_scan(ctx, D, n_set=(1,), trunc=trunc, samples=4, seed=7)
for D, row in sorted(summarize_scan(reports).items()):
    print(D, row)

# The degree-5 misses are not noise: they sit hundreds of error bars away.
for r in reports:
    if r.degree == 5:
        print(r.sample, r.verdict, f"{float(r.discrepancy):+.6f}", f"{r.ratio:.3g}")
