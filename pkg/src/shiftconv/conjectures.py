"""Numerical checks of conjectured convolution identities with general weights.

Each check sums ``sigma_r1(n1) sigma_r2(n2) phi(n1, n2)`` along a ladder of
cutoffs, extrapolates the limit with a tail model read off the weight's
diagonal expansion, and compares against a closed form.

The weight family ``phi = sum_j a_j n1^j + b_j n2^j + c_j n1^j log|n1| +
d_j n2^j log|n2|`` with ``phi(x, n - x) = o(1/x)`` is a linear space; a basis
is computed exactly in scaled coordinates ``a_j = alpha_j n**-j``, where the
decay conditions no longer involve ``n``.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy

from .arith import sigma, to_mp
from .convsum import (
    SigmaCache,
    TruncationConfig,
    decay_hint,
    extrapolate,
    lhs_partial_sums,
)
from .errors import DecayConstraintWarning, NonConvergenceError
from .weights import (
    WeightSpec,
    chester_weight,
    conj13_second_weight,
    eq19_weight,
    weight_asymptotics,
)
from .zeta import ZetaContext, riemann_zeta, riemann_zeta_deriv

__all__ = [
    "ConjectureReport",
    "DecayConstraints",
    "IDENTITIES",
    "DEFAULT_TOLERANCE",
    "check_identity",
    "chester_check",
    "chester_rhs",
    "conj13_first_check",
    "conj13_first_rhs",
    "conj13_second_check",
    "conj13_second_rhs",
    "decay_constraints",
    "footnote_prediction",
    "footnote_prediction_expr",
    "footnote_family_scan",
    "summarize_scan",
]

DEFAULT_TOLERANCE = 1e-3


@dataclass
class ConjectureReport:
    """Outcome of comparing an extrapolated sum with its predicted value.

    ``verdict`` is ``"pass"`` when the discrepancy and the error bar are both
    within ``tolerance``, ``"inconclusive"`` when only the error bar is too
    large, ``"fail"`` otherwise, and ``"nonconvergent"`` when the ladder could
    not be extrapolated (``reason`` says why).
    """

    identity: str
    n: int
    r1: object
    r2: object
    ladder: list
    lhs: object
    rhs: object
    discrepancy: object
    error_bar: float
    tolerance: float
    verdict: str
    decay_alpha: float | None = None
    decay_beta: int | None = None
    reason: str = ""
    degree: int | None = None
    sample: int | None = None
    coefficients: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def ratio(self) -> float:
        """``|discrepancy| / error_bar``; how many error bars apart the two sides are."""
        if self.discrepancy is None:
            return float("nan")
        d = abs(complex(self.discrepancy))
        if self.error_bar == 0:
            return float("inf") if d else 0.0
        return d / self.error_bar


def _tolerance(rhs, rel: float) -> float:
    scale = abs(complex(rhs))
    return rel * scale if scale else rel


def _verdict(disc, err: float, tol: float) -> str:
    if abs(complex(disc)) <= tol and err <= tol:
        return "pass"
    if err > tol and abs(complex(disc)) <= err:
        return "inconclusive"
    return "fail"


def check_identity(
    identity: str,
    n: int,
    r1,
    r2,
    w: WeightSpec,
    rhs,
    trunc: TruncationConfig | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int = 1,
    cache: SigmaCache | None = None,
) -> ConjectureReport:
    """Extrapolate the weighted sum along ``trunc`` and compare with ``rhs``."""
    if n == 0:
        raise ValueError("n must be nonzero")
    trunc = trunc or TruncationConfig()
    hint = decay_hint(w, r1, r2, n, orders=trunc.extrapolation_order)
    ladder = lhs_partial_sums(n, r1, r2, w, trunc.points(), threads=threads, cache=cache)
    rhs_c = complex(rhs)
    rhs_out = rhs_c.real if rhs_c.imag == 0 else rhs_c
    tol = _tolerance(rhs_c, tolerance)
    base = dict(
        identity=identity,
        n=n,
        r1=r1,
        r2=r2,
        ladder=ladder,
        rhs=rhs_out,
        tolerance=tol,
        decay_alpha=hint.alpha,
        decay_beta=hint.beta,
    )
    try:
        lhs, err = extrapolate(ladder, hint)
    except NonConvergenceError as exc:
        return ConjectureReport(
            lhs=None, discrepancy=None, error_bar=float("inf"), verdict="nonconvergent", reason=str(exc), **base
        )
    disc = lhs - rhs_out
    return ConjectureReport(lhs=lhs, discrepancy=disc, error_bar=err, verdict=_verdict(disc, err, tol), **base)


# -- closed forms ----------------------------------------------------------------


def _log4pi2n(n: int):
    return mpmath.log(4 * mpmath.pi**2 * abs(n))


def conj13_first_rhs(ctx: ZetaContext, n: int):
    """``sigma_0(n) (2 - log(4 pi^2 |n|))``."""
    with ctx.workprec():
        return ctx.round(to_mp(sigma(n, 0)) * (2 - _log4pi2n(n)))


def conj13_second_rhs(ctx: ZetaContext, n: int):
    """``sigma_0(n) (11/3 - log(4 pi^2 |n|))``."""
    with ctx.workprec():
        return ctx.round(to_mp(sigma(n, 0)) * (mpmath.mpf(11) / 3 - _log4pi2n(n)))


def chester_rhs(ctx: ZetaContext, n: int):
    """``2 sigma_2(n) (zeta(2) n^2 / 4 + 15 zeta'(-2))``."""
    with ctx.workprec():
        z2 = to_mp(riemann_zeta(ctx, 2))
        dz = riemann_zeta_deriv(ctx, -2)
        return ctx.round(2 * to_mp(sigma(n, 2)) * (z2 * mpmath.mpf(n) ** 2 / 4 + 15 * dz))


# identity id -> (r1, r2, weight constructor, closed form)
IDENTITIES = {
    "eq1.9": (0, 0, eq19_weight, conj13_first_rhs),
    "conj13b": (0, 0, conj13_second_weight, conj13_second_rhs),
    "chester": (2, 2, chester_weight, chester_rhs),
}


def _named_check(identity, ctx, n, trunc, tolerance, **kw):
    if n == 0:
        raise ValueError("n must be nonzero")
    r1, r2, make, rhs = IDENTITIES[identity]
    return check_identity(identity, n, r1, r2, make(n), rhs(ctx, n), trunc, tolerance, **kw)


def chester_check(ctx: ZetaContext, n: int, trunc: TruncationConfig | None = None, tolerance=DEFAULT_TOLERANCE, **kw):
    return _named_check("chester", ctx, n, trunc, tolerance, **kw)


def conj13_first_check(ctx: ZetaContext, n: int, trunc: TruncationConfig | None = None, tolerance=DEFAULT_TOLERANCE, **kw):
    return _named_check("eq1.9", ctx, n, trunc, tolerance, **kw)


def conj13_second_check(ctx: ZetaContext, n: int, trunc: TruncationConfig | None = None, tolerance=DEFAULT_TOLERANCE, **kw):
    return _named_check("conj13b", ctx, n, trunc, tolerance, **kw)


# -- the weight family -----------------------------------------------------------


@dataclass(frozen=True)
class DecayConstraints:
    """Linear conditions for ``phi(x, n - x) = o(1/x)`` on weights of a given degree.

    ``variables`` orders the unknowns as ``a_0..a_D, b_0..b_D, c_0..c_D,
    d_0..d_D``.  ``matrix`` acts on the scaled unknowns (``a_j = alpha_j
    n**-j``) and is rational; ``matrix_in_n`` acts on the raw unknowns and has
    polynomial entries in the symbol ``n``.  ``basis`` spans the scaled
    solution space.
    """

    degree: int
    variables: tuple
    matrix: sympy.Matrix
    matrix_in_n: sympy.Matrix
    basis: tuple  # tuples of Fractions

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def weight(self, vec, n, label: str = "") -> WeightSpec:
        """The weight with scaled coefficient vector ``vec`` at shift ``n``."""
        D = self.degree
        vec = [Fraction(x) for x in vec]
        if len(vec) != 4 * (D + 1):
            raise ValueError("coefficient vector has the wrong length")
        parts = [vec[i * (D + 1) : (i + 1) * (D + 1)] for i in range(4)]
        return WeightSpec.from_scaled(*parts, n, label=label or f"family-d{D}")

    def contains(self, vec) -> bool:
        v = sympy.Matrix([sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in vec])
        return all(x == 0 for x in self.matrix * v)


def _decay_rows(w: WeightSpec, n, unknowns) -> list:
    exp = weight_asymptotics(w, n, w.degree + 3)
    rows = []
    for p, _, c in exp.terms:
        if p < -1:
            continue
        c = sympy.expand(c)
        if c != 0:
            rows.append([c.coeff(u) for u in unknowns])
    return rows


def decay_constraints(degree: int) -> DecayConstraints:
    """Exact constraint system and solution basis for the degree-``degree`` family."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    D = int(degree)
    names = [f"{k}{j}" for k in "abcd" for j in range(D + 1)]
    unknowns = sympy.symbols(names)
    blocks = [unknowns[i * (D + 1) : (i + 1) * (D + 1)] for i in range(4)]
    # scaled coordinates: n drops out, take n = 1
    w1 = WeightSpec({j: tuple(b[j] for b in blocks) for j in range(D + 1)}, "symbolic")
    M = sympy.Matrix(_decay_rows(w1, 1, unknowns))
    nsym = sympy.Symbol("n", nonzero=True)
    Mn = sympy.Matrix(_decay_rows(w1, nsym, unknowns))
    basis = []
    for vec in M.nullspace():
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in vec])
        basis.append(tuple(Fraction(int(x * den)) for x in vec))
    return DecayConstraints(D, tuple(unknowns), M, Mn, tuple(basis))


def _footnote_terms(w: WeightSpec):
    if w.min_power < 0:
        raise ValueError("the predicted value is only defined for nonnegative powers")
    return [(j, w.coefficient("a", j) + w.coefficient("b", j), w.coefficient("c", j) + w.coefficient("d", j)) for j in range(w.degree + 1)]


def _check_decay(w: WeightSpec, n) -> None:
    exp = weight_asymptotics(w, n, w.degree + 3)
    if not exp.decays_faster_than(-1):
        warnings.warn("weight does not decay faster than 1/|n1| on the diagonal", DecayConstraintWarning, stacklevel=3)


def footnote_prediction(ctx: ZetaContext, w: WeightSpec, n: int):
    """Predicted limit ``sigma_0(n)[A_0 + C_0 log(sqrt|n| / 2 pi) + 1/2 sum_{j>=1} (A_j + C_j log|n|) n**j]``.

    Here ``A_j = a_j + b_j`` and ``C_j = c_j + d_j``.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    terms = _footnote_terms(w)
    _check_decay(w, n)
    with ctx.workprec():
        ln = mpmath.log(abs(n))
        total = mpmath.mpf(0)
        for j, A, C in terms:
            A, C = to_mp(A), to_mp(C)
            if j == 0:
                total += A + C * (ln / 2 - mpmath.log(2 * mpmath.pi))
            else:
                total += (A + C * ln) * mpmath.mpf(n) ** j / 2
        return ctx.round(to_mp(sigma(n, 0)) * total)


def footnote_prediction_expr(w: WeightSpec, n):
    """The bracket of :func:`footnote_prediction` as a sympy expression (without ``sigma_0``).

    ``n`` may be a positive sympy symbol, in which case ``|n| = n``.
    """
    terms = _footnote_terms(w)
    ln = sympy.log(sympy.Abs(n))
    total = sympy.Integer(0)
    for j, A, C in terms:
        A, C = sympy.sympify(A), sympy.sympify(C)
        if j == 0:
            total += A + C * (ln / 2 - sympy.log(2 * sympy.pi))
        else:
            total += (A + C * ln) * n**j / 2
    return total


def footnote_family_scan(
    ctx: ZetaContext,
    degree: int,
    n_set=(1,),
    trunc: TruncationConfig | None = None,
    samples: int = 8,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    coefficient_range: int = 3,
    threads: int = 1,
    cache: SigmaCache | None = None,
) -> list[ConjectureReport]:
    """Compare extrapolated sums with the predicted value on random members of the family.

    Each sample is an integer combination of the constraint-space basis with
    coefficients drawn from ``[-coefficient_range, coefficient_range]`` by a
    generator seeded with ``seed``, so the same call always tests the same
    weights.  A sample whose weight vanishes on the diagonal has a left side
    of exactly 0 and is compared with the prediction without summing.
    """
    if not 0 <= degree <= 8:
        raise ValueError("degree must lie in 0..8")
    cons = decay_constraints(degree)
    rng = random.Random(seed)
    reports = []
    drawn = 0
    while drawn < samples:
        mult = [rng.randint(-coefficient_range, coefficient_range) for _ in cons.basis]
        if not any(mult):
            continue
        vec = [sum(m * b[i] for m, b in zip(mult, cons.basis)) for i in range(len(cons.variables))]
        for n in n_set:
            w = cons.weight(vec, n)
            with warnings.catch_warnings():
                warnings.simplefilter("error", DecayConstraintWarning)
                rhs = footnote_prediction(ctx, w, n)
            if _vanishes_on_diagonal(w, n):
                # every term of the sum is zero, so the left side is exactly 0
                tol = _tolerance(rhs, tolerance)
                report = ConjectureReport(
                    f"family-d{degree}", n, 0, 0, [], Fraction(0), rhs, -rhs, 0.0, tol,
                    _verdict(-rhs, 0.0, tol), reason="weight vanishes on the diagonal; the sum is exactly 0",
                )
            else:
                report = check_identity(
                    f"family-d{degree}", n, 0, 0, w, rhs, trunc, tolerance, threads=threads, cache=cache
                )
            report.degree = degree
            report.sample = drawn
            report.coefficients = {str(v): str(x) for v, x in zip(cons.variables, vec) if x}
            reports.append(report)
        drawn += 1
    return reports


def _vanishes_on_diagonal(w: WeightSpec, n: int) -> bool:
    # the diagonal restriction is analytic in 1/x, so a long zero expansion means zero
    return not weight_asymptotics(w, n, w.degree + 16).nonzero()


def summarize_scan(reports) -> dict:
    """Per-degree counts of verdicts and the largest discrepancy ratio."""
    out: dict = {}
    for r in reports:
        row = out.setdefault(r.degree, {"pass": 0, "fail": 0, "inconclusive": 0, "nonconvergent": 0, "max_ratio": 0.0})
        row[r.verdict] += 1
        if r.discrepancy is not None:
            row["max_ratio"] = max(row["max_ratio"], r.ratio)
    return out
