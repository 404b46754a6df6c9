"""Exact right-hand sides for power and power-log weighted convolution sums.

Writing ``n1 = a d`` and ``n2 = -b c`` turns

    S_P = sum_{n1 + n2 = n} sigma_r1(n1) sigma_r2(n2) n2**P

into ``(-1)**P sum_d d**r1 sum_c c**r2 sum_{ad - bc = n} (bc)**P``.  The
inner lattice sums are evaluated per ``d``: divisors of ``n`` give gcd-twisted
Dirichlet series, the remaining ``d`` give finite sums of Hurwitz values
against regularized bilateral sums.  The log-weighted sum ``S_Q^log`` (weight
``n2**Q log|n2|``) is handled the same way.

For ``d`` not dividing ``n`` the per-``d`` term does not decay like
``d**(r1 + r2 + 2P)``: solutions with ``a = 0`` contribute
``d**r1 n**P sigma_r2(n)`` for every ``d``.  That part is summed in closed
form beyond the cutoff (``d_tail``), and only the genuinely decaying rest is
bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .arith import as_integer, divisors, is_exact, sigma, to_mp
from .errors import BranchNotCoveredError
from .gcd_series import gcd_series_partials, gcd_series_value
from .lattice import solution_family
from .regsum import (
    reg_sum_pow,
    reg_sum_pow_array,
    reg_sum_pow_log,
    reg_sum_pow_log_array,
)
from .zeta import (
    ZetaContext,
    hurwitz_zeta,
    hurwitz_zeta_array,
    hurwitz_zeta_s_deriv,
    riemann_zeta,
    riemann_zeta_deriv,
)

__all__ = [
    "ConvolutionSpec",
    "RhsBreakdown",
    "delta_even_continued",
    "admissible_residues",
    "lemma31_term",
    "lemma32_term",
    "theorem1_rhs",
    "theorem2_rhs",
    "informal_value_pow",
    "informal_value_log",
    "vanishing_inner_sum",
    "vanishing_inner_sum_log",
    "pow_inner_vanishes",
    "log_inner_vanishes",
    "is_convergent",
]

_FLOAT_AUTO_CUTOFF = 40
_EPS = 2.0**-52


@dataclass(frozen=True)
class ConvolutionSpec:
    """``sum sigma_r1(n1) sigma_r2(n2) n2**exponent`` (times ``log|n2|`` when ``with_log``)."""

    n: int
    r1: object
    r2: object
    exponent: int
    with_log: bool = False

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("n must be nonzero")
        if as_integer(self.exponent) is None:
            raise ValueError("exponent must be an integer")
        if mpmath.im(self.r2) != 0:
            raise ValueError("r2 must be real")
        object.__setattr__(self, "exponent", int(self.exponent))


@dataclass
class RhsBreakdown:
    terms: dict
    d_cutoff: int
    total: object
    tail_estimate: float
    converged: bool = True
    kernel: str = "mp"
    notes: list = field(default_factory=list)


# -- small numeric helpers ----------------------------------------------------


def delta_even_continued(x):
    """``e^{i pi x} + 1``, the continuation of ``2 * [x even]``."""
    k = as_integer(x)
    if k is not None:
        return 0 if k % 2 else 2
    return mpmath.expjpi(mpmath.mpmathify(x)) + 1


def _pw(base, e):
    """``base**e``; exact for integer exponents and rational bases."""
    k = as_integer(e)
    if k is not None and is_exact(base):
        return Fraction(base) ** k
    return mpmath.power(to_mp(base), to_mp(e))


def _total(values):
    if all(is_exact(v) for v in values):
        return sum(values, Fraction(0))
    vals = [to_mp(v) for v in values]
    return mpmath.fsum(vals)


def _real(x):
    if isinstance(x, mpmath.mpc) and x.imag == 0:
        return x.real
    return x


def pow_inner_vanishes(r2, P: int) -> bool:
    """Regime ``r2`` even, ``r2 + P >= 0`` where every per-``d`` inner sum is 0."""
    k = as_integer(r2)
    return k is not None and k % 2 == 0 and k + P >= 0


def log_inner_vanishes(r2, Q: int) -> bool:
    """Both log-family inner sums vanish: ``Q >= 0``, ``r2`` even and ``r2 + Q >= 0``."""
    k = as_integer(r2)
    return Q >= 0 and k is not None and k % 2 == 0 and k + Q >= 0


def is_convergent(r2, exponent: int, with_log: bool = False) -> bool:
    """Absolute convergence of every interchanged sum: ``Re r2 + P < -1``, ``P <= -2``.

    The log family needs ``Re r2 < -2 - Q`` as well.
    """
    s = float(mpmath.re(r2))
    ok = s + exponent < -1 and exponent <= -2
    if with_log:
        ok = ok and s < -2 - exponent
    return ok


# -- per-d residue data -------------------------------------------------------


@lru_cache(maxsize=4096)
def admissible_residues(n: int, d: int) -> tuple:
    """``(c', gcd(c', d), u_{c',d})`` for ``0 < c' <= d`` with ``gcd(c', d) | n``."""
    out = []
    for c in range(1, d + 1):
        fam = solution_family(n, c, d)
        if fam is not None:
            out.append((c, fam.g, fam.u))
    return tuple(out)


def _float_ok(s, P: int) -> bool:
    try:
        sf = float(s)
    except TypeError:
        return False
    return 1.0 < sf <= 80.0 and 2 <= -P <= 80


def _inner_pow_mp(ctx, n, d, r2, P):
    """``sum_{c'} zeta(-r2-P, c'/d) gcd**-P reg(-P, u)`` at working precision."""
    s = -r2 - P
    acc = []
    exact = as_integer(s) is not None and as_integer(s) <= 0 and P >= 0
    for c, g, u in admissible_residues(n, d):
        reg = reg_sum_pow(ctx, -P, u).value
        if reg == 0:
            continue
        z = hurwitz_zeta(ctx, s, Fraction(c, d) if exact else to_mp(Fraction(c, d)))
        acc.append(z * _pw(g, -P) * reg if exact else to_mp(z) * to_mp(_pw(g, -P)) * to_mp(reg))
    if not acc:
        return Fraction(0) if exact else mpmath.mpf(0)
    return _total(acc)


def _inner_log_mp(ctx, n, d, r2, Q):
    """The two log-family inner sums ``(J4, J5)`` for one ``d``."""
    s = -r2 - Q
    lgd = mpmath.log(d)
    j4, j5 = [], []
    for c, g, u in admissible_residues(n, d):
        a = to_mp(Fraction(c, d))
        z = to_mp(hurwitz_zeta(ctx, s, a))
        gq = to_mp(_pw(g, -Q))
        reg = to_mp(reg_sum_pow(ctx, -Q, u).value)
        if reg != 0:
            dz = hurwitz_zeta_s_deriv(ctx, s, a)
            j4.append(gq * ((2 * lgd - mpmath.log(g)) * z - dz) * reg)
        j5.append(gq * z * reg_sum_pow_log(ctx, -Q, u).value)
    return mpmath.fsum(j4), mpmath.fsum(j5)


def _inner_arrays(n, d):
    data = admissible_residues(n, d)
    c = np.array([t[0] for t in data], dtype=np.float64)
    g = np.array([t[1] for t in data], dtype=np.float64)
    u = np.array([float(t[2]) for t in data], dtype=np.float64)
    return c / d, g, u


def _inner_pow_float(n, d, r2, P):
    a, g, u = _inner_arrays(n, d)
    t = hurwitz_zeta_array(-float(r2) - P, a) * g ** (-P) * reg_sum_pow_array(-P, u)
    return math.fsum(t.tolist()), math.fsum(np.abs(t).tolist())


def _inner_log_float(n, d, r2, Q):
    a, g, u = _inner_arrays(n, d)
    s = -float(r2) - Q
    z = hurwitz_zeta_array(s, a)
    dz = hurwitz_zeta_array(s, a, derivative=True)
    gq = g ** (-Q)
    t4 = gq * ((2 * math.log(d) - np.log(g)) * z - dz) * reg_sum_pow_array(-Q, u)
    t5 = gq * z * reg_sum_pow_log_array(-Q, u)
    absum = math.fsum(np.abs(t4).tolist()) + math.fsum(np.abs(t5).tolist())
    return math.fsum(t4.tolist()), math.fsum(t5.tolist()), absum


def vanishing_inner_sum(ctx: ZetaContext, n: int, d: int, r2, P: int):
    """``sum_{0<c'<=d, gcd(c',d) | n} zeta(-r2-P, c'/d) gcd(c',d)**-P reg(-P, u_{c',d})``."""
    if n % d == 0:
        raise ValueError("inner sum is defined for d not dividing n")
    with ctx.workprec():
        v = _inner_pow_mp(ctx, n, d, r2, int(P))
    return v if is_exact(v) else ctx.round(v)


def vanishing_inner_sum_log(ctx: ZetaContext, n: int, d: int, r2, Q: int):
    """``sum_{c'} zeta(-r2-Q, c'/d) gcd**-Q regularized sum of (m+u)**Q log|m+u|``."""
    if n % d == 0:
        raise ValueError("inner sum is defined for d not dividing n")
    with ctx.workprec():
        return ctx.round(_inner_log_mp(ctx, n, d, r2, int(Q))[1])


# -- per-d lemma terms ---------------------------------------------------------


def _n_term(n, r2, P, ctx, with_log):
    # contribution of the a = 0 solutions, -(-n)^P sigma_r2(n) (log|n|)
    base = Fraction(-n) ** P
    sg = sigma(n, r2, ctx)
    if with_log:
        return -to_mp(base) * to_mp(sg) * mpmath.log(abs(n))
    return -base * sg if is_exact(sg) else -to_mp(base) * sg


def lemma31_term(ctx: ZetaContext, n: int, d: int, r2, P: int):
    """``sum_c c**r2 sum_{ad - bc = n; a, b != 0} (bc)**P`` in regularized form."""
    P = int(P)
    if d < 1:
        raise ValueError("d must be positive")
    with ctx.workprec():
        head = _n_term(n, r2, P, ctx, False)
        if n % d == 0:
            E = delta_even_continued(P)
            if E == 0:
                return head if is_exact(head) else ctx.round(head)
            F = gcd_series_value(ctx, d, r2 + P, -P)
            main = _prod(Fraction(d) ** P * E, riemann_zeta(ctx, -P), F)
        else:
            inner = _inner_pow_mp(ctx, n, d, r2, P)
            main = _prod(_pw(d, r2 + 2 * P), inner)
        v = _total([head, main])
    return v if is_exact(v) else ctx.round(v)


def _gcd_log_terms(ctx, d, r2, Q):
    """The two ``d | n`` log pieces, without the ``(-1)**Q d**r1`` factor."""
    E = delta_even_continued(Q)
    if E == 0:
        return mpmath.mpf(0), mpmath.mpf(0)
    F, F1, F2 = gcd_series_partials(ctx, d, r2 + Q, -Q)
    dq = to_mp(Fraction(d) ** Q)
    zq = to_mp(riemann_zeta(ctx, -Q))
    t2 = E * dq * zq * (F1 - F2)
    t3 = E * dq * (mpmath.log(d) * zq - riemann_zeta_deriv(ctx, -Q)) * F
    return t2, t3


def lemma32_term(ctx: ZetaContext, n: int, d: int, r2, Q: int, include_n_term: bool = True):
    """``sum_c c**r2 sum_{ad - bc = n; a, b != 0} (bc)**Q log|bc|`` in regularized form.

    With ``include_n_term=False`` the ``a = 0`` contribution
    ``-(-n)**Q sigma_r2(n) log|n|`` is left out.
    """
    Q = int(Q)
    if d < 1:
        raise ValueError("d must be positive")
    with ctx.workprec():
        parts = [_n_term(n, r2, Q, ctx, True)] if include_n_term else []
        if n % d == 0:
            parts.extend(_gcd_log_terms(ctx, d, r2, Q))
        else:
            j4, j5 = _inner_log_mp(ctx, n, d, r2, Q)
            parts.append(to_mp(_pw(d, r2 + 2 * Q)) * (j4 + j5))
        return ctx.round(_real(mpmath.fsum(parts)))


# -- full right-hand sides ----------------------------------------------------


def _remainder_bound(n, r1, r2, P, D, with_log):
    """Bound on ``sum_{d > D}`` of the decaying part of the per-``d`` terms."""
    from .convsum import _sigma_bound

    if D < 2 * abs(n):
        return math.inf
    C, e = _sigma_bound(float(mpmath.re(r2)))
    if with_log:
        C, e = C * 2 / math.e, e + 0.5
    x = P + e
    s = float(mpmath.re(r1)) + x
    if x >= -1 or s >= -1:
        return math.inf
    return 2 * C * float(mpmath.zeta(-x)) * 2.0 ** (-x) * D ** (s + 1) / -(s + 1)


def _use_float(vectorized, D, r1, r2, P):
    ok = _float_ok(-float(mpmath.re(r2)) - P, P) and mpmath.im(r2) == 0
    if vectorized is None:
        return ok and D > _FLOAT_AUTO_CUTOFF
    if vectorized and not ok:
        raise ValueError("float kernel needs integer exponent <= -2 and 1 < -r2 - exponent <= 80")
    return bool(vectorized)


def _check_cutoff(n, D):
    if D < max(divisors(n)):
        raise ValueError("d_cutoff must be at least |n|")


def theorem1_rhs(ctx: ZetaContext, spec: ConvolutionSpec, d_cutoff: int, vectorized: bool | None = None) -> RhsBreakdown:
    """Right-hand side for the power weight ``n2**P``, split into named terms."""
    if spec.with_log:
        raise ValueError("theorem1_rhs takes a spec without the log weight")
    n, r1, r2, P = spec.n, spec.r1, spec.r2, spec.exponent
    D = int(d_cutoff)
    _check_cutoff(n, D)
    notes = []
    with ctx.workprec():
        zr1 = riemann_zeta(ctx, -r1)
        sg = sigma(n, r2, ctx)
        npw = Fraction(n) ** P
        term1 = _neg_prod(npw, sg, zr1)

        E = delta_even_continued(P)
        if E == 0:
            term2 = Fraction(0)
        else:
            pieces = [_prod(_pw(d, r1 + P), gcd_series_value(ctx, d, r2 + P, -P)) for d in divisors(n)]
            term2 = _prod((-1) ** P * E, riemann_zeta(ctx, -P), _total(pieces))

        kernel = "mp"
        converged = True
        tail = 0.0
        d_tail = Fraction(0)
        if P >= 0:
            # every regularized sum of (m + u)^P with P >= 0 is exactly zero
            term3 = Fraction(0)
            notes.append("term3 vanishes identically: inner m-sums are 0 for P >= 0")
        elif pow_inner_vanishes(r2, P):
            term3 = Fraction(0)
            worst = max(
                (abs(to_mp(vanishing_inner_sum(ctx, n, d, r2, P))) for d in range(2, min(D, 12) + 1) if n % d),
                default=mpmath.mpf(0),
            )
            notes.append(f"term3 vanishes identically (r2 even, r2+P >= 0); max inner sum checked {mpmath.nstr(worst, 3)}")
        else:
            use_float = _use_float(vectorized, D, r1, r2, P)
            kernel = "float64" if use_float else "mp"
            sign = -1 if P % 2 else 1
            vals, rounding = [], 0.0
            for d in range(1, D + 1):
                if n % d == 0:
                    continue
                scale = to_mp(_pw(d, r1 + r2 + 2 * P))
                if use_float:
                    inner, absum = _inner_pow_float(n, d, r2, P)
                    vals.append(scale * inner)
                    rounding += float(abs(scale)) * absum * 64 * _EPS
                else:
                    vals.append(scale * to_mp(_inner_pow_mp(ctx, n, d, r2, P)))
            term3 = sign * mpmath.fsum(vals)
            if is_convergent(r2, P):
                d_tail = _prod(npw, sg, hurwitz_zeta(ctx, -r1, D + 1))
                tail = _remainder_bound(n, r1, r2, P, D, False) + rounding
            else:
                converged = False
                tail = math.inf
                notes.append("outside the convergent regime: term3 is a partial d-sum without tail control")
        terms = {
            "term1_finite": _finish(ctx, term1),
            "term2_d_divides": _finish(ctx, term2),
            "term3_d_not_divides": _finish(ctx, term3),
            "d_tail": _finish(ctx, d_tail),
        }
        total = _finish(ctx, _total(list(terms.values())))
    return RhsBreakdown(terms, D, total, tail, converged, kernel, notes)


def theorem2_rhs(ctx: ZetaContext, spec: ConvolutionSpec, d_cutoff: int, vectorized: bool | None = None) -> RhsBreakdown:
    """Right-hand side for the weight ``n2**Q log|n2|``, split into named terms."""
    if not spec.with_log:
        raise ValueError("theorem2_rhs takes a spec with the log weight")
    n, r1, r2, Q = spec.n, spec.r1, spec.r2, spec.exponent
    D = int(d_cutoff)
    _check_cutoff(n, D)
    notes = []
    with ctx.workprec():
        zr1 = to_mp(riemann_zeta(ctx, -r1))
        sg = to_mp(sigma(n, r2, ctx))
        nq = to_mp(Fraction(n) ** Q)
        logn = mpmath.log(abs(n))
        term1 = -zr1 * sg * nq * logn
        sign = -1 if Q % 2 else 1
        t2, t3 = [], []
        for d in divisors(n):
            a, b = _gcd_log_terms(ctx, d, r2, Q)
            w = to_mp(_pw(d, r1))
            t2.append(w * a)
            t3.append(w * b)
        term2 = sign * mpmath.fsum(t2)
        term3 = sign * mpmath.fsum(t3)

        kernel = "mp"
        converged = True
        tail = 0.0
        d_tail = mpmath.mpf(0)
        if log_inner_vanishes(r2, Q):
            term4 = term5 = mpmath.mpf(0)
            notes.append("term4 and term5 vanish identically (Q >= 0, r2 even, r2+Q >= 0)")
        else:
            use_float = _use_float(vectorized, D, r1, r2, Q)
            kernel = "float64" if use_float else "mp"
            v4, v5, rounding = [], [], 0.0
            for d in range(1, D + 1):
                if n % d == 0:
                    continue
                scale = to_mp(_pw(d, r1 + r2 + 2 * Q))
                if use_float:
                    j4, j5, absum = _inner_log_float(n, d, r2, Q)
                    rounding += float(abs(scale)) * absum * 64 * _EPS
                else:
                    j4, j5 = _inner_log_mp(ctx, n, d, r2, Q)
                v4.append(scale * j4)
                v5.append(scale * j5)
            term4 = sign * mpmath.fsum(v4)
            term5 = sign * mpmath.fsum(v5)
            if Q >= 0:
                notes.append("term4 vanishes for Q >= 0; term5 inner sums need r2 even to vanish")
            if is_convergent(r2, Q, with_log=True):
                d_tail = nq * sg * logn * to_mp(hurwitz_zeta(ctx, -r1, D + 1))
                tail = _remainder_bound(n, r1, r2, Q, D, True) + rounding
            else:
                converged = False
                tail = math.inf
                notes.append("outside the convergent regime: d-sums are partial without tail control")
        terms = {
            "term1_finite": _finish(ctx, term1),
            "term2_gcd_derivative": _finish(ctx, term2),
            "term3_gcd_log": _finish(ctx, term3),
            "term4_d_not_divides_log_v": _finish(ctx, term4),
            "term5_d_not_divides_log_sum": _finish(ctx, term5),
            "d_tail": _finish(ctx, d_tail),
        }
        total = _finish(ctx, mpmath.fsum([to_mp(v) for v in terms.values()]))
    return RhsBreakdown(terms, D, total, tail, converged, kernel, notes)


def _prod(*xs):
    if all(is_exact(x) for x in xs):
        out = Fraction(1)
        for x in xs:
            out *= x
        return out
    out = mpmath.mpf(1)
    for x in xs:
        out *= to_mp(x)
    return out


def _neg_prod(*xs):
    return -_prod(*xs)


def _finish(ctx, v):
    if is_exact(v):
        return Fraction(v)
    return ctx.round(_real(v))


# -- informal predictions --------------------------------------------------------


def informal_value_pow(ctx: ZetaContext, n: int, r1, r2, P: int):
    """Value obtained by dropping the ``d``-not-dividing family (interchanging limits).

    Covers ``r2 + P = 0`` and ``r2 + P`` a positive integer.
    """
    k = as_integer(r2 + P) if as_integer(r2) is not None else None
    if k is None or k < 0:
        raise BranchNotCoveredError("informal power value needs r2 + P a nonnegative integer")
    with ctx.workprec():
        base = _neg_prod(Fraction(n) ** P, sigma(n, r2, ctx), riemann_zeta(ctx, -r1))
        if k == 0:
            extra = _neg_prod(riemann_zeta(ctx, r2), sigma(n, r1, ctx))
            v = _total([base, extra])
        else:
            v = base
    return _finish(ctx, v)


def informal_value_log(ctx: ZetaContext, n: int, r1, r2, Q: int):
    """The piecewise informal value for the log weight."""
    Q = int(Q)
    i1, i2 = as_integer(r1), as_integer(r2)
    with ctx.workprec():
        if Q >= 1 and i2 is not None and i2 + Q >= 1:
            v = -to_mp(riemann_zeta(ctx, -r1)) * to_mp(sigma(n, r2, ctx)) * to_mp(Fraction(n) ** Q) * mpmath.log(abs(n))
        elif Q == 0 and i1 is not None and i2 is not None and i1 >= 1 and i2 >= 1:
            v = to_mp(sigma(n, i1)) * riemann_zeta_deriv(ctx, -i2)
        elif Q == 0 and i1 == 0 and i2 == 0:
            v = (mpmath.log(abs(n)) / 2 - mpmath.log(2 * mpmath.pi)) * to_mp(sigma(n, 0))
        else:
            raise BranchNotCoveredError("parameters are outside the informal log table")
        return ctx.round(_real(v))
