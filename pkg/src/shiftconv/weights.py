"""Weights ``phi(n1, n2)`` built from monomials and monomial-log terms.

A :class:`WeightSpec` stores, for each integer power ``j``, the four
coefficients of ``n1**j``, ``n2**j``, ``n1**j log|n1|`` and ``n2**j log|n2|``.
Coefficients may be ints, Fractions, mpmath numbers or sympy expressions
(the last when ``n`` is kept symbolic).

On the diagonal ``n2 = n - n1`` the weight has a large-``|n1|`` expansion in
powers ``x**p`` and ``x**p log|x|`` (``x = n1``), obtained from the binomial
series of ``(n - x)**j`` and ``log|n - x| = log|x| - sum_k (n/x)**k / k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .arith import is_exact, to_mp

__all__ = [
    "WeightSpec",
    "AsymptoticExpansion",
    "weight_asymptotics",
    "power_weight",
    "log_weight",
    "constant_weight",
    "eq19_weight",
    "conj13_second_weight",
    "chester_weight",
    "DiagonalEvaluator",
]


def _is_zero(x) -> bool:
    try:
        return bool(x == 0)
    except TypeError:
        return False


@dataclass(frozen=True)
class WeightSpec:
    """``phi(n1, n2) = sum_j a_j n1^j + b_j n2^j + c_j n1^j log|n1| + d_j n2^j log|n2|``."""

    coeffs: dict = field(default_factory=dict)  # j -> (a_j, b_j, c_j, d_j)
    label: str = ""

    def __post_init__(self):
        clean = {}
        for j, row in self.coeffs.items():
            row = tuple(row)
            if len(row) != 4:
                raise ValueError("each power needs four coefficients (a, b, c, d)")
            if not all(_is_zero(x) for x in row):
                clean[int(j)] = row
        if not clean:
            raise ValueError("weight has no nonzero coefficient")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def degree(self) -> int:
        return max(self.coeffs)

    @property
    def min_power(self) -> int:
        return min(self.coeffs)

    @property
    def has_log(self) -> bool:
        return any(not (_is_zero(c) and _is_zero(d)) for _, _, c, d in self.coeffs.values())

    def coefficient(self, kind: str, j: int):
        row = self.coeffs.get(j)
        if row is None:
            return 0
        return row["abcd".index(kind)]

    def symmetric(self) -> bool:
        """True when ``phi(n1, n2) = phi(n2, n1)`` identically."""
        # constants need no matching: a_0 + b_0 is symmetric on its own
        return all((j == 0 or a == b) and c == d for j, (a, b, c, d) in self.coeffs.items())

    def evaluate(self, n1, n2):
        """Value at ``n1 n2 != 0``; exact when there are no log terms and inputs are exact."""
        if n1 == 0 or n2 == 0:
            raise ValueError("weight is only defined for n1 n2 != 0")
        if not self.has_log and all(is_exact(x) for row in self.coeffs.values() for x in row):
            total = Fraction(0)
            for j, (a, b, _, _) in self.coeffs.items():
                total += a * Fraction(n1) ** j + b * Fraction(n2) ** j
            return total
        l1 = mpmath.log(abs(n1))
        l2 = mpmath.log(abs(n2))
        total = mpmath.mpf(0)
        for j, (a, b, c, d) in self.coeffs.items():
            p1 = mpmath.mpf(n1) ** j
            p2 = mpmath.mpf(n2) ** j
            total += (to_mp(a) + to_mp(c) * l1) * p1 + (to_mp(b) + to_mp(d) * l2) * p2
        return total

    __call__ = evaluate

    @classmethod
    def from_scaled(cls, alpha, beta, gamma, delta, n, label: str = "") -> "WeightSpec":
        """Weight with ``a_j = alpha_j n**-j`` and likewise for b, c, d.

        In these coordinates the weight depends on ``n1/n``, ``n2/n`` and logs
        only, so decay conditions do not involve ``n``.
        """
        rows = {}
        for j in range(len(alpha)):
            s = _pow(n, -j)
            rows[j] = (alpha[j] * s, beta[j] * s, gamma[j] * s, delta[j] * s)
        return cls(rows, label)


def _pow(n, k):
    if isinstance(n, int):
        return Fraction(n) ** k
    return n**k


def _binom(j: int, k: int) -> Fraction:
    # generalized binomial coefficient C(j, k) for any integer j
    num = 1
    for i in range(k):
        num *= j - i
    return Fraction(num, math.factorial(k))


# -- constructors ----------------------------------------------------------


def constant_weight(value=1) -> WeightSpec:
    return WeightSpec({0: (value, 0, 0, 0)}, "constant")


def power_weight(P: int) -> WeightSpec:
    """``n2**P``."""
    return WeightSpec({int(P): (0, 1, 0, 0)}, f"n2^{P}")


def log_weight(Q: int) -> WeightSpec:
    """``n2**Q log|n2|``."""
    return WeightSpec({int(Q): (0, 0, 0, 1)}, f"n2^{Q} log|n2|")


def eq19_weight(n) -> WeightSpec:
    """``2 + (n2 - n1)/n log|n1/n2|`` written as ``2 + (1 - 2 n1/n) log|n1| + (1 - 2 n2/n) log|n2|``."""
    inv = _pow(n, -1)
    return WeightSpec({0: (2, 0, 1, 1), 1: (0, 0, -2 * inv, -2 * inv)}, "eq1.9")


def conj13_second_weight(n) -> WeightSpec:
    inv = _pow(n, -1)
    return WeightSpec(
        {
            0: (Fraction(11, 3), 0, 1, 1),
            1: (-20 * inv, 0, -12 * inv, -12 * inv),
            2: (20 * inv**2, 0, 30 * inv**2, 30 * inv**2),
            3: (0, 0, -20 * inv**3, -20 * inv**3),
        },
        "conj13b",
    )


def chester_weight(n) -> WeightSpec:
    """The weight paired with ``sigma_2 x sigma_2`` in the Chester identity."""
    inv = _pow(n, -1)
    n = Fraction(n) if isinstance(n, int) else n
    return WeightSpec(
        {
            -2: (-(n**2) / 4, -(n**2) / 4, 0, 0),
            -1: (-3 * n, -3 * n, 0, 0),
            0: (15, 15, 15, 15),
            1: (0, 0, -30 * inv, -30 * inv),
        },
        "chester",
    )


# -- asymptotics ------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticExpansion:
    """``phi(x, n - x) ~ sum coeff x**p (log|x|)**beta`` for ``p >= -order``."""

    terms: tuple  # (p, beta, coeff), p descending, beta in {0, 1}
    order: int

    def coefficient(self, p: int, beta: int = 0):
        for q, b, c in self.terms:
            if q == p and b == beta:
                return c
        return 0

    def leading(self):
        """First ``(p, beta, coeff)`` with nonzero coefficient, or None if everything cancels."""
        best = None
        for q, b, c in self.terms:
            if _is_zero(c):
                continue
            if best is None or (q, b) > (best[0], best[1]):
                best = (q, b, c)
        return best

    def nonzero(self):
        return tuple(t for t in self.terms if not _is_zero(t[2]))

    def decays_faster_than(self, p: int) -> bool:
        """True when every coefficient with power ``>= p`` vanishes."""
        return all(_is_zero(c) for q, _, c in self.terms if q >= p)

    def evaluate(self, x):
        x = mpmath.mpf(x)
        lx = mpmath.log(abs(x))
        return mpmath.fsum(to_mp(c) * x**q * (lx if b else 1) for q, b, c in self.nonzero())


def weight_asymptotics(w: WeightSpec, n, order: int) -> AsymptoticExpansion:
    """Expansion of ``w(x, n - x)`` in descending powers of ``x`` down to ``x**-order``.

    ``n`` may be an int (exact rational coefficients) or a sympy symbol
    (coefficients are polynomials in ``n``).
    """
    if order < w.degree + 2:
        raise ValueError("expansion order must be at least degree + 2")
    lo = -order
    acc: dict[tuple[int, int], object] = {}

    def add(p, beta, c):
        if p < lo or _is_zero(c):
            return
        acc[(p, beta)] = acc.get((p, beta), 0) + c

    nn = Fraction(n) if isinstance(n, int) else n
    for j, (a, b, c, d) in w.coeffs.items():
        add(j, 0, a)
        add(j, 1, c)
        if _is_zero(b) and _is_zero(d):
            continue
        # (n - x)^j = (-1)^j sum_k C(j, k) (-n)^k x^(j - k)
        sgn = -1 if j % 2 else 1
        kmax = j if j >= 0 else j - lo
        binom = [(j - k, sgn * _binom(j, k) * (-nn) ** k) for k in range(kmax + 1)]
        for p, coef in binom:
            add(p, 0, b * coef)
            add(p, 1, d * coef)
            # times -sum_{m >= 1} (n/x)^m / m
            if _is_zero(d):
                continue
            for m in range(1, p - lo + 1):
                add(p - m, 0, -d * coef * nn**m / m)
    terms = []
    for (p, beta), c in acc.items():
        if hasattr(c, "expand"):
            c = c.expand()
        terms.append((p, beta, c))
    terms.sort(key=lambda t: (-t[0], -t[1]))
    return AsymptoticExpansion(tuple(terms), order)


class DiagonalEvaluator:
    """Float64 evaluation of ``w(x, n - x)`` over integer arrays ``x``.

    Far from the origin (``|x| >= cut``) the truncated expansion is summed,
    which avoids the cancellation between large monomials.  Near the origin
    the weight is evaluated directly at high precision.
    """

    def __init__(self, w: WeightSpec, n: int, order: int = 40, far_ratio: int = 16):
        self.w = w
        self.n = int(n)
        self.cut = far_ratio * abs(self.n)
        entries = [(j, k, c) for j, row in w.coeffs.items() for k, c in zip("abcd", row) if not _is_zero(c)]
        # a lone monomial has nothing to cancel and is evaluated as it stands
        self.single = entries[0] if len(entries) == 1 else None
        exp = weight_asymptotics(w, self.n, max(order, w.degree + 2))
        self.poly = [(q, complex(to_mp(c))) for q, b, c in exp.nonzero() if b == 0]
        self.logs = [(q, complex(to_mp(c))) for q, b, c in exp.nonzero() if b == 1]
        self.complex = any(v.imag != 0 for _, v in self.poly + self.logs)

    def _near(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape, dtype=np.complex128)
        with mpmath.workdps(40):
            for i, xi in enumerate(x.tolist()):
                out[i] = complex(self.w.evaluate(int(xi), self.n - int(xi)))
        return out

    def _far(self, x: np.ndarray) -> np.ndarray:
        xf = x.astype(np.float64)
        inv = 1.0 / xf
        lx = np.log(np.abs(xf))
        out = np.zeros(x.shape, dtype=np.complex128)
        for q, c in self.poly:
            out += c * _ipow(xf, inv, q)
        for q, c in self.logs:
            out += c * _ipow(xf, inv, q) * lx
        return out

    def _single(self, x: np.ndarray) -> np.ndarray:
        j, kind, c = self.single
        y = (x if kind in "ac" else self.n - x).astype(np.float64)
        out = complex(to_mp(c)) * _ipow(y, 1.0 / y, j)
        if kind in "cd":
            out = out * np.log(np.abs(y))
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if self.single is not None:
            out = self._single(x)
            return out if self.complex else out.real
        out = np.empty(x.shape, dtype=np.complex128)
        far = np.abs(x) >= self.cut
        if far.any():
            out[far] = self._far(x[far])
        if (~far).any():
            out[~far] = self._near(x[~far])
        return out if self.complex else out.real


def _ipow(x: np.ndarray, inv: np.ndarray, q: int) -> np.ndarray:
    return x**q if q >= 0 else inv ** (-q)
