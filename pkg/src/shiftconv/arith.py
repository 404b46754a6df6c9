"""Exact integer and rational primitives.

Divisor sums, the von Mangoldt function, p-adic valuations and Bernoulli
numbers/polynomials.  Integer-exponent divisor sums and Bernoulli values stay
in :class:`fractions.Fraction`; anything transcendental is returned as an
mpmath number at the caller's working precision.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

import mpmath

__all__ = [
    "FactoredInteger",
    "factorize",
    "divisors",
    "valuation",
    "sigma",
    "von_mangoldt",
    "bernoulli_number",
    "bernoulli_poly",
    "is_exact",
    "as_integer",
    "to_mp",
]


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value == 0:
            raise ValueError("FactoredInteger requires a nonzero value")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list {self.factors!r}")
            last = p
            prod *= p**e
        if prod != abs(self.value):
            raise ValueError(f"factors {self.factors!r} do not multiply to |{self.value}|")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


def is_exact(x) -> bool:
    """True for ints and Fractions (but not bools or floats)."""
    return isinstance(x, Rational) and not isinstance(x, bool)


def as_integer(x):
    """Return ``x`` as an ``int`` if it is an integral exact or real-valued number, else None."""
    if isinstance(x, bool):
        return None
    if isinstance(x, Integral):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else None
    if isinstance(x, mpmath.mpc):
        if x.imag != 0:
            return None
        x = x.real
    if isinstance(x, (mpmath.mpf, float)):
        if mpmath.isfinite(x) and x == int(x):
            return int(x)
    if isinstance(x, complex) and x.imag == 0 and x.real == int(x.real):
        return int(x.real)
    return None


def to_mp(x):
    """Convert an exact or Python number to mpmath at the current working precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    return mpmath.mpmathify(x)


# -- factorization ---------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24 with these bases
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = y = rng.randrange(2, n)
        g = 1
        while g == 1:
            x = f(x)
            y = f(f(y))
            g = math.gcd(abs(x - y), n)
        if g != n:
            return g


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if _is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


@lru_cache(maxsize=65536)
def _factor_abs(m: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= m and p < 10_000:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        _factor_into(m, out)
    return tuple(sorted(out.items()))


def factorize(n: int) -> FactoredInteger:
    """Prime factorization of ``|n|``; ``factorize(1).factors == ()``."""
    n = int(n)
    if n == 0:
        raise ValueError("cannot factorize 0")
    return FactoredInteger(n, _factor_abs(abs(n)))


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def divisors(n: int) -> list[int]:
    """Positive divisors of ``|n|`` in ascending order."""
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# -- divisor sums ----------------------------------------------------------


def sigma(n: int, nu, ctx=None):
    """Divisor sum ``sum_{d | |n|} d**nu``.

    Integer ``nu`` gives an exact Fraction.  Any other exponent is evaluated
    with mpmath, at ``ctx``'s precision when a :class:`ZetaContext` is given.
    """
    if n == 0:
        raise ValueError("sigma is undefined at 0")
    k = nu if isinstance(nu, Integral) else None
    if isinstance(nu, Fraction) and nu.denominator == 1:
        k = int(nu)
    if k is not None:
        total = Fraction(1)
        for p, e in factorize(n).factors:
            q = Fraction(p) ** k
            total *= sum(q**i for i in range(e + 1))
        return total
    if ctx is not None:
        with ctx.workprec():
            return _sigma_mp(n, nu)
    return _sigma_mp(n, nu)


def _sigma_mp(n, nu):
    nu = mpmath.mpmathify(nu)
    total = mpmath.mpf(1)
    for p, e in factorize(n).factors:
        q = mpmath.power(p, nu)
        total *= mpmath.fsum(q**i for i in range(e + 1))
    return total


def von_mangoldt(ell: int):
    """``log p`` when ``ell`` is a power of the prime ``p``, else 0."""
    if ell < 1:
        raise ValueError("von_mangoldt expects a positive integer")
    f = factorize(ell).factors
    if len(f) == 1:
        return mpmath.log(f[0][0])
    return mpmath.mpf(0)


# -- Bernoulli -------------------------------------------------------------

_bern_cache: list[Fraction] = [Fraction(1)]
_bern_lock = threading.Lock()


def bernoulli_number(k: int) -> Fraction:
    """Exact ``B_k`` with ``B_1 = -1/2``."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k < len(_bern_cache):
        return _bern_cache[k]
    with _bern_lock:
        for m in range(len(_bern_cache), k + 1):
            if m > 1 and m % 2 == 1:
                _bern_cache.append(Fraction(0))
                continue
            acc = Fraction(0)
            binom = 1  # C(m+1, j)
            for j in range(m):
                acc += binom * _bern_cache[j]
                binom = binom * (m + 1 - j) // (j + 1)
            _bern_cache.append(-acc / (m + 1))
    return _bern_cache[k]


def bernoulli_poly(k: int, a):
    """``B_k(a) = sum_j C(k, j) B_j a**(k-j)``; exact for rational ``a``."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if is_exact(a):
        a = Fraction(a)
        total = Fraction(0)
    else:
        a = mpmath.mpmathify(a)
        total = mpmath.mpf(0)
    # Horner in a: B_k(a) = sum_i C(k,i) B_{k-i} a^i
    for i in range(k, -1, -1):
        total = total * a + math.comb(k, i) * bernoulli_number(k - i)
    return total
