"""Truncated shifted convolution sums and tail extrapolation.

The left-hand sums ``sum_{n1 + n2 = n} sigma_r1(n1) sigma_r2(n2) w(n1, n2)``
run over ``n1 != 0, n`` with ``|n1| <= N``.  Terms are taken in a fixed order
(``|n1|`` ascending, negative before positive) and accumulated with
``math.fsum`` over fixed-size chunks, so results do not depend on the number
of worker threads.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
import tempfile
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .arith import as_integer, is_exact, sigma, to_mp
from .errors import ConvergenceWarning, NonConvergenceError
from .weights import DiagonalEvaluator, WeightSpec, log_weight, power_weight, weight_asymptotics
from .zeta import ZetaContext

__all__ = [
    "sigma_table",
    "SigmaCache",
    "TruncationConfig",
    "LhsValue",
    "DecayHint",
    "decay_hint",
    "dense_ladder",
    "lhs_partial_sums",
    "lhs_pow_truncated",
    "lhs_log_truncated",
    "lhs_weighted_truncated",
    "lhs_tail_bound",
    "extrapolate",
    "CACHE_ENV",
]

CACHE_ENV = "SHIFTCONV_CACHE_DIR"
_CHUNK = 1 << 16
_EXACT_LIMIT = 400
_EPS = 2.0**-52


# -- sigma sieve -----------------------------------------------------------


def _powers(nu, N: int) -> np.ndarray:
    m = np.arange(N + 1, dtype=np.float64)
    m[0] = 1.0
    if isinstance(nu, complex) or (hasattr(nu, "imag") and float(getattr(nu, "imag", 0)) != 0):
        out = np.exp(complex(nu) * np.log(m))
    else:
        k = as_integer(nu)
        out = m**k if k is not None and k >= 0 else m ** float(nu)
    out[0] = 0
    return out


def _sieve_chunk(pw: np.ndarray, lo: int, hi: int, out: np.ndarray) -> None:
    # sigma(m) = sum over divisor pairs (d, m/d) with d <= sqrt(m)
    dmax = math.isqrt(hi - 1)
    for d in range(1, dmax + 1):
        k0 = max(d, -(-lo // d))
        k1 = (hi - 1) // d
        if k1 < k0:
            continue
        ks = np.arange(k0, k1 + 1)
        idx = d * ks - lo
        out[idx] += pw[d] + pw[ks]
        if k0 == d:
            out[d * d - lo] -= pw[d]


def sigma_table(nu, N: int, threads: int = 1) -> np.ndarray:
    """``sigma_nu(m)`` for ``0 <= m <= N`` (entry 0 is 0) by a chunked divisor-pair sieve."""
    if N < 1:
        raise ValueError("N must be positive")
    pw = _powers(nu, N)
    out = np.zeros(N + 1, dtype=pw.dtype)
    bounds = [(lo, min(lo + _CHUNK, N + 1)) for lo in range(1, N + 1, _CHUNK)]

    def run(b):
        lo, hi = b
        _sieve_chunk(pw, lo, hi, out[lo:hi])

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run, bounds))
    else:
        for b in bounds:
            run(b)
    return out


class SigmaCache:
    """In-memory and on-disk cache of sigma tables keyed by ``(nu, N)``.

    Files carry a magic tag, a format version and a sha256 of the payload; a
    file that fails any check is rebuilt silently.  Writes are atomic.
    """

    MAGIC = b"SCSIGMA"
    VERSION = 1

    def __init__(self, directory: str | os.PathLike | None = None, threads: int = 1):
        if directory is None:
            directory = os.environ.get(CACHE_ENV) or None
        self.directory = Path(directory) if directory else None
        self.threads = threads
        self._mem: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _key(nu) -> str:
        if isinstance(nu, Fraction) or isinstance(nu, int):
            return f"q{Fraction(nu)}".replace("/", "_")
        return f"c{complex(nu)!r}".replace(" ", "")

    def _path(self, key: str, N: int) -> Path:
        return self.directory / f"sigma_{key}_{N}.bin"

    def get(self, nu, N: int) -> np.ndarray:
        key = self._key(nu)
        with self._lock:
            have = self._mem.get(key)
            if have is not None and len(have) > N:
                return have[: N + 1]
        table = self._load(key, N) if self.directory else None
        if table is None:
            table = sigma_table(nu, N, self.threads)
            if self.directory:
                self._store(key, N, table)
        with self._lock:
            have = self._mem.get(key)
            if have is None or len(have) < len(table):
                self._mem[key] = table
        return table

    def _load(self, key: str, N: int):
        path = self._path(key, N)
        try:
            raw = path.read_bytes()
            if not raw.startswith(self.MAGIC):
                return None
            pos = len(self.MAGIC)
            version, hlen = struct.unpack_from("<II", raw, pos)
            pos += 8
            if version != self.VERSION:
                return None
            header = json.loads(raw[pos : pos + hlen].decode())
            pos += hlen
            digest, payload = raw[pos : pos + 32], raw[pos + 32 :]
            if hashlib.sha256(payload).digest() != digest or header.get("N") != N:
                return None
            table = np.frombuffer(payload, dtype=np.dtype(header["dtype"])).copy()
            return table if len(table) == N + 1 else None
        except (OSError, ValueError, KeyError, struct.error, TypeError):
            return None

    def _store(self, key: str, N: int, table: np.ndarray) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        header = json.dumps({"key": key, "N": N, "dtype": table.dtype.str}).encode()
        payload = table.tobytes()
        blob = (
            self.MAGIC
            + struct.pack("<II", self.VERSION, len(header))
            + header
            + hashlib.sha256(payload).digest()
            + payload
        )
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".sigma-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, self._path(key, N))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


_default_cache = SigmaCache()


# -- configuration and results ------------------------------------------------


@dataclass(frozen=True)
class TruncationConfig:
    """Cutoffs for a ladder of partial sums; ``N`` is the largest."""

    ladder: tuple[int, ...] = (1000, 10_000, 100_000)
    extrapolation_order: int = 1
    points_per_decade: int = 16

    def __post_init__(self):
        ladder = tuple(int(x) for x in self.ladder)
        if len(ladder) < 1 or any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[0] < 1:
            raise ValueError("ladder must be strictly increasing positive cutoffs")
        object.__setattr__(self, "ladder", ladder)

    @property
    def N(self) -> int:
        return self.ladder[-1]

    def points(self) -> list[int]:
        """Cutoffs actually summed: the ladder refined to ``points_per_decade``."""
        if self.points_per_decade <= 0 or len(self.ladder) < 2:
            return list(self.ladder)
        dense = dense_ladder(self.ladder[0], self.N, self.points_per_decade)
        return sorted(set(dense) | set(self.ladder))


@dataclass(frozen=True)
class LhsValue:
    value: object
    N: int
    tail_bound: object = None  # None when no rigorous bound applies
    exact: bool = False
    rounding: float = 0.0  # floating-point error allowance of the partial sum


@dataclass(frozen=True)
class DecayHint:
    """Tail model ``N**-alpha (log N)**beta``."""

    alpha: float
    beta: int = 0
    orders: int = 1  # number of tail orders N**-alpha, N**-(alpha+1), ... in the fit


def dense_ladder(lo: int, hi: int, per_decade: int = 16) -> list[int]:
    """Roughly log-spaced integers from ``lo`` to ``hi`` inclusive."""
    if lo >= hi:
        return [hi]
    k = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
    pts = sorted({int(round(lo * (hi / lo) ** (i / (k - 1)))) for i in range(k)})
    pts[-1] = hi
    return pts


# -- direct sums -------------------------------------------------------------


def _sigma_bound(r2: float):
    """``(C, e)`` with ``|sigma_r2(m)| <= C m**e`` for all ``m >= 1``."""
    if r2 < -1:
        return float(mpmath.zeta(-r2)), 0.0
    if r2 <= 0:
        return 2.0, 0.5
    if r2 <= 1:
        return 2.0, r2 + 0.5
    return float(mpmath.zeta(r2)), r2


def lhs_tail_bound(n: int, r1, r2, P: int, N: int, with_log: bool = False):
    """Bound on ``sum_{|n1| > N} |sigma_r1(n1) sigma_r2(n2) n2**P (log|n2|)|``, or None.

    Needs ``Re r1 < -1`` and enough decay in ``n2``; ``N`` must exceed ``2|n|``.
    """
    s1 = float(mpmath.re(r1))
    if s1 >= -1 or N <= 2 * abs(n):
        return None
    C, e = _sigma_bound(float(mpmath.re(r2)))
    y0 = N - abs(n)
    expo = P + e
    factor = 1.0
    if with_log:
        # log y <= (log y0 / e) y**(1/log y0) for y >= y0 >= e
        eps = 1.0 / math.log(y0)
        factor = math.log(y0) / math.e
        expo += eps
    if expo >= -1:
        return None
    z1 = float(mpmath.zeta(-s1))
    return 2 * z1 * C * factor * y0 ** (expo + 1) / -(expo + 1)


def _order(n: int, K: int) -> np.ndarray:
    x = np.empty(2 * K, dtype=np.int64)
    x[0::2] = -np.arange(1, K + 1)
    x[1::2] = np.arange(1, K + 1)
    return x


def _fsum(a: np.ndarray):
    if np.iscomplexobj(a):
        return complex(math.fsum(a.real.tolist()), math.fsum(a.imag.tolist()))
    return math.fsum(a.tolist())


def lhs_partial_sums(
    n: int,
    r1,
    r2,
    w: WeightSpec,
    ladder,
    threads: int = 1,
    cache: SigmaCache | None = None,
    with_abs: bool = False,
) -> list[tuple]:
    """Float partial sums ``(N, S_N)`` at each cutoff in ``ladder`` (ascending).

    With ``with_abs`` each entry also carries ``sum |term|`` up to ``N``, the
    scale for floating-point error.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    ladder = sorted(int(x) for x in ladder)
    K = ladder[-1]
    cache = cache or _default_cache
    s1 = cache.get(r1, K + abs(n))
    s2 = s1 if _same(r1, r2) else cache.get(r2, K + abs(n))
    ev = DiagonalEvaluator(w, n)
    x = _order(n, K)
    keep = x != n
    # cumulative position (in the ordered term list) where each cutoff ends
    ends = [int(np.count_nonzero(keep[: 2 * N])) for N in ladder]
    x = x[keep]

    def block(piece):
        lo, hi = piece
        xs = x[lo:hi]
        t = s1[np.abs(xs)] * s2[np.abs(n - xs)] * ev(xs)
        return _fsum(t), math.fsum(np.abs(t).tolist())

    starts = [0] + ends[:-1]
    pieces = []
    for a, b in zip(starts, ends):
        pieces.extend((lo, min(lo + _CHUNK, b)) for lo in range(a, b, _CHUNK))
    if threads > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sums = list(ex.map(block, pieces))
    else:
        sums = [block(p) for p in pieces]
    out, acc, i = [], [], 0
    for N, b in zip(ladder, ends):
        while i < len(pieces) and pieces[i][1] <= b:
            acc.append(sums[i])
            i += 1
        vals = [v for v, _ in acc]
        if any(isinstance(v, complex) for v in vals):
            total = complex(math.fsum(complex(v).real for v in vals), math.fsum(complex(v).imag for v in vals))
        else:
            total = math.fsum(vals)
        out.append((N, total, math.fsum(a for _, a in acc)) if with_abs else (N, total))
    return out


def _same(a, b) -> bool:
    try:
        return complex(a) == complex(b) and type(a) is type(b)
    except TypeError:
        return False


def _exact_sum(n, r1, r2, w: WeightSpec, N: int):
    total = Fraction(0)
    for x in _order(n, N).tolist():
        if x == n:
            continue
        total += sigma(x, r1) * sigma(n - x, r2) * w.evaluate(x, n - x)
    return total


def _mp_sum(ctx, n, r1, r2, w, N):
    with ctx.workprec():
        terms = []
        for x in _order(n, N).tolist():
            if x == n:
                continue
            terms.append(to_mp(sigma(x, r1, ctx)) * to_mp(sigma(n - x, r2, ctx)) * w.evaluate(x, n - x))
        return ctx.round(mpmath.fsum(terms))


def lhs_weighted_truncated(
    ctx: ZetaContext, n: int, r1, r2, w: WeightSpec, N: int, *, exact: bool | None = None, threads: int = 1
) -> LhsValue:
    """Partial sum of ``sigma_r1(n1) sigma_r2(n2) w(n1, n2)`` over ``0 < |n1| <= N``, ``n1 != n``.

    Small cutoffs are summed exactly (rational weights, integer exponents) or
    at the working precision; large ones use the float64 sieve path.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    if N < 1:
        raise ValueError("N must be positive")
    ints = as_integer(r1) is not None and as_integer(r2) is not None
    rational = not w.has_log and all(is_exact(c) for row in w.coeffs.values() for c in row)
    if exact is None:
        exact = ints and rational and N <= _EXACT_LIMIT
    if exact:
        if not (ints and rational):
            raise ValueError("exact summation needs integer exponents and a rational weight")
        return LhsValue(_exact_sum(n, as_integer(r1), as_integer(r2), w, N), N, exact=True)
    if N <= _EXACT_LIMIT:
        return LhsValue(_mp_sum(ctx, n, r1, r2, w, N), N)
    [(_, v, absum)] = lhs_partial_sums(n, r1, r2, w, [N], threads=threads, with_abs=True)
    # each term carries at most a few hundred roundings (sieve sums plus weight)
    return LhsValue(v, N, rounding=1024 * _EPS * absum)


def _warn_if_divergent(n, r1, r2, P, with_log):
    C, e = _sigma_bound(float(mpmath.re(r2)))
    if float(mpmath.re(r1)) >= -1 or P + e + (0.5 if with_log else 0) >= -1:
        warnings.warn(
            f"sum with r1={r1}, r2={r2}, exponent {P} is outside the region of absolute convergence",
            ConvergenceWarning,
            stacklevel=3,
        )


def lhs_pow_truncated(ctx: ZetaContext, n: int, r1, r2, P: int, N: int, **kw) -> LhsValue:
    """Partial sum of ``sigma_r1(n1) sigma_r2(n2) n2**P`` with a tail bound when one applies."""
    _warn_if_divergent(n, r1, r2, P, False)
    v = lhs_weighted_truncated(ctx, n, r1, r2, power_weight(P), N, **kw)
    return LhsValue(v.value, N, lhs_tail_bound(n, r1, r2, P, N), v.exact, v.rounding)


def lhs_log_truncated(ctx: ZetaContext, n: int, r1, r2, Q: int, N: int, **kw) -> LhsValue:
    """Partial sum of ``sigma_r1(n1) sigma_r2(n2) n2**Q log|n2|``."""
    _warn_if_divergent(n, r1, r2, Q, True)
    v = lhs_weighted_truncated(ctx, n, r1, r2, log_weight(Q), N, **kw)
    return LhsValue(v.value, N, lhs_tail_bound(n, r1, r2, Q, N, with_log=True), v.exact, v.rounding)


# -- extrapolation -------------------------------------------------------------


def decay_hint(w: WeightSpec, r1, r2, n: int = 1, order: int = 12, orders: int = 1) -> DecayHint:
    """Tail exponent of the weighted sum from the weight's leading diagonal term.

    Average order of ``sigma_r(m)`` is ``m**max(Re r, 0)``, with an extra
    ``log m`` when ``r = 0``.
    """
    exp = weight_asymptotics(w, int(n), max(order, w.degree + 2))
    lead = exp.leading()
    if lead is None:
        p0, b0 = -order, 0
    else:
        p0, b0 = lead[0], lead[1]
    rho = sum(max(float(mpmath.re(r)), 0.0) for r in (r1, r2))
    beta = b0 + sum(1 for r in (r1, r2) if r == 0)
    return DecayHint(-(p0 + rho + 1), beta, orders)


def extrapolate(ladder_values, decay_exponent_hint) -> tuple[object, float]:
    """Limit and error bar from partial sums ``[(N, S_N), ...]``.

    Fits ``S_N = L + N**-alpha sum_{i <= beta} c_i (log N)**i`` by least
    squares.  The error bar is the larger of twice the standard error of ``L``
    and the shift of ``L`` when only the upper half of the ladder is used.
    """
    pts = sorted((int(N), complex(v)) for N, v in ladder_values)
    if len(pts) < 3:
        raise ValueError("extrapolation needs at least three ladder points")
    hint = decay_exponent_hint
    if not isinstance(hint, DecayHint):
        hint = DecayHint(float(hint), 0)
    if hint.alpha <= 0:
        raise NonConvergenceError("weighted sum does not converge (nonpositive decay exponent)")
    Ns = np.array([p[0] for p in pts], dtype=np.float64)
    S = np.array([p[1] for p in pts])
    mid = len(pts) // 2
    if abs(S[-1] - S[mid]) > abs(S[mid] - S[0]) and abs(S[-1] - S[mid]) > 1e-13 * max(1.0, abs(S[-1])):
        raise NonConvergenceError("ladder values are not Cauchy")
    L, se = _fit(Ns, S, hint)
    half = len(pts) // 2
    if len(pts) - half >= 3:
        Lu, _ = _fit(Ns[half:], S[half:], hint)
        shift = abs(L - Lu)
    else:
        shift = abs(L - S[-1])
    err = max(2 * se, shift)
    is_real = all(p[1].imag == 0 for p in pts)
    return (L.real if is_real else L), float(err)


def _fit(Ns, S, hint: DecayHint):
    logs = np.log(Ns)
    beta = hint.beta
    # keep at least one residual degree of freedom
    beta = min(beta, len(Ns) - 3)
    cols = [np.ones_like(Ns)]
    for k in range(max(hint.orders, 1)):
        base = Ns ** (-hint.alpha - k)
        for i in range(max(beta, -1) + 1):
            cols.append(base * logs**i)
    if len(cols) > len(Ns) - 1:
        raise ValueError("too few ladder points for the requested extrapolation order")
    A = np.stack(cols, axis=1)
    # scale columns for conditioning
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1
    A = A / scale
    coef, *_ = np.linalg.lstsq(A.astype(S.dtype), S, rcond=None)
    resid = S - A @ coef
    dof = max(len(Ns) - A.shape[1], 1)
    s2 = float(np.vdot(resid, resid).real) / dof
    try:
        cov = s2 * np.linalg.inv(A.T @ A)
        se = math.sqrt(max(cov[0, 0], 0.0)) / scale[0]
    except np.linalg.LinAlgError:
        se = float("inf")
    return coef[0] / scale[0], se
