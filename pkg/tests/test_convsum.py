import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from shiftconv.arith import to_mp
from shiftconv.convsum import (
    CACHE_ENV,
    DecayHint,
    SigmaCache,
    TruncationConfig,
    decay_hint,
    dense_ladder,
    extrapolate,
    lhs_log_truncated,
    lhs_partial_sums,
    lhs_pow_truncated,
    lhs_tail_bound,
    lhs_weighted_truncated,
    sigma_table,
)
from shiftconv.errors import ConvergenceWarning, NonConvergenceError
from shiftconv.weights import WeightSpec, constant_weight, eq19_weight, power_weight


def brute_sigma(m, k):
    m = abs(m)
    return sum(Fraction(d) ** k for d in range(1, m + 1) if m % d == 0)


def brute_sum(n, r1, r2, w, N):
    total = 0
    for n1 in range(-N, N + 1):
        n2 = n - n1
        if n1 == 0 or n2 == 0:
            continue
        total += brute_sigma(n1, r1) * brute_sigma(n2, r2) * w(n1, n2)
    return total


def test_hand_sum(ctx):
    # n1 in {-1, 2, -2}: 9/8 + 9/8 + (9/8)(28/27)
    with pytest.warns(ConvergenceWarning):
        v = lhs_pow_truncated(ctx, 1, -3, -3, 0, 2)
    assert v.exact and v.value == Fraction(41, 12)


CASES = [
    (-3, -2, WeightSpec({-4: (0, 1, 0, 0)}), lambda a, b: Fraction(b) ** -4),
    (-2, 1, WeightSpec({2: (1, 0, 0, 0), 0: (3, 0, 0, 0)}), lambda a, b: Fraction(a) ** 2 + 3),
    (0, 0, WeightSpec({-1: (1, -1, 0, 0)}), lambda a, b: Fraction(1, a) - Fraction(1, b)),
    (2, -4, WeightSpec({-3: (0, Fraction(1, 7), 0, 0), 1: (0, 0, 0, 0), 2: (0, 2, 0, 0)}), lambda a, b: Fraction(b) ** -3 / 7 + 2 * b**2),
]


@pytest.mark.parametrize("n", [1, 2, -3, 6])
@pytest.mark.parametrize("r1,r2,w,oracle", CASES)
def test_exact_sums_match_enumeration(ctx, n, r1, r2, w, oracle):
    got = lhs_weighted_truncated(ctx, n, r1, r2, w, 25)
    assert got.exact
    assert got.value == brute_sum(n, r1, r2, oracle, 25)


def test_log_sum_matches_enumeration(ctx):
    n, N = 2, 3
    v = lhs_log_truncated(ctx, n, -3, -2, -4, N)
    with mpmath.workdps(60):
        ref = mpmath.fsum(
            to_mp(brute_sigma(n1, -3) * brute_sigma(n - n1, -2)) * mpmath.mpf(n - n1) ** -4 * mpmath.log(abs(n - n1))
            for n1 in range(-N, N + 1)
            if n1 not in (0, n)
        )
        assert abs(v.value - ref) < mpmath.mpf(10) ** -45
    # three terms when n = 1, N = 2
    v = lhs_log_truncated(ctx, 1, -3, -3, -2, 2)
    with mpmath.workdps(60):
        ref = (
            mpmath.mpf(9) / 8 * mpmath.log(2) / 4
            + mpmath.mpf(9) / 8 * mpmath.mpf(28) / 27 * mpmath.log(3) / 9
        )
        assert abs(v.value - ref) < mpmath.mpf(10) ** -45


def test_eq19_small_cutoff(ctx):
    v = lhs_weighted_truncated(ctx, 1, 0, 0, eq19_weight(1), 3)
    with mpmath.workdps(60):
        ref = mpmath.mpf(0)
        for n1 in (-3, -2, -1, 2, 3):
            n2 = 1 - n1
            wv = 2 + mpmath.mpf(n2 - n1) * mpmath.log(abs(mpmath.mpf(n1) / n2))
            ref += brute_sigma(n1, 0) * brute_sigma(n2, 0) * wv
        assert abs(v.value - ref) < mpmath.mpf(10) ** -45


def test_constant_weight_equals_power_zero(ctx):
    a = lhs_weighted_truncated(ctx, 3, -3, -2, constant_weight(), 40).value
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        b = lhs_pow_truncated(ctx, 3, -3, -2, 0, 40).value
    assert a == b


def test_swap_symmetry(ctx):
    # swapping (r1, w(n1, n2)) with (r2, w(n2, n1)) reindexes the same sum
    w = WeightSpec({-4: (0, 1, 0, 0)})
    ws = WeightSpec({-4: (1, 0, 0, 0)})
    N = 30
    a = lhs_weighted_truncated(ctx, 5, -3, -2, w, N).value
    full = brute_sum(5, -2, -3, lambda x, y: Fraction(x) ** -4, N + 5)
    restricted = sum(
        brute_sigma(5 - m, -3) * brute_sigma(m, -2) * Fraction(m) ** -4
        for m in range(-N - 5, N + 6)
        if m not in (0, 5) and abs(5 - m) <= N
    )
    assert a == restricted
    assert lhs_weighted_truncated(ctx, 5, -2, -3, ws, N + 5).value == full


def test_excluded_terms(ctx):
    # n1 = 0 and n2 = 0 never appear, so negative powers of either variable are fine
    w = WeightSpec({-1: (1, 1, 0, 0)})
    v = lhs_weighted_truncated(ctx, 4, -2, -2, w, 10)
    assert v.exact


def test_float_path_against_mp(ctx):
    n, r1, r2, N = 3, -3, -2, 1500
    w = WeightSpec({-6: (0, 1, 0, 0), -3: (1, 0, 0, 0)})
    v = lhs_weighted_truncated(ctx, n, r1, r2, w, N)
    assert not v.exact and v.rounding > 0
    ref = lhs_weighted_truncated(ctx, n, r1, r2, w, N, exact=True).value
    assert abs(v.value - float(ref)) <= v.rounding


def test_exact_requires_rational(ctx):
    with pytest.raises(ValueError):
        lhs_weighted_truncated(ctx, 1, -3, -2, eq19_weight(1), 5, exact=True)
    with pytest.raises(ValueError):
        lhs_weighted_truncated(ctx, 0, -3, -2, power_weight(-2), 5)


@pytest.mark.parametrize("nu", [-3, 0, 2, Fraction(1, 2), 0.5 + 1j])
def test_sigma_table(nu):
    t = sigma_table(nu, 300)
    for m in (1, 2, 12, 97, 210, 300):
        divs = [d for d in range(1, m + 1) if m % d == 0]
        ref = sum(complex(d) ** complex(nu) for d in divs)
        assert abs(t[m] - ref) <= 1e-13 * abs(ref)
    assert t[0] == 0


def test_sigma_table_threads():
    a = sigma_table(-2, 300_000, threads=1)
    b = sigma_table(-2, 300_000, threads=4)
    assert np.array_equal(a, b)


def test_sigma_cache_roundtrip(tmp_path):
    c = SigmaCache(tmp_path)
    t = c.get(-3, 5000)
    files = list(tmp_path.glob("sigma_*"))
    assert len(files) == 1
    again = SigmaCache(tmp_path)._load(SigmaCache._key(-3), 5000)
    assert np.array_equal(t, again)
    # smaller requests are served from memory
    assert np.array_equal(c.get(-3, 100), t[:101])


def test_sigma_cache_rebuilds_corrupt_file(tmp_path):
    c = SigmaCache(tmp_path)
    t = c.get(2, 2000)
    [f] = tmp_path.glob("sigma_*")
    raw = bytearray(f.read_bytes())
    raw[-5] ^= 0xFF
    f.write_bytes(bytes(raw))
    fresh = SigmaCache(tmp_path)
    assert fresh._load(SigmaCache._key(2), 2000) is None
    assert np.array_equal(fresh.get(2, 2000), t)
    assert fresh._load(SigmaCache._key(2), 2000) is not None
    f.write_bytes(b"garbage")
    assert np.array_equal(SigmaCache(tmp_path).get(2, 2000), t)


def test_sigma_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert SigmaCache().directory == tmp_path
    monkeypatch.delenv(CACHE_ENV)
    assert SigmaCache().directory is None


def test_partial_sums_thread_independent():
    w = WeightSpec({-4: (0, 1, 0, 0)})
    ladder = [1000, 70_000, 200_000]
    a = lhs_partial_sums(2, -3, -2, w, ladder, threads=1)
    b = lhs_partial_sums(2, -3, -2, w, ladder, threads=4)
    assert a == b


def test_partial_sums_consistent_with_single_cutoff():
    w = WeightSpec({-4: (0, 1, 0, 0)})
    full = lhs_partial_sums(2, -3, -2, w, [500, 5000])
    single = lhs_partial_sums(2, -3, -2, w, [5000])
    assert math.isclose(full[-1][1], single[0][1], rel_tol=1e-15)


def test_tail_bound_cauchy(ctx):
    n, r1, r2, P = 2, -3, -2, -4
    sums = dict(lhs_partial_sums(n, r1, r2, power_weight(P), [100, 1000, 10_000, 100_000]))
    for lo in (100, 1000, 10_000):
        tb = lhs_tail_bound(n, r1, r2, P, lo)
        assert tb is not None
        assert abs(sums[100_000] - sums[lo]) <= tb
    log_tb = lhs_tail_bound(n, r1, r2, P, 1000, with_log=True)
    assert log_tb > lhs_tail_bound(n, r1, r2, P, 1000)
    assert lhs_tail_bound(n, -1, r2, P, 1000) is None
    assert lhs_tail_bound(n, r1, 2, -2, 1000) is None
    assert lhs_tail_bound(n, r1, r2, P, 3) is None


def test_divergence_warning(ctx):
    with pytest.warns(ConvergenceWarning):
        lhs_pow_truncated(ctx, 1, -3, 0, 0, 10)


def test_truncation_config():
    t = TruncationConfig()
    assert t.N == 100_000
    pts = t.points()
    assert set(t.ladder) <= set(pts) and pts == sorted(pts) and len(pts) > 30
    assert TruncationConfig((10, 100), points_per_decade=0).points() == [10, 100]
    with pytest.raises(ValueError):
        TruncationConfig((100, 10))
    with pytest.raises(ValueError):
        TruncationConfig((0, 10))


def test_dense_ladder():
    pts = dense_ladder(1000, 100_000, 16)
    assert pts[0] == 1000 and pts[-1] == 100_000 and len(pts) == 33
    assert dense_ladder(5, 5) == [5]


def test_decay_hint():
    h = decay_hint(power_weight(-6), -3, -2)
    assert h == DecayHint(5.0, 0, 1)
    h = decay_hint(eq19_weight(1), 0, 0)
    assert h.alpha == 1.0 and h.beta == 2
    h = decay_hint(eq19_weight(5), 0, 0, n=5)
    assert h.alpha == 1.0
    h = decay_hint(power_weight(-2), -3, 2)
    assert h.alpha == -1.0


def test_extrapolate_power_tail():
    L = 1.2345678
    pts = [(N, L + 1 / N + 0.3 / N**2) for N in dense_ladder(100, 10_000, 8)]
    v, err = extrapolate(pts, DecayHint(1.0, 0, 2))
    assert abs(v - L) < 1e-12 and err < 1e-10
    # a one-order fit ignores the N^-2 term and lands within a few parts in 10^6
    v1, _ = extrapolate(pts, 1.0)
    assert abs(v1 - L) < 1e-5


def test_extrapolate_log_tail():
    L = -0.5
    pts = [(N, L + (2 * math.log(N) + 1) / N) for N in dense_ladder(100, 100_000, 8)]
    v, err = extrapolate(pts, DecayHint(1.0, 1))
    assert abs(v - L) < 1e-10
    assert abs(v - L) <= err + 1e-15


def test_extrapolate_complex():
    L = 1 + 2j
    v, err = extrapolate([(N, L + (1 - 1j) / N**2) for N in (10, 20, 40, 80, 160)], 2.0)
    assert abs(v - L) < 1e-12 and isinstance(v, complex)


def test_extrapolate_rejects_divergence():
    pts = [(N, math.sqrt(N)) for N in (10, 100, 1000, 10_000)]
    with pytest.raises(NonConvergenceError):
        extrapolate(pts, 1.0)
    with pytest.raises(NonConvergenceError):
        extrapolate([(N, 1 / N) for N in (10, 100, 1000)], 0.0)
    with pytest.raises(ValueError):
        extrapolate([(10, 1.0), (100, 1.0)], 1.0)
    with pytest.raises(ValueError):
        extrapolate([(N, 1 / N) for N in (10, 100, 1000)], DecayHint(1.0, 0, 3))
