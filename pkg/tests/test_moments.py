import math
from fractions import Fraction

import numpy as np
import pytest

from bplot.core import grid_for, labels_from_samples, s_from_labels
from bplot.errors import POutOfRange, TooLargeToEnumerate
from bplot.moments import (
    MomentCurve,
    delta_curve,
    enumerate_null_moments,
    exact_mean_p,
    exact_mean_u,
    exact_var_p,
    exact_var_u,
    hypergeom_pmf,
    mean_u_over_eta,
    s_distribution,
    variance_table,
)


def test_small_case_values():
    assert exact_mean_u(2, 2, 0.5) == pytest.approx(1 / 6)
    assert mean_u_over_eta(2, 2, Fraction(1, 2)) == Fraction(1, 6)
    assert exact_var_p(2, 2, 0.5, exact=True) == Fraction(1, 3)
    assert exact_mean_p(2, 2, 0.3) == 0.0


def test_small_case_enumeration():
    (e,) = enumerate_null_moments(2, 2, [Fraction(1, 2)])
    assert e.configurations == 6
    assert e.var_p == Fraction(1, 3)
    assert e.mean_u_over_eta == Fraction(1, 6)
    assert e.mean_p_over_eta == 0


@pytest.mark.parametrize("m, n", [(2, 2), (3, 7), (10, 10), (1, 5)])
def test_var_p_vanishes_at_one(m, n):
    assert exact_var_p(m, n, 1, exact=True) == 0


def test_var_p_limit():
    p = 0.3
    assert abs(exact_var_p(5000, 5000, p) / (p * (1 - p)) - 1) < 0.02


def test_mean_u_sawtooth_changes_sign():
    m, n = 6, 4
    for k in range(1, m + 1):
        # just left of k/(m+1) the mean is negative on the k-th step, just right positive
        p_left = Fraction(k, m + 1) - Fraction(1, 10**6)
        p_right = Fraction(k, m + 1) + Fraction(1, 10**6)
        if math.ceil(p_left * m) == math.ceil(p_right * m) == k:
            assert mean_u_over_eta(m, n, p_left) < 0 < mean_u_over_eta(m, n, p_right)


def test_p_range_checked():
    with pytest.raises(POutOfRange):
        exact_var_u(3, 3, 0)
    with pytest.raises(POutOfRange):
        delta_curve(3, 3, 1.0)


def test_variances_nonnegative():
    for m, n in [(2, 3), (20, 20), (7, 50)]:
        for p in np.linspace(0.001, 1, 97):
            assert exact_var_u(m, n, p) >= 0
            assert exact_var_p(m, n, p) >= 0


def test_moment_curve():
    c = MomentCurve(5, 7, "p_hat", "variance")
    assert c(0.4) == exact_var_p(5, 7, 0.4)
    assert MomentCurve(5, 7, "u_hat", "mean")(0.4) == exact_mean_u(5, 7, 0.4)


def test_too_large_to_enumerate():
    with pytest.raises(TooLargeToEnumerate):
        enumerate_null_moments(15, 15, [0.5])


def _check_exact(m, n, ps):
    for e in enumerate_null_moments(m, n, ps):
        assert e.mean_p_over_eta == 0
        assert e.mean_u_over_eta == mean_u_over_eta(m, n, e.p)
        assert e.var_u == exact_var_u(m, n, e.p, exact=True)
        assert e.var_p == exact_var_p(m, n, e.p, exact=True)
        f = e.as_floats(m, n)
        assert abs(f["var_u"] - exact_var_u(m, n, float(e.p))) <= 1e-12
        assert abs(f["var_p"] - exact_var_p(m, n, float(e.p))) <= 1e-12
        assert abs(f["mean_u"] - exact_mean_u(m, n, float(e.p))) <= 1e-12


@pytest.mark.parametrize("m, n", [(m, n) for m in range(1, 9) for n in range(1, 9) if math.comb(m + n, m) <= 10**4])
def test_enumeration_matches_closed_forms(m, n):
    N = m + n
    ps = {Fraction(i, N) for i in range(1, N + 1)}
    if N >= 3:
        g = grid_for(N)
        ps |= {g.point(j) for j in g.j.tolist()}
    _check_exact(m, n, sorted(ps))


@pytest.mark.parametrize("N", range(2, 13))
def test_s_is_hypergeometric(N):
    for m in range(1, N):
        for k in range(1, N + 1):
            law = s_distribution(m, N - m, k)
            expected = {s: hypergeom_pmf(N, k, m, s) for s in range(0, min(k, m) + 1)}
            assert law == {s: q for s, q in expected.items() if q}


def test_monte_carlo_bar_variance():
    # P_hat variance at every grid point, m = n = 50, 10^5 replicates
    m = n = 50
    B = 100_000
    g = grid_for(m + n)
    idx = g.pooled_index(m + n)
    rng = np.random.default_rng(2024)
    acc = []
    for _ in range(B // 10_000):
        z = rng.random((10_000, m + n))
        s = s_from_labels(labels_from_samples(z[:, :m], z[:, m:]))
        si = s[:, idx - 1]
        acc.append(math.sqrt(m * n / (m + n)) * (si / m - (idx - si) / n))
    v = np.concatenate(acc).var(axis=0, ddof=1)
    exact = np.array([exact_var_p(m, n, p) for p in g.points])
    se = exact * math.sqrt(2 / (B - 1))
    assert np.all(np.abs(v - exact) < 4 * se)


def test_variance_table():
    pts = np.array([0.1, 0.5, 0.9])
    t = variance_table(10, 12, pts)
    assert np.allclose(t["asymptotic"], pts * (1 - pts))
    assert t["var_u"].shape == t["var_p"].shape == (3,)
