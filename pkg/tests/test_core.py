import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bplot import (
    bars,
    build_two_sample,
    ccc_hat_curve,
    grid_for,
    process_p_hat,
    process_p_weighted,
    process_u_hat,
)
from bplot.core import DyadicGrid, Sample
from bplot.errors import EmptySample, NonFiniteValue, POutOfRange, SampleTooSmall, TiesPresent

W_QUARTER = 4 / math.sqrt(3)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def two_samples(draw, max_size=40):
    m = draw(st.integers(2, max_size))
    n = draw(st.integers(2, max_size))
    z = draw(st.lists(finite, min_size=m + n, max_size=m + n, unique=True))
    return z[:m], z[m:]


# -- build_two_sample ------------------------------------------------------------

def test_relative_ranks_toy(toy):
    assert toy.s_ranks.tolist() == [1, 1, 1, 2]
    assert toy.t_ranks.tolist() == [0, 1, 2, 2]
    assert toy.r_ranks.tolist() == [1, 4]
    assert toy.eta == 1.0


def test_relative_ranks_separated():
    d = build_two_sample([1, 2], [3, 4])
    assert d.s_ranks.tolist() == [1, 2, 2, 2]
    assert d.t_ranks.tolist() == [0, 0, 1, 2]


def test_order_of_input_irrelevant():
    a = build_two_sample([0.4, 0.1], [0.3, 0.2])
    b = build_two_sample([0.1, 0.4], [0.2, 0.3])
    assert a.s_ranks.tolist() == b.s_ranks.tolist()


@given(two_samples())
def test_rank_identities(xy):
    d = build_two_sample(*xy)
    i = np.arange(1, d.N + 1)
    assert np.array_equal(d.s_ranks + d.t_ranks, i)
    assert d.s_ranks[-1] == d.m and d.t_ranks[-1] == d.n
    assert set(np.diff(np.r_[0, d.s_ranks])) <= {0, 1}
    assert set(np.diff(np.r_[0, d.t_ranks])) <= {0, 1}
    r = d.r_ranks
    assert np.all(np.diff(r) > 0)
    k = np.arange(1, d.m + 1)
    assert np.all((r >= k) & (r <= k + d.n))


@given(two_samples())
def test_pooled_identity_exact(xy):
    d = build_two_sample(*xy)
    lam = Fraction(d.m, d.N)
    for i, (s, t) in enumerate(zip(d.s_ranks, d.t_ranks), start=1):
        assert lam * Fraction(int(s), d.m) + (1 - lam) * Fraction(int(t), d.n) == Fraction(i, d.N)


def test_empty_and_nonfinite():
    with pytest.raises(EmptySample):
        build_two_sample([], [1.0])
    with pytest.raises(NonFiniteValue):
        build_two_sample([1.0, float("nan")], [2.0])
    with pytest.raises(NonFiniteValue):
        Sample([np.inf])


def test_ties_error_by_default():
    with pytest.raises(TiesPresent):
        build_two_sample([1.0, 2.0], [2.0, 3.0])


def test_ties_jitter_seeded():
    a = build_two_sample([1.0, 2.0, 2.0], [2.0, 3.0], tie_policy="jitter", seed=7)
    b = build_two_sample([1.0, 2.0, 2.0], [2.0, 3.0], tie_policy="jitter", seed=7)
    assert a.tie_policy_applied == "jitter" and a.jitter_seed == 7
    assert np.array_equal(a.x.values, b.x.values) and np.array_equal(a.y.values, b.y.values)
    z = np.concatenate([a.x.values, a.y.values])
    assert np.unique(z).size == z.size
    # untied values stay put and tied ones stay inside +-1/4 of the gap
    assert 1.0 in a.x.values and 3.0 in a.y.values
    assert np.all(np.abs(z[(z > 1.5) & (z < 2.5)] - 2.0) <= 0.25)


def test_jitter_needs_seed():
    with pytest.raises(ValueError):
        build_two_sample([1.0], [1.0, 2.0], tie_policy="jitter")


def test_no_ties_records_none():
    d = build_two_sample([1.0], [2.0, 3.0], tie_policy="jitter", seed=1)
    assert d.tie_policy_applied == "none" and d.jitter_seed is None


# -- grid ------------------------------------------------------------------------

@pytest.mark.parametrize("N, D", [(200, 127), (149, 127), (111, 63), (800, 511), (4, 3), (3, 3), (7, 7), (6, 3)])
def test_grid_dimension(N, D):
    assert grid_for(N).dimension == D


def test_grid_tiny():
    g = grid_for(4)
    assert g.points.tolist() == [0.25, 0.5, 0.75]
    with pytest.raises(SampleTooSmall):
        grid_for(2)


@given(st.integers(0, 12))
def test_grid_structure(s):
    g = DyadicGrid(s)
    p = g.points
    assert g.dimension == 2 ** (s + 1) - 1 == p.size
    assert np.all(np.diff(p) > 0)
    assert np.array_equal(p + p[::-1], np.ones_like(p))


@given(st.integers(3, 5000))
def test_grid_largest_not_exceeding(N):
    D = grid_for(N).dimension
    assert D <= N < 2 * D + 1


# -- processes ---------------------------------------------------------------------

def test_p_hat_toy(toy):
    assert process_p_hat(toy, 0.25) == pytest.approx(0.5)
    assert process_p_hat(toy, 0.5) == pytest.approx(0.0)
    assert process_p_hat(toy, 0.75) == pytest.approx(-0.5)
    assert process_p_hat(toy, 1) == 0.0


def test_p_weighted_toy(toy):
    assert process_p_weighted(toy, 0.25) == pytest.approx(0.5 * W_QUARTER, abs=1e-12)
    assert process_p_weighted(toy, 0.25) == pytest.approx(1.1547, abs=1e-4)
    with pytest.raises(POutOfRange):
        process_p_weighted(toy, 0.0)
    with pytest.raises(POutOfRange):
        process_p_hat(toy, 1.5)


def test_u_hat_toy(toy):
    assert process_u_hat(toy, 0.5) == pytest.approx(0.5)
    assert process_u_hat(toy, 0.0) == pytest.approx(toy.eta * (0 - (toy.r_ranks[0] - 1) / toy.n))


def test_bars_toy(toy):
    b = bars(toy)
    assert b.grid.dimension == 3
    assert np.allclose(b.bars, [W_QUARTER / 2, 0.0, -W_QUARTER / 2], atol=1e-12)


def test_ccc_hat_toy(toy):
    assert ccc_hat_curve(toy, [0.25])[0] == pytest.approx(1.1547, abs=1e-4)


def test_ccc_hat_zero_when_balanced():
    # alternating pattern: S_i/m == T_i/n at every even i
    d = build_two_sample([1, 3, 5, 7], [2, 4, 6, 8])
    pts = [0.2, 0.25, 0.5, 0.7, 0.75]  # ceil(8p) in {2, 4, 6}
    assert np.array_equal(ccc_hat_curve(d, pts), np.zeros(5))


@given(two_samples(), st.floats(0.01, 0.99))
def test_ccc_times_eta_is_weighted(xy, p):
    d = build_two_sample(*xy)
    assert ccc_hat_curve(d, [p])[0] * d.eta == pytest.approx(process_p_weighted(d, p), rel=1e-12, abs=1e-12)


@given(two_samples())
def test_p_weighted_half_is_twice_p_hat(xy):
    d = build_two_sample(*xy)
    assert process_p_weighted(d, 0.5) == 2 * process_p_hat(d, 0.5)


@given(two_samples())
def test_antisymmetry(xy):
    d = build_two_sample(*xy)
    e = d.swapped()
    assert np.array_equal(bars(e).bars, -bars(d).bars)
    for p in (0.1, 0.5, 0.77):
        assert process_p_hat(e, p) == -process_p_hat(d, p)
        assert process_p_weighted(e, p) == -process_p_weighted(d, p)


@given(st.lists(st.integers(-10**5, 10**5), min_size=4, max_size=80, unique=True), st.data())
def test_rank_invariance(z, data):
    m = data.draw(st.integers(2, len(z) - 2))
    x, y = np.asarray(z[:m], float), np.asarray(z[m:], float)
    d = build_two_sample(x, y)
    for g in (lambda v: 3 * np.sinh(v / 1e4) + 1, lambda v: np.exp(v / 1e5), lambda v: v**3):
        e = build_two_sample(g(x), g(y))
        assert np.array_equal(d.s_ranks, e.s_ranks)
        assert np.array_equal(d.r_ranks, e.r_ranks)
        assert np.array_equal(bars(d).bars, bars(e).bars)


@settings(max_examples=40)
@given(two_samples(max_size=15))
def test_step_structure(xy):
    d = build_two_sample(*xy)
    for i in range(1, d.N + 1):
        lo = Fraction(i - 1, d.N) + Fraction(1, 10**6 * d.N)
        hi = Fraction(i, d.N)
        assert process_p_hat(d, lo) == process_p_hat(d, hi)
    for k in range(1, d.m + 1):
        lo = Fraction(k - 1, d.m) + Fraction(1, 10**6 * d.m)
        hi = Fraction(k, d.m)
        eta = d.eta
        # U_hat - eta*p is the step part
        assert process_u_hat(d, lo) - eta * float(lo) == pytest.approx(process_u_hat(d, hi) - eta * float(hi), abs=1e-9)


@settings(max_examples=30)
@given(two_samples(max_size=15))
def test_u_hat_has_m_step_values(xy):
    d = build_two_sample(*xy)
    steps = {process_u_hat(d, Fraction(k, d.m)) - d.eta * k / d.m for k in range(1, d.m + 1)}
    assert len({round(v, 9) for v in steps}) <= d.m
    p_steps = {process_p_hat(d, Fraction(i, d.N)) for i in range(1, d.N + 1)}
    assert len(p_steps) <= d.N


def test_lattice_ceiling_exact():
    # 0.3 * 10 is 3.0000000000000004 in floats; the index must still be 3
    d = build_two_sample(np.arange(5) * 2.0, np.arange(5) * 2.0 + 1)
    assert process_p_hat(d, 0.3) == process_p_hat(d, Fraction(3, 10))


def test_null_bar_moments():
    from bplot.core import bars_from_s, labels_from_samples, s_from_labels
    from bplot.moments import exact_var_p

    m = n = 30
    rng = np.random.default_rng(11)
    z = rng.random((20_000, m + n))
    s = s_from_labels(labels_from_samples(z[:, :m], z[:, m:]))
    g = grid_for(m + n)
    b = bars_from_s(s, m, n, g)
    se = b.std(axis=0) / math.sqrt(b.shape[0])
    assert np.all(np.abs(b.mean(axis=0)) < 4 * se)
    # weighted bar variance = w^2 * Var P_hat
    w2 = g.weights() ** 2
    exact = np.array([exact_var_p(m, n, p) for p in g.points]) * w2
    var_se = exact * math.sqrt(2 / (b.shape[0] - 1))
    assert np.all(np.abs(b.var(axis=0, ddof=1) - exact) < 5 * var_se)


def test_float_on_lattice_reads_as_lattice_point():
    d = build_two_sample([0.5, 2.5], [1.5, 3.5, 4.5])  # N = 5
    # float(0.2) lies a hair above 1/5; it still selects pooled index 1
    assert process_p_hat(d, 0.2) == process_p_hat(d, Fraction(1, 5))
    assert process_p_hat(d, 0.2) != process_p_hat(d, Fraction(2, 5))
