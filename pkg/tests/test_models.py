import math
import zlib

import numpy as np
import pytest
from scipy import stats

from bplot.errors import ModelNotFullySpecified, UnknownModel
from bplot.models import (
    MODELS,
    TABLE_IDS,
    Mixture,
    catalog,
    ccc_analytic,
    estimate_ccc_curve,
    get_model,
    lehmann,
    anderson,
    sample,
)


def _all_dists():
    seen = {}
    for model in MODELS.values():
        for d in (model.f, model.g):
            if d.cdf is not None:
                seen.setdefault(d.name, d)
    return sorted(seen.items())


def test_registry():
    assert set(TABLE_IDS) | {"NULL"} == set(MODELS)
    assert get_model("a1") is MODELS["A1"]
    with pytest.raises(UnknownModel):
        get_model("A99")
    not_specified = {m.id for m in MODELS.values() if not m.fully_specified}
    assert not_specified == {"A8", "A12", "A13", "A18"}
    assert MODELS["A1"].table_power == (76, 86)
    assert len(catalog()) == 19


def test_null_sides_identical():
    a = sample("NULL", "F", 1000, seed=3)
    b = sample("NULL", "G", 1000, seed=3)
    assert MODELS["NULL"].f.name == MODELS["NULL"].g.name
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_seed_determinism():
    a = sample("A6", "G", 500, seed=42)
    b = sample("A6", "G", 500, seed=42)
    c = sample("A6", "G", 500, seed=43)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert not np.array_equal(sample("A1", "F", 50, seed=1), sample("A1", "G", 50, seed=1) - 0.45)


def test_strict_mode():
    with pytest.raises(ModelNotFullySpecified):
        sample("A8", "F", 10, seed=0, strict=True)
    assert sample("A8", "F", 10, seed=0).shape == (10,)
    with pytest.raises(ValueError):
        sample("A1", "H", 10, seed=0)


def test_lehmann_one_and_anderson_zero_are_standard_normal():
    x = np.linspace(-4, 4, 81)
    assert np.allclose(lehmann(1).cdf(x), stats.norm.cdf(x), atol=1e-15)
    assert np.allclose(anderson(0).cdf(x), stats.norm.cdf(x), atol=1e-15)
    rng = np.random.default_rng(0)
    z = anderson(0).sample(np.random.default_rng(0), 1000)
    assert np.array_equal(z, rng.standard_normal(1000))


def test_pareto_median():
    x = sample("A2", "G", 10**6, seed=5)  # Pareto(1.6)
    assert abs(np.median(x) - 2 ** (1 / 1.6)) < 0.01
    assert 2 ** (1 / 1.6) == pytest.approx(1.5422, abs=1e-4)


def _ks_distance(x, cdf):
    # sup |F_n - F| with left limits taken at the previous float, so values that
    # round onto one float (e.g. 1 - u**20 -> 1.0) are compared fairly
    v, counts = np.unique(x, return_counts=True)
    right = np.cumsum(counts) / x.size
    left = right - counts / x.size
    return max(np.max(np.abs(right - cdf(v))), np.max(np.abs(left - cdf(np.nextafter(v, -np.inf)))))


@pytest.mark.slow
@pytest.mark.parametrize("name, dist", _all_dists(), ids=[n for n, _ in _all_dists()])
def test_sampler_matches_cdf(name, dist):
    n = 10**6
    x = dist.sample(np.random.default_rng(zlib.crc32(name.encode())), n)
    assert _ks_distance(x, dist.cdf) < 1.5 * 1.63 / math.sqrt(n)


def test_ks_distance_agrees_with_scipy():
    x = np.random.default_rng(0).normal(size=5000)
    assert _ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, stats.norm.cdf).statistic, rel=1e-9)


def test_mixture_frequencies():
    mix = MODELS["A4"].g
    assert isinstance(mix, Mixture)
    k = 200_000
    _, which = mix.sample_with_components(np.random.default_rng(1), k)
    for c, w in enumerate(mix.weights):
        freq = np.mean(which == c)
        assert abs(freq - w) < 4 * math.sqrt(w * (1 - w) / k)


def test_ccc_null_flat():
    pts = np.linspace(0.01, 0.99, 99)
    c = estimate_ccc_curve("NULL", pts, replicates=200, m=1000, n=1000, seed=2)
    assert np.all(np.abs(c.values) < 4 * c.se + 1e-12)


def test_ccc_a1_nonnegative_and_matches_analytic():
    pts = np.linspace(0.01, 0.99, 50)
    c = estimate_ccc_curve("A1", pts, replicates=200, m=2000, n=2000, seed=3)
    assert np.all(c.values >= 0)
    exact = ccc_analytic("A1", pts)
    assert np.all(np.abs(c.values - exact) < 4 * c.se + 0.01)


def test_ccc_scale_alternative_changes_sign():
    pts = np.array([0.05, 0.25, 0.5, 0.75, 0.95])
    exact = ccc_analytic("A7", pts)
    # wider G: F above G on the right, below on the left
    assert exact[0] < 0 < exact[-1]
    assert abs(exact[2]) < 1e-9
    c = estimate_ccc_curve("A7", pts, replicates=100, m=2000, n=2000, seed=4)
    assert np.sign(c.values[0]) == -1 and np.sign(c.values[-1]) == 1


def test_ccc_strict():
    with pytest.raises(ModelNotFullySpecified):
        estimate_ccc_curve("A12", [0.5], replicates=10, m=10, n=10)
