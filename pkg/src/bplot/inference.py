"""
Global tests and local acceptance regions calibrated by Monte Carlo under F = G.

Under the null hypothesis every statistic here depends only on the pooled
interleaving pattern, which is uniformly distributed over the C(N, m) label
assignments.  Null distributions are therefore simulated from uniform samples
(or any other continuous law, see ``null_law``) and cached on disk, keyed by
everything that determines them.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

from . import mc
from .core import BarSeries, TwoSampleData, bars, bars_from_s, grid_for, labels_from_samples, s_from_labels
from .errors import EmptyDecile, InvalidAlpha, TooFewReplicates

RankStatistic = Callable[[np.ndarray, int, int], np.ndarray]

MIN_REPLICATES = 1000
DEFAULT_REPLICATES = 100_000
# relative slack when counting null values >= observed; guards against
# last-bit differences between algebraically equal statistics
_REL_TOL = 1e-12


def max_from_s(s: np.ndarray, m: int, n: int) -> np.ndarray:
    return np.abs(bars_from_s(s, m, n, grid_for(m + n))).max(axis=1)


def _ad_weights(N: int) -> np.ndarray:
    k = np.arange(1, N, dtype=float)
    return np.log((k + 1) * (N - k + 1) / (k * (N - k)))


def ad_from_s(s: np.ndarray, m: int, n: int) -> np.ndarray:
    N = m + n
    k = np.arange(1, N)
    sk = s[:, : N - 1]
    diff = sk / m - (k[None, :] - sk) / n
    return math.sqrt(m * n / N) * np.sqrt(np.sum(diff * diff * _ad_weights(N)[None, :], axis=1))


STATISTICS: dict[str, RankStatistic] = {"max": max_from_s, "ad": ad_from_s}


def register_statistic(name: str, fn: RankStatistic) -> None:
    """Make an extra rank statistic available to tests and the power harness.

    ``fn(s, m, n)`` receives the (B, N) matrix of ``S`` counts and returns B
    values; large values must speak against F = G.
    """
    if name in ("max", "ad"):
        raise ValueError(f"{name!r} is a built-in statistic")
    STATISTICS[name] = fn


def max_statistic(series: BarSeries) -> float:
    return float(np.max(np.abs(series.bars)))


def ad_statistic(data: TwoSampleData) -> float:
    return float(ad_from_s(data.s_ranks[None, :], data.m, data.n)[0])


def statistic_value(data: TwoSampleData, statistic: str) -> float:
    if statistic == "max":
        return float(max_from_s(data.s_ranks[None, :], data.m, data.n)[0])
    return float(STATISTICS[statistic](data.s_ranks[None, :], data.m, data.n)[0])


# -- validation helpers ------------------------------------------------------

def _exact(alpha: float) -> Fraction:
    # decimal reading of the user's alpha: 0.1 means 1/10, not its binary neighbour
    return Fraction(repr(float(alpha)))


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha}")


def _check_replicates(replicates: int) -> None:
    if replicates < MIN_REPLICATES:
        raise TooFewReplicates(f"need at least {MIN_REPLICATES} Monte-Carlo replicates, got {replicates}")


def upper_index(replicates: int, alpha: float) -> int:
    """1-based order statistic used as the (1 - alpha) quantile."""
    return max(1, math.ceil(replicates * (1 - _exact(alpha))))


def lower_index(replicates: int, tail: float) -> int:
    """1-based order statistic used as the ``tail`` quantile (floor, at least 1)."""
    return max(1, math.floor(replicates * _exact(tail)))


# -- null distributions ------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get("BPLOT_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "bplot"


@dataclass(frozen=True)
class NullDistribution:
    statistic: str
    m: int
    n: int
    replicates: int
    seed: int
    values: np.ndarray  # sorted ascending
    null_law: str = "uniform"

    @property
    def grid_dimension(self) -> int:
        return grid_for(self.m + self.n).dimension

    def critical_value(self, alpha: float) -> float:
        _check_alpha(alpha)
        return float(self.values[upper_index(self.replicates, alpha) - 1])

    def exceed_count(self, value: float) -> int:
        threshold = value - _REL_TOL * max(abs(value), 1.0)
        return int(self.values.size - np.searchsorted(self.values, threshold, side="left"))

    def p_value(self, value: float) -> float:
        return (1 + self.exceed_count(value)) / (self.replicates + 1)


def _cache_path(cache_dir: Path, m, n, statistic, replicates, seed, law) -> Path:
    D = grid_for(m + n).dimension
    key = f"{statistic}_m{m}_n{n}_D{D}_B{replicates}_seed{seed}_{law}"
    return cache_dir / f"null_{key}.npy"


def simulate_null_s(
    m: int,
    n: int,
    replicates: int,
    seed: int,
    reducer: Callable[[np.ndarray], np.ndarray],
    workers: int = 1,
    null_law: str = "uniform",
) -> np.ndarray:
    """Apply ``reducer`` to null ``S`` matrices, block by block, and stack the results."""
    N = m + n

    def block(rng, size):
        z = mc.null_draw(rng, size, N, null_law)
        return reducer(s_from_labels(labels_from_samples(z[:, :m], z[:, m:])))

    return np.concatenate(mc.run_blocks(replicates, seed, block, workers), axis=0)


def null_distributions(
    m: int,
    n: int,
    statistics: Sequence[str] = ("max", "ad"),
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    workers: int = 1,
    null_law: str = "uniform",
    cache: bool = True,
    cache_dir: Path | str | None = None,
) -> dict[str, NullDistribution]:
    """Null distributions of several statistics from one shared simulation."""
    if m < 2 or n < 2:
        raise ValueError("both samples need at least 2 observations")
    _check_replicates(replicates)
    for name in statistics:
        if name not in STATISTICS:
            raise KeyError(f"unknown statistic {name!r}")
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()

    out: dict[str, np.ndarray] = {}
    todo = []
    for name in statistics:
        path = _cache_path(cache_dir, m, n, name, replicates, seed, null_law)
        if cache and name in ("max", "ad") and path.exists():
            out[name] = np.load(path)
        else:
            todo.append(name)

    if todo:
        fns = [STATISTICS[name] for name in todo]
        sims = simulate_null_s(
            m, n, replicates, seed,
            lambda s: np.stack([fn(s, m, n) for fn in fns], axis=1),
            workers, null_law,
        )
        for i, name in enumerate(todo):
            vals = np.sort(sims[:, i])
            out[name] = vals
            if cache and name in ("max", "ad"):
                path = _cache_path(cache_dir, m, n, name, replicates, seed, null_law)
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(f".{os.getpid()}.tmp.npy")
                np.save(tmp, vals)
                os.replace(tmp, path)

    result = {}
    for name in statistics:
        vals = out[name]
        vals.setflags(write=False)
        result[name] = NullDistribution(name, m, n, replicates, seed, vals, null_law)
    return result


def null_distribution(m, n, statistic="max", replicates=DEFAULT_REPLICATES, seed=0, **kw) -> NullDistribution:
    return null_distributions(m, n, (statistic,), replicates, seed, **kw)[statistic]


def null_critical_value(
    m: int,
    n: int,
    statistic: str = "max",
    alpha: float = 0.05,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    **kw,
) -> float:
    """Monte-Carlo (1 - alpha) critical value of ``statistic`` under F = G.

    The quantile is the order statistic at ``ceil(replicates * (1 - alpha))``,
    which errs on the conservative side.
    """
    _check_alpha(alpha)
    return null_distribution(m, n, statistic, replicates, seed, **kw).critical_value(alpha)


# -- global test ---------------------------------------------------------------

@dataclass(frozen=True)
class TestReport:
    __test__ = False  # keep pytest from collecting this class

    statistic: str
    value: float
    critical_value: float
    alpha: float
    p_value: float
    exceed_count: int
    mc_replicates: int
    seed: int
    grid_dimension: int

    @property
    def decision(self) -> Literal["reject", "retain"]:
        return "reject" if self.value >= self.critical_value else "retain"

    def p_value_text(self) -> str:
        if self.exceed_count == 0:
            return f"< {1 / (self.mc_replicates + 1):.2g}"
        return f"{self.p_value:.4g}"


def run_test(
    data: TwoSampleData,
    statistic: str = "max",
    alpha: float = 0.05,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    **kw,
) -> TestReport:
    _check_alpha(alpha)
    null = null_distribution(data.m, data.n, statistic, replicates, seed, **kw)
    value = statistic_value(data, statistic)
    return TestReport(
        statistic=statistic,
        value=value,
        critical_value=null.critical_value(alpha),
        alpha=alpha,
        p_value=null.p_value(value),
        exceed_count=null.exceed_count(value),
        mc_replicates=replicates,
        seed=seed,
        grid_dimension=grid_for(data.N).dimension,
    )


# -- local acceptance regions ----------------------------------------------------

DECILES = tuple((k / 10, (k + 1) / 10) for k in range(10))


def decile_of_grid(grid) -> np.ndarray:
    """Decile number 1..10 of each grid point; I_1 = [0, .1], I_k = ((k-1)/10, k/10]."""
    return np.maximum(1, -(-10 * grid.j // grid.denominator))


def _decile_slices(grid) -> list[slice | None]:
    dec = decile_of_grid(grid)
    out = []
    for k in range(1, 11):
        idx = np.flatnonzero(dec == k)
        out.append(slice(idx[0], idx[-1] + 1) if idx.size else None)
    return out


def local_extrema(values: np.ndarray, slices: list[slice | None]) -> tuple[np.ndarray, np.ndarray]:
    """Per-decile minima and maxima of (B, D) bar rows; NaN for empty deciles."""
    B = values.shape[0]
    lo = np.full((B, 10), np.nan)
    hi = np.full((B, 10), np.nan)
    for k, sl in enumerate(slices):
        if sl is not None:
            lo[:, k] = values[:, sl].min(axis=1)
            hi[:, k] = values[:, sl].max(axis=1)
    return lo, hi


@dataclass(frozen=True)
class AcceptanceRegions:
    alpha: float
    lower: np.ndarray  # l^-(N, alpha/2, I_k), NaN where the decile is empty
    upper: np.ndarray
    local_min: np.ndarray
    local_max: np.ndarray
    replicates: int
    seed: int
    grid_dimension: int
    empty_deciles: tuple[int, ...] = ()
    intervals: tuple[tuple[float, float], ...] = DECILES

    @property
    def below(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self.local_min < self.lower

    @property
    def above(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self.local_max > self.upper

    @property
    def flags(self) -> list[str]:
        out = []
        for k in range(10):
            if k + 1 in self.empty_deciles:
                out.append("empty")
            elif self.below[k] and self.above[k]:
                out.append("both")
            elif self.below[k]:
                out.append("below")
            elif self.above[k]:
                out.append("above")
            else:
                out.append("inside")
        return out


def null_barriers(
    m: int,
    n: int,
    alpha: float = 0.05,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    workers: int = 1,
    null_law: str = "uniform",
) -> tuple[np.ndarray, np.ndarray]:
    """Barriers ``l^-`` and ``l^+`` at level alpha/2 for each decile interval."""
    _check_alpha(alpha)
    _check_replicates(replicates)
    grid = grid_for(m + n)
    slices = _decile_slices(grid)

    def reduce(s):
        return np.stack(local_extrema(bars_from_s(s, m, n, grid), slices), axis=2)

    sims = simulate_null_s(m, n, replicates, seed, reduce, workers, null_law)
    r = lower_index(replicates, _exact(alpha) / 2)
    lows = np.sort(sims[:, :, 0], axis=0)
    highs = np.sort(sims[:, :, 1], axis=0)
    return lows[r - 1].copy(), highs[replicates - r].copy()


def acceptance_regions(
    data: TwoSampleData,
    alpha: float = 0.05,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    workers: int = 1,
) -> AcceptanceRegions:
    """Simultaneous local acceptance regions over the ten decile intervals.

    Each region holds the local minimum above ``l^-`` and the local maximum
    below ``l^+`` with null probability at least ``1 - alpha/2`` apiece, so
    both together with probability at least ``1 - alpha``.  Deciles without a
    grid point (small N) are skipped with an ``EmptyDecile`` warning.
    """
    series = bars(data)
    slices = _decile_slices(series.grid)
    empty = tuple(k + 1 for k, sl in enumerate(slices) if sl is None)
    if empty:
        warnings.warn(EmptyDecile(f"deciles {empty} contain no grid point at N={data.N}; skipped"))
    lower, upper = null_barriers(data.m, data.n, alpha, replicates, seed, workers)
    lo, hi = local_extrema(series.bars[None, :], slices)
    return AcceptanceRegions(
        alpha=alpha, lower=lower, upper=upper, local_min=lo[0], local_max=hi[0],
        replicates=replicates, seed=seed, grid_dimension=series.grid.dimension,
        empty_deciles=empty,
    )
