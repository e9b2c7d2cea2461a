"""
Pooled relative ranks and the rank empirical processes built on them.

Every quantity here is a function of the interleaving pattern of the two
samples in the pooled ordering.  With ``Z_{1:N} < ... < Z_{N:N}`` the pooled
order statistics:

* ``S_i`` counts first-sample values ``<= Z_{i:N}``, ``T_i = i - S_i``;
* ``R_k`` is the pooled rank of the k-th smallest first-sample value.

The unweighted process ``P_hat(p) = eta * (S_i/m - T_i/n)`` for
``p in ((i-1)/N, i/N]`` and the weighted one multiplies it by
``w(p) = 1/sqrt(p(1-p))``.  Bars of the B-plot are the weighted process on a
dyadic grid ``j / 2**(s+1)``.

Batched helpers (``labels_from_samples``, ``bars_from_s``) work on 2-D arrays
with one replicate per row; the single-dataset API routes through them so the
observed statistic and its Monte-Carlo null are computed by the same code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import EmptySample, NonFiniteValue, POutOfRange, SampleTooSmall, TiesPresent

TiePolicy = Literal["error", "jitter"]
_EPS = Fraction(2) ** -52


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _ceil_mul(p, k: int) -> int:
    """``ceil(p*k)``, exact for rationals.

    A float within representation error of a lattice point ``i/k`` is read as
    that point, so ``0.3 * 10`` gives 3 and ``0.2 * 5`` gives 1.
    """
    x = Fraction(p) * k
    if isinstance(p, float):
        r = round(x)
        if abs(x - r) <= 8 * _EPS * max(1, abs(x)):
            return int(r)
    return math.ceil(x)


@dataclass(frozen=True)
class Sample:
    """One sample, stored sorted ascending."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise EmptySample(f"sample {self.label!r} is empty")
        if not np.all(np.isfinite(v)):
            raise NonFiniteValue(f"sample {self.label!r} contains NaN or infinite values")
        object.__setattr__(self, "values", _frozen(np.sort(v)))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TwoSampleData:
    x: Sample
    y: Sample
    s_ranks: np.ndarray
    t_ranks: np.ndarray
    r_ranks: np.ndarray
    tie_policy_applied: Literal["none", "jitter"] = "none"
    jitter_seed: int | None = None

    @property
    def m(self) -> int:
        return len(self.x)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def N(self) -> int:
        return self.m + self.n

    @property
    def lam(self) -> float:
        return self.m / self.N

    @property
    def eta(self) -> float:
        return math.sqrt(self.m * self.n / self.N)

    def swapped(self) -> "TwoSampleData":
        """Same data with the roles of the two samples exchanged."""
        return _from_samples(self.y, self.x, self.tie_policy_applied, self.jitter_seed)


def _min_gap(z: np.ndarray) -> float:
    d = np.diff(np.unique(z))
    if d.size:
        return float(d.min())
    return max(abs(float(z[0])), 1.0) * 1e-6


def _jitter(x: np.ndarray, y: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    z = np.concatenate([x, y])
    rng = np.random.default_rng(seed)
    half_width = 0.25 * _min_gap(z)
    while True:
        _, inv, counts = np.unique(z, return_inverse=True, return_counts=True)
        tied = counts[inv] > 1
        if not tied.any():
            break
        z = z.copy()
        z[tied] += rng.uniform(-half_width, half_width, size=int(tied.sum()))
    return z[: x.size], z[x.size:]


def _has_ties(x: np.ndarray, y: np.ndarray) -> bool:
    z = np.concatenate([x, y])
    return np.unique(z).size < z.size


def _from_samples(xs: Sample, ys: Sample, policy, seed) -> TwoSampleData:
    labels = labels_from_samples(xs.values[None, :], ys.values[None, :])[0]
    s = np.cumsum(labels, dtype=np.int64)
    t = np.arange(1, labels.size + 1) - s
    r = np.flatnonzero(labels) + 1
    return TwoSampleData(
        x=xs, y=ys, s_ranks=_frozen(s), t_ranks=_frozen(t), r_ranks=_frozen(r),
        tie_policy_applied=policy, jitter_seed=seed,
    )


def build_two_sample(
    x: Sequence[float],
    y: Sequence[float],
    tie_policy: TiePolicy = "error",
    seed: int | None = None,
    x_label: str = "x",
    y_label: str = "y",
) -> TwoSampleData:
    """Validate two samples and compute their pooled relative ranks.

    Parameters
    ----------
    x, y : sequences of float
        First and second sample.  Order within each sample is irrelevant.
    tie_policy : {"error", "jitter"}
        ``"error"`` rejects any exact duplicate in the pooled data.
        ``"jitter"`` perturbs every tied value by seeded uniform noise on
        ``+-1/4`` of the smallest nonzero pooled gap, which breaks ties without
        reordering distinct values.
    seed : int, optional
        Seed for the jitter; required when ``tie_policy="jitter"``.

    Raises
    ------
    EmptySample, NonFiniteValue, TiesPresent
    """
    xs = Sample(x, x_label)
    ys = Sample(y, y_label)
    if not _has_ties(xs.values, ys.values):
        return _from_samples(xs, ys, "none", None)
    if tie_policy == "error":
        raise TiesPresent("pooled data contain exact duplicates; use tie_policy='jitter' to break them")
    if tie_policy != "jitter":
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    if seed is None:
        raise ValueError("tie_policy='jitter' needs an explicit seed")
    jx, jy = _jitter(xs.values, ys.values, seed)
    return _from_samples(Sample(jx, x_label), Sample(jy, y_label), "jitter", seed)


@dataclass(frozen=True)
class DyadicGrid:
    """Inspection points ``j / 2**(s+1)``, ``j = 1..2**(s+1) - 1``."""

    resolution: int

    def __post_init__(self):
        if self.resolution < 0:
            raise ValueError("resolution must be >= 0")

    @property
    def denominator(self) -> int:
        return 2 ** (self.resolution + 1)

    @property
    def dimension(self) -> int:
        return self.denominator - 1

    @property
    def j(self) -> np.ndarray:
        return np.arange(1, self.denominator)

    @property
    def points(self) -> np.ndarray:
        return self.j / self.denominator

    def point(self, j: int) -> Fraction:
        return Fraction(j, self.denominator)

    def pooled_index(self, N: int) -> np.ndarray:
        """1-based pooled index ``ceil(p_j * N)`` for every grid point, exactly."""
        return -(-self.j * N // self.denominator)

    def weights(self) -> np.ndarray:
        p = self.points
        return 1.0 / np.sqrt(p * (1.0 - p))


def grid_for(N: int) -> DyadicGrid:
    """Grid of the largest dimension ``2**(s+1) - 1`` not exceeding ``N``."""
    if N < 3:
        raise SampleTooSmall(f"need N >= 3 pooled observations, got {N}")
    return DyadicGrid(resolution=(N + 1).bit_length() - 2)


@dataclass(frozen=True)
class BarSeries:
    grid: DyadicGrid
    bars: np.ndarray
    eta: float
    m: int
    n: int
    x_label: str = "x"
    y_label: str = "y"

    @property
    def points(self) -> np.ndarray:
        return self.grid.points


# -- batched machinery -------------------------------------------------------

def labels_from_samples(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Boolean (B, N) array; True where the pooled order statistic is from x."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    z = np.concatenate([x, y], axis=1)
    order = np.argsort(z, axis=1, kind="stable")
    return order < x.shape[1]


def s_from_labels(labels: np.ndarray) -> np.ndarray:
    return np.cumsum(labels, axis=1, dtype=np.int32)


def bars_from_s(s: np.ndarray, m: int, n: int, grid: DyadicGrid) -> np.ndarray:
    """Weighted process at the grid points, one row per replicate."""
    N = m + n
    idx = grid.pooled_index(N)
    si = s[:, idx - 1]
    ti = idx[None, :] - si
    eta = math.sqrt(m * n / N)
    return eta * (si / m - ti / n) * grid.weights()[None, :]


# -- single-dataset processes ------------------------------------------------

def _p_index(data: TwoSampleData, p) -> int:
    if not 0 <= p <= 1:
        raise POutOfRange(f"p={p} outside [0, 1]")
    return max(1, _ceil_mul(p, data.N))


def process_p_hat(data: TwoSampleData, p) -> float:
    """Unweighted process ``eta * [F_m(H_N^-1(p)) - G_n(H_N^-1(p))]`` on [0, 1]."""
    i = _p_index(data, p)
    si = int(data.s_ranks[i - 1])
    return data.eta * (si / data.m - (i - si) / data.n)


def _weight(p) -> float:
    p = float(p)
    return 1.0 / math.sqrt(p * (1.0 - p))


def process_p_weighted(data: TwoSampleData, p) -> float:
    if not 0 < p < 1:
        raise POutOfRange(f"p={p} outside (0, 1)")
    i = _p_index(data, p)
    si = int(data.s_ranks[i - 1])
    return data.eta * (si / data.m - (i - si) / data.n) * _weight(p)


def process_u_hat(data: TwoSampleData, p) -> float:
    """ROC-type process ``eta * [p - G_n(F_m^-1(p))]``.

    Uses ``n G_n(X_{k:m}) = R_k - k`` with ``k = ceil(p*m)`` (k = 1 at p = 0).
    """
    if not 0 <= p <= 1:
        raise POutOfRange(f"p={p} outside [0, 1]")
    k = max(1, _ceil_mul(p, data.m))
    return data.eta * (float(p) - (int(data.r_ranks[k - 1]) - k) / data.n)


def bars(data: TwoSampleData) -> BarSeries:
    grid = grid_for(data.N)
    values = bars_from_s(data.s_ranks[None, :], data.m, data.n, grid)[0]
    return BarSeries(
        grid=grid, bars=_frozen(values), eta=data.eta, m=data.m, n=data.n,
        x_label=data.x.label, y_label=data.y.label,
    )


def ccc_hat_curve(data: TwoSampleData, eval_points: Sequence[float]) -> np.ndarray:
    """Empirical contrast comparison curve (weighted process divided by eta)."""
    return np.array([process_p_weighted(data, p) / data.eta for p in eval_points])
