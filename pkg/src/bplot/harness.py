"""Power and size simulations for the global tests."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import mc
from .core import grid_for, labels_from_samples, s_from_labels
from .inference import DEFAULT_REPLICATES, STATISTICS, null_distributions
from .models import get_model

CSV_COLUMNS = ("model", "m", "n", "alpha", "replicates", "power_max", "power_ad", "se")


@dataclass(frozen=True)
class PowerRow:
    model: str
    m: int
    n: int
    alpha: float
    replicates: int
    power: dict[str, float]
    critical_values: dict[str, float]
    null_replicates: int
    null_seed: int
    seed: int

    @property
    def power_max(self) -> float:
        return self.power["max"]

    @property
    def power_ad(self) -> float:
        return self.power["ad"]

    def se(self, statistic: str = "max") -> float:
        p = self.power[statistic]
        return math.sqrt(p * (1 - p) / self.replicates)

    @property
    def mc_se(self) -> float:
        """Largest binomial standard error among the reported powers."""
        return max(self.se(k) for k in self.power)

    @property
    def grid_dimension(self) -> int:
        return grid_for(self.m + self.n).dimension

    def as_csv_row(self) -> dict:
        row = {
            "model": self.model, "m": self.m, "n": self.n, "alpha": self.alpha,
            "replicates": self.replicates, "power_max": self.power_max,
            "power_ad": self.power_ad, "se": round(self.mc_se, 6),
        }
        for k, v in self.power.items():
            if k not in ("max", "ad"):
                row[f"power_{k}"] = v
        return row


def simulate_power(
    model,
    m: int = 100,
    n: int = 100,
    alpha: float = 0.05,
    replicates: int = 10_000,
    seed: int = 0,
    statistics: Sequence[str] = ("max", "ad"),
    null_replicates: int = DEFAULT_REPLICATES,
    null_seed: int = 20_250_101,
    workers: int = 1,
    cache: bool = True,
) -> PowerRow:
    """Rejection frequencies of each test under ``model``.

    Critical values are fixed in advance from ``null_replicates`` null draws
    (cached), then ``replicates`` sample pairs are drawn from F and G.
    """
    model = get_model(model)
    if replicates < 100:
        raise ValueError("power simulation needs at least 100 replicates")
    statistics = tuple(dict.fromkeys(("max", "ad") + tuple(statistics)))
    nulls = null_distributions(m, n, statistics, null_replicates, null_seed, workers=workers, cache=cache)
    crit = {k: nulls[k].critical_value(alpha) for k in statistics}
    fns = [STATISTICS[k] for k in statistics]
    thresholds = np.array([crit[k] for k in statistics])

    def block(rng, size):
        x = model.f.sample(rng, (size, m))
        y = model.g.sample(rng, (size, n))
        s = s_from_labels(labels_from_samples(x, y))
        vals = np.stack([fn(s, m, n) for fn in fns], axis=1)
        return (vals >= thresholds[None, :]).sum(axis=0)

    hits = sum(mc.run_blocks(replicates, seed, block, workers))
    return PowerRow(
        model=model.id, m=m, n=n, alpha=alpha, replicates=replicates,
        power={k: float(h) / replicates for k, h in zip(statistics, hits)},
        critical_values=crit, null_replicates=null_replicates, null_seed=null_seed, seed=seed,
    )


def consistency_sweep(
    model,
    sizes: Iterable[tuple[int, int]] = ((50, 50), (100, 100), (200, 200), (400, 400)),
    alpha: float = 0.05,
    replicates: int = 2000,
    seed: int = 0,
    **kw,
) -> list[PowerRow]:
    """Power along growing sample sizes; the grid dimension is recomputed per size."""
    return [simulate_power(model, m, n, alpha, replicates, seed, **kw) for m, n in sizes]


def power_table(
    models: Iterable = ("NULL",) + tuple(f"A{i}" for i in range(1, 19)),
    **kw,
) -> list[PowerRow]:
    return [simulate_power(mod, **kw) for mod in models]


def write_power_csv(rows: Sequence[PowerRow], path) -> Path:
    path = Path(path)
    dicts = [r.as_csv_row() for r in rows]
    extra = sorted({k for d in dicts for k in d} - set(CSV_COLUMNS))
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(CSV_COLUMNS) + extra, lineterminator="\n")
        w.writeheader()
        w.writerows(dicts)
    return path
