"""The JSON analysis report: B-plot bars, acceptance regions and global tests."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any


from . import __version__
from .core import TwoSampleData, bars
from .inference import AcceptanceRegions, TestReport, acceptance_regions, run_test

SCHEMA_VERSION = "1.0"


def _num(v) -> float | None:
    v = float(v)
    return None if math.isnan(v) else v


def _known(cls, d: dict) -> dict:
    # tolerate fields added by newer writers
    names = {f.name for f in fields(cls)}
    return {k: v for k, v in d.items() if k in names}


@dataclass
class InputInfo:
    x_label: str
    y_label: str
    m: int
    n: int
    tie_policy: str
    x_path: str | None = None
    y_path: str | None = None
    jitter_seed: int | None = None


@dataclass
class BarsInfo:
    resolution: int
    dimension: int
    eta: float
    points: list[float]
    values: list[float]


@dataclass
class RegionsInfo:
    alpha: float
    replicates: int
    seed: int
    lower: list[float | None]
    upper: list[float | None]
    local_min: list[float | None]
    local_max: list[float | None]
    flags: list[str]
    empty_deciles: list[int] = field(default_factory=list)


@dataclass
class TestInfo:
    __test__ = False

    statistic: str
    value: float
    critical_value: float
    alpha: float
    p_value: float
    exceed_count: int
    mc_replicates: int
    seed: int
    grid_dimension: int
    decision: str


@dataclass
class AnalysisReport:
    inputs: InputInfo
    bars: BarsInfo
    regions: RegionsInfo | None
    tests: list[TestInfo]
    seed: int
    software_version: str = __version__
    schema_version: str = SCHEMA_VERSION
    created: str | None = None

    def test(self, statistic: str) -> TestInfo | None:
        return next((t for t in self.tests if t.statistic == statistic), None)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "AnalysisReport":
        d = _known(cls, d)
        regions = d.get("regions")
        return cls(
            inputs=InputInfo(**_known(InputInfo, d["inputs"])),
            bars=BarsInfo(**_known(BarsInfo, d["bars"])),
            regions=RegionsInfo(**_known(RegionsInfo, regions)) if regions else None,
            tests=[TestInfo(**_known(TestInfo, t)) for t in d.get("tests", [])],
            seed=d["seed"],
            software_version=d.get("software_version", "unknown"),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
            created=d.get("created"),
        )

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json())
        return path


def _test_info(t: TestReport) -> TestInfo:
    return TestInfo(
        statistic=t.statistic, value=t.value, critical_value=t.critical_value, alpha=t.alpha,
        p_value=t.p_value, exceed_count=t.exceed_count, mc_replicates=t.mc_replicates,
        seed=t.seed, grid_dimension=t.grid_dimension, decision=t.decision,
    )


def _regions_info(r: AcceptanceRegions) -> RegionsInfo:
    return RegionsInfo(
        alpha=r.alpha, replicates=r.replicates, seed=r.seed,
        lower=[_num(v) for v in r.lower], upper=[_num(v) for v in r.upper],
        local_min=[_num(v) for v in r.local_min], local_max=[_num(v) for v in r.local_max],
        flags=r.flags, empty_deciles=list(r.empty_deciles),
    )


def creation_stamp() -> str | None:
    """UTC stamp from ``SOURCE_DATE_EPOCH`` when set; otherwise None keeps output reproducible."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def analyze(
    data: TwoSampleData,
    alpha: float = 0.05,
    replicates: int = 100_000,
    seed: int = 0,
    statistics: tuple[str, ...] = ("max", "ad"),
    regions: bool = True,
    x_path: str | None = None,
    y_path: str | None = None,
    workers: int = 1,
    created: str | None = None,
) -> AnalysisReport:
    series = bars(data)
    tests = [_test_info(run_test(data, s, alpha, replicates, seed, workers=workers)) for s in statistics]
    reg = None
    if regions:
        reg = _regions_info(acceptance_regions(data, alpha, replicates, seed, workers))
    return AnalysisReport(
        inputs=InputInfo(
            x_label=data.x.label, y_label=data.y.label, m=data.m, n=data.n,
            tie_policy=data.tie_policy_applied, x_path=x_path, y_path=y_path,
            jitter_seed=data.jitter_seed,
        ),
        bars=BarsInfo(
            resolution=series.grid.resolution, dimension=series.grid.dimension, eta=series.eta,
            points=[float(p) for p in series.points], values=[float(v) for v in series.bars],
        ),
        regions=reg,
        tests=tests,
        seed=seed,
        created=created,
    )


SCHEMA_PATH = Path(__file__).with_name("report.schema.json")


def schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text())
