"""Two-sample comparison with B-plots, local acceptance regions and weighted rank tests."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BarSeries,
    DyadicGrid,
    Sample,
    TwoSampleData,
    bars,
    build_two_sample,
    ccc_hat_curve,
    grid_for,
    process_p_hat,
    process_p_weighted,
    process_u_hat,
)
from .inference import (  # noqa: E402
    AcceptanceRegions,
    TestReport,
    acceptance_regions,
    ad_statistic,
    max_statistic,
    null_critical_value,
    run_test,
)

__all__ = [
    "AcceptanceRegions",
    "BarSeries",
    "DyadicGrid",
    "Sample",
    "TestReport",
    "TwoSampleData",
    "acceptance_regions",
    "ad_statistic",
    "bars",
    "build_two_sample",
    "ccc_hat_curve",
    "grid_for",
    "max_statistic",
    "null_critical_value",
    "process_p_hat",
    "process_p_weighted",
    "process_u_hat",
    "run_test",
]
