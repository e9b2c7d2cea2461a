"""CSV ingestion: one numeric value per row, optional single header row."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyFile, ParseError


@dataclass(frozen=True)
class Column:
    path: str
    values: list[float]
    header: str | None = None

    @property
    def label(self) -> str:
        return self.header or Path(self.path).stem

    def __len__(self) -> int:
        return len(self.values)


def _to_float(text: str) -> float | None:
    try:
        v = float(text)
    except ValueError:
        return None
    return v


def read_column(path) -> Column:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    values: list[float] = []
    header = None
    seen_row = False
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) != 1:
                raise ParseError(path, lineno, ",".join(row))
            v = _to_float(cells[0])
            if v is None:
                if not seen_row:
                    header = cells[0]
                    seen_row = True
                    continue
                raise ParseError(path, lineno, cells[0])
            if not math.isfinite(v):
                raise ParseError(path, lineno, cells[0])
            seen_row = True
            values.append(v)
    if not values:
        raise EmptyFile(f"{path} holds no numeric values")
    return Column(str(path), values, header)


def read_samples(path_x, path_y) -> tuple[list[float], list[float]]:
    return read_column(path_x).values, read_column(path_y).values
