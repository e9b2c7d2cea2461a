"""
Static SVG figures: B-plots with shaded acceptance strips, CCC curves and
variance comparison panels.

Output is plain text built from fixed-precision numbers, so identical inputs
give identical bytes.  Drawn elements carry ``class`` and ``data-*``
attributes that make their geometry checkable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import BPlotError
from .models import CccCurve
from .moments import delta_curve, exact_var_p, exact_var_u
from .report import AnalysisReport

LOWER_COLOR = "#FFD6D6"  # one-sided region for the local minimum
UPPER_COLOR = "#D6D6FF"  # one-sided region for the local maximum
BAND_COLOR = "#FFFFFF"  # two-sided acceptance band
PARABOLA_COLOR = "#D3D3D3"
BAR_COLOR = "#404040"

DELTA_RANGE = (0.03, 0.97)
CCC_RANGE = (0.0001, 0.9999)


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


@dataclass
class Frame:
    """Maps data coordinates into one rectangular panel."""

    left: float
    top: float
    width: float
    height: float
    xlim: tuple[float, float]
    ylim: tuple[float, float]

    def x(self, v: float) -> float:
        a, b = self.xlim
        return self.left + (v - a) / (b - a) * self.width

    def y(self, v: float) -> float:
        a, b = self.ylim
        return self.top + (b - v) / (b - a) * self.height


@dataclass
class Svg:
    width: int
    height: int
    parts: list[str] = field(default_factory=list)

    def add(self, tag: str, text: str | None = None, **attrs) -> None:
        items = " ".join(f'{k.rstrip("_").replace("_", "-")}="{escape(str(v))}"' for k, v in attrs.items())
        if text is None:
            self.parts.append(f"<{tag} {items}/>")
        else:
            self.parts.append(f"<{tag} {items}>{escape(text)}</{tag}>")

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif" font-size="11">'
        )
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        try:
            path.write_text(self.render())
        except OSError as exc:
            raise BPlotError(f"cannot write {path}: {exc}") from exc
        return path


def _axes(svg: Svg, fr: Frame, xticks: Sequence[float], yticks: Sequence[float], zero: bool = True) -> None:
    svg.add("rect", x=_f(fr.left), y=_f(fr.top), width=_f(fr.width), height=_f(fr.height),
            fill="none", stroke="#000000", stroke_width="0.8", class_="frame")
    for t in xticks:
        px = fr.x(t)
        svg.add("line", x1=_f(px), y1=_f(fr.top + fr.height), x2=_f(px), y2=_f(fr.top + fr.height + 4),
                stroke="#000000", stroke_width="0.8")
        svg.add("text", f"{t:g}", x=_f(px), y=_f(fr.top + fr.height + 15), text_anchor="middle")
    for t in yticks:
        py = fr.y(t)
        svg.add("line", x1=_f(fr.left - 4), y1=_f(py), x2=_f(fr.left), y2=_f(py),
                stroke="#000000", stroke_width="0.8")
        svg.add("text", f"{t:g}", x=_f(fr.left - 6), y=_f(py + 4), text_anchor="end")
    if zero and fr.ylim[0] < 0 < fr.ylim[1]:
        svg.add("line", x1=_f(fr.left), y1=_f(fr.y(0)), x2=_f(fr.left + fr.width), y2=_f(fr.y(0)),
                stroke="#000000", stroke_width="0.6", class_="zero")


def _polyline(svg: Svg, fr: Frame, xs, ys, color: str, cls: str, width: float = 1.2) -> None:
    pts = " ".join(f"{_f(fr.x(a))},{_f(fr.y(b))}" for a, b in zip(xs, ys))
    svg.add("polyline", points=pts, fill="none", stroke=color, stroke_width=f"{width:g}", class_=cls,
            data_xmin=f"{xs[0]:g}", data_xmax=f"{xs[-1]:g}")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    raw = (hi - lo) / target
    step = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * step:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12:
        out.append(round(v, 10))
        v += step
    return out


# -- B-plot ------------------------------------------------------------------------

def bplot_range(report: AnalysisReport) -> float:
    vals = [abs(v) for v in report.bars.values]
    if report.regions is not None:
        vals += [abs(v) for v in report.regions.lower + report.regions.upper if v is not None]
    return float(max(3, math.ceil(max(vals, default=0) * 1.05)))


def bplot_svg(report: AnalysisReport, width: int = 760, height: int = 380) -> Svg:
    svg = Svg(width, height)
    R = bplot_range(report)
    fr = Frame(left=50, top=40, width=width - 70, height=height - 80, xlim=(0.0, 1.0), ylim=(-R, R))
    inp = report.inputs
    max_test = report.test("max")
    D = report.bars.dimension
    title = f"{inp.x_label}/{inp.y_label}  (m={inp.m}, n={inp.n}, D(N)={D})"
    svg.add("text", title, x=_f(fr.left), y="16", font_size="13", class_="title")
    if max_test is not None:
        pv = "< {:.2g}".format(1 / (max_test.mc_replicates + 1)) if max_test.exceed_count == 0 else f"{max_test.p_value:.4f}"
        svg.add("text", f"Max_D(N) = {max_test.value:.4f}, p-value {pv}", x=_f(fr.left), y="32", class_="caption")

    if report.regions is not None:
        reg = report.regions
        for k in range(10):
            lo, hi = reg.lower[k], reg.upper[k]
            if lo is None or hi is None:
                continue
            x0, x1 = fr.x(k / 10), fr.x((k + 1) / 10)
            common = dict(x=_f(x0), width=_f(x1 - x0), data_decile=str(k + 1), stroke="none")
            svg.add("rect", y=_f(fr.y(lo)), height=_f(fr.y(-R) - fr.y(lo)), fill=LOWER_COLOR,
                    class_="strip-lower", data_level=_f(lo), **common)
            svg.add("rect", y=_f(fr.y(R)), height=_f(fr.y(hi) - fr.y(R)), fill=UPPER_COLOR,
                    class_="strip-upper", data_level=_f(hi), **common)
            svg.add("rect", y=_f(fr.y(hi)), height=_f(fr.y(lo) - fr.y(hi)), fill=BAND_COLOR,
                    class_="strip-band", **common)

    spacing = fr.width / (D + 1)
    bw = max(0.6 * spacing, 0.5)
    y0 = fr.y(0)
    for j, (p, v) in enumerate(zip(report.bars.points, report.bars.values), start=1):
        half = abs(v) / (2 * R) * fr.height
        top = y0 - half if v > 0 else y0
        svg.add("rect", x=_f(fr.x(p) - bw / 2), y=_f(top), width=_f(bw), height=_f(half),
                fill=BAR_COLOR, class_="bar", data_j=str(j), data_p=f"{p:.6g}", data_value=f"{v:.6f}")
    _axes(svg, fr, [k / 10 for k in range(11)], _nice_ticks(-R, R))
    return svg


def emit_bplot(report: AnalysisReport, out_path) -> Path:
    return bplot_svg(report).write(out_path)


# -- CCC curves ------------------------------------------------------------------------

def emit_ccc_plot(curves: Sequence[CccCurve], out_path, cols: int = 3) -> Path:
    cols = max(1, min(cols, len(curves)))
    rows = math.ceil(len(curves) / cols)
    pw, ph = 240, 170
    svg = Svg(cols * pw + 20, rows * ph + 20)
    for i, c in enumerate(curves):
        r, q = divmod(i, cols)
        vals = np.asarray(c.values)
        R = max(1.0, float(np.max(np.abs(vals))) * 1.1)
        fr = Frame(left=q * pw + 45, top=r * ph + 25, width=pw - 60, height=ph - 55,
                   xlim=CCC_RANGE, ylim=(-R, R))
        svg.add("text", c.model, x=_f(fr.left), y=_f(fr.top - 6), class_="panel-title", data_model=c.model)
        _axes(svg, fr, [0.25, 0.5, 0.75], _nice_ticks(-R, R, 4))
        _polyline(svg, fr, list(np.asarray(c.points)), list(vals), "#1f4e9e", "ccc")
    return svg.write(out_path)


# -- variance comparison ------------------------------------------------------------------

def _var_grid(k: int = 600) -> np.ndarray:
    return np.arange(1, k + 1) / k


def emit_variance_panels(pairs: Sequence[tuple[int, int]], out_path) -> Path:
    """Three rows per (m, n): Var U_hat and Var P_hat against p(1-p), then Delta_N."""
    pw, ph = 260, 170
    svg = Svg(len(pairs) * pw + 20, 3 * ph + 20)
    p = _var_grid()
    parabola = p * (1 - p)
    for q, (m, n) in enumerate(pairs):
        vu = [exact_var_u(m, n, t) for t in p]
        vp = [exact_var_p(m, n, t) for t in p]
        top = max(max(vu), max(vp), 0.25) * 1.1
        for r, (vals, name) in enumerate(((vu, "var-u"), (vp, "var-p"))):
            fr = Frame(left=q * pw + 50, top=r * ph + 25, width=pw - 65, height=ph - 55,
                       xlim=(0.0, 1.0), ylim=(0.0, top))
            label = "Var U_hat" if name == "var-u" else "Var P_hat"
            svg.add("text", f"{label}, m={m}, n={n}", x=_f(fr.left), y=_f(fr.top - 6), class_="panel-title")
            _axes(svg, fr, [0, 0.5, 1], _nice_ticks(0, top, 3), zero=False)
            _polyline(svg, fr, list(p), list(parabola), PARABOLA_COLOR, "parabola", width=3)
            _polyline(svg, fr, list(p), vals, "#1f4e9e", name)
        lo, hi = DELTA_RANGE
        dp = np.linspace(lo, hi, 941)
        dv = [delta_curve(m, n, t) for t in dp]
        R = max(abs(min(dv)), abs(max(dv))) * 1.1
        fr = Frame(left=q * pw + 50, top=2 * ph + 25, width=pw - 65, height=ph - 55, xlim=(lo, hi), ylim=(-R, R))
        svg.add("text", f"Delta_N, m={m}, n={n}", x=_f(fr.left), y=_f(fr.top - 6), class_="panel-title")
        _axes(svg, fr, [lo, 0.5, hi], _nice_ticks(-R, R, 4))
        _polyline(svg, fr, list(dp), dv, "#9e1f1f", "delta")
    return svg.write(out_path)
