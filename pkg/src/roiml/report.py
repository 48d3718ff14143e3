"""Artifact emission: curve CSVs, SVG charts, markdown summaries.

Every emitter is deterministic: identical inputs produce identical
bytes, with LF line endings and UTF-8 throughout. Charts are plain
SVG 1.1 built by hand; no drawing library, no timestamps, no randomness.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Mapping, Sequence
from xml.sax.saxutils import escape

from . import roi as roi_mod
from .classify import ConfusionMatrix
from .corpus import _as_text_stream
from .errors import ChartError, ParseError, ReportError, SchemaError
from .harness import CurvePoint, DecisionSummary, LearningCurve
from .roi import APPLICABLE_COST_FIELDS, CostParameters

CURVE_CSV_HEADER = (
    "fraction", "n_train", "n_test", "tp", "fp", "fn", "tn",
    "precision", "recall", "f1", "cost_usd", "penalty_usd", "benefit_usd", "roi",
)


def format_number(x: float | int) -> str:
    """Render a number with at most 6 decimal places, no trailing zeros."""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if not math.isfinite(x):
        raise ReportError(f"cannot render non-finite number {x!r}")
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    if s in ("", "-0"):
        return "0"
    return s


def emit_curve_csv(curve: LearningCurve) -> bytes:
    """Serialize a curve to its CSV schema. Byte-deterministic."""
    if not curve.points:
        raise ReportError("cannot serialize an empty curve")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_CSV_HEADER)
    for p in curve.points:
        writer.writerow(
            [
                format_number(p.fraction),
                str(p.n_train),
                str(p.n_test),
                str(p.cm.tp),
                str(p.cm.fp),
                str(p.cm.fn),
                str(p.cm.tn),
                format_number(p.cm.precision()),
                format_number(p.cm.recall()),
                format_number(p.f1),
                format_number(p.econ.cost_usd),
                format_number(p.econ.penalty_usd),
                format_number(p.econ.benefit_usd),
                format_number(p.econ.roi),
            ]
        )
    return buf.getvalue().encode("utf-8")


@dataclass(frozen=True)
class CurveRow:
    """One parsed curve-CSV row."""

    fraction: float
    n_train: int
    n_test: int
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    cost_usd: float
    penalty_usd: float
    benefit_usd: float
    roi: float


def parse_curve_csv(data: bytes | str | IO) -> list[CurveRow]:
    """Parse a curve CSV; header must match the schema exactly."""
    reader = csv.reader(_as_text_stream(data), strict=True)
    try:
        header = next(reader, None)
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    if header is None:
        raise SchemaError("curve CSV has no header row")
    if tuple(header) != CURVE_CSV_HEADER:
        raise SchemaError(
            f"curve CSV header must be {','.join(CURVE_CSV_HEADER)}, "
            f"got {','.join(header)}"
        )
    rows: list[CurveRow] = []
    try:
        for row in reader:
            line = reader.line_num
            if len(row) != len(CURVE_CSV_HEADER):
                raise ParseError(
                    f"line {line}: expected {len(CURVE_CSV_HEADER)} fields, "
                    f"got {len(row)}"
                )
            try:
                rows.append(
                    CurveRow(
                        fraction=float(row[0]),
                        n_train=int(row[1]),
                        n_test=int(row[2]),
                        tp=int(row[3]),
                        fp=int(row[4]),
                        fn=int(row[5]),
                        tn=int(row[6]),
                        precision=float(row[7]),
                        recall=float(row[8]),
                        f1=float(row[9]),
                        cost_usd=float(row[10]),
                        penalty_usd=float(row[11]),
                        benefit_usd=float(row[12]),
                        roi=float(row[13]),
                    )
                )
            except ValueError as exc:
                raise ParseError(f"line {line}: {exc}") from exc
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    for a, b in zip(rows, rows[1:]):
        if not a.fraction < b.fraction:
            raise ParseError(
                f"curve CSV fractions must be strictly ascending, got "
                f"{a.fraction:g} before {b.fraction:g}"
            )
    return rows


def curve_from_rows(
    label: str,
    rows: Sequence[CurveRow],
    params: CostParameters,
    applicable: tuple[str, ...] = APPLICABLE_COST_FIELDS,
) -> LearningCurve:
    """Rebuild a curve from parsed CSV rows for downstream decisions.

    F1 and economics are recomputed from the stored confusion matrices
    (with n = n_train + n_test) so the rebuilt curve is internally exact
    rather than limited to the CSV's printed precision.
    """
    if not rows:
        raise ReportError("cannot rebuild a curve from zero rows")
    points = []
    for r in rows:
        cm = ConfusionMatrix(r.tp, r.fp, r.fn, r.tn)
        f1 = roi_mod.f1_score(cm)
        econ = roi_mod.economic_outcome(r.n_train + r.n_test, cm, params, applicable)
        points.append(CurvePoint(r.fraction, r.n_train, r.n_test, cm, f1, econ))
    return LearningCurve(
        label,
        tuple(points),
        seed=0,
        parameters=params,
        metadata={"rebuilt_from_csv": True, "applicable_cost_fields": applicable},
    )


# --- charts -----------------------------------------------------------------

_PALETTE = ("#1f6fb4", "#d1495b", "#2e8b57", "#8a5bd4", "#c98a00", "#4a4a4a")

_WIDTH = 800
_HEIGHT = 500
_X0, _X1 = 70.0, 730.0
_Y0, _Y1 = 50.0, 440.0  # top, bottom of the plot area
_PAD = 0.05


@dataclass(frozen=True)
class AxisSpec:
    label: str
    unit: str = ""

    @property
    def title(self) -> str:
        return f"{self.label} ({self.unit})" if self.unit else self.label


@dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[float, float], ...]
    axis: str = "left"

    def __post_init__(self) -> None:
        if self.axis not in ("left", "right"):
            raise ChartError(f"series axis must be left or right, got {self.axis!r}")
        if not self.points:
            raise ChartError(f"series {self.label!r} has no points")
        xs = [p[0] for p in self.points]
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ChartError(
                    f"series {self.label!r}: x values must be strictly ascending"
                )
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ChartError(f"series {self.label!r} contains non-finite points")


@dataclass(frozen=True)
class ChartSpec:
    title: str
    x_axis: AxisSpec
    y_axis: AxisSpec
    series: tuple[Series, ...]
    y2_axis: AxisSpec | None = None

    def __post_init__(self) -> None:
        if not self.series:
            raise ChartError("chart needs at least one series")
        if self.y2_axis is None and any(s.axis == "right" for s in self.series):
            raise ChartError("right-axis series given but no right axis defined")


def _padded(lo: float, hi: float) -> tuple[float, float]:
    span = hi - lo
    pad = span * _PAD if span > 0 else max(abs(lo), 1.0) * _PAD
    return lo - pad, hi + pad


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    raw = (hi - lo) / max(target - 1, 1)
    if raw <= 0:
        return [lo]
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt_tick(t: float) -> str:
    r = round(t, 10)
    if r == int(r):
        return str(int(r))
    return f"{r:g}"


def render_chart(spec: ChartSpec) -> str:
    """Hand-built SVG 1.1: axes, ticks, gridlines, legend, one polyline
    plus point markers per series. Same spec, same bytes."""
    left_pts = [p for s in spec.series if s.axis == "left" for p in s.points]
    right_pts = [p for s in spec.series if s.axis == "right" for p in s.points]
    all_x = [p[0] for s in spec.series for p in s.points]
    xmin, xmax = _padded(min(all_x), max(all_x))

    def x_to_px(x: float) -> float:
        return _X0 + (x - xmin) / (xmax - xmin) * (_X1 - _X0)

    def y_scale(points: list[tuple[float, float]]):
        ys = [p[1] for p in points]
        ymin, ymax = _padded(min(ys), max(ys))

        def to_px(y: float) -> float:
            return _Y1 - (y - ymin) / (ymax - ymin) * (_Y1 - _Y0)

        return ymin, ymax, to_px

    ly_min, ly_max, ly_px = y_scale(left_pts) if left_pts else (0.0, 1.0, None)
    ry_min, ry_max, ry_px = y_scale(right_pts) if right_pts else (0.0, 1.0, None)

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>')
    out.append(
        f'<text x="{_WIDTH / 2:g}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15" font-weight="bold">'
        f"{escape(spec.title)}</text>"
    )

    # gridlines and left ticks
    if ly_px is not None:
        for t in _nice_ticks(ly_min, ly_max):
            py = ly_px(t)
            out.append(
                f'<line x1="{_X0:.2f}" y1="{py:.2f}" x2="{_X1:.2f}" y2="{py:.2f}" '
                f'stroke="#dddddd" stroke-width="1"/>'
            )
            out.append(
                f'<line x1="{_X0 - 5:.2f}" y1="{py:.2f}" x2="{_X0:.2f}" y2="{py:.2f}" '
                f'stroke="#333333" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{_X0 - 8:.2f}" y="{py + 4:.2f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
            )
    if ry_px is not None:
        for t in _nice_ticks(ry_min, ry_max):
            py = ry_px(t)
            out.append(
                f'<line x1="{_X1:.2f}" y1="{py:.2f}" x2="{_X1 + 5:.2f}" y2="{py:.2f}" '
                f'stroke="#333333" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{_X1 + 8:.2f}" y="{py + 4:.2f}" text-anchor="start" '
                f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
            )
    for t in _nice_ticks(xmin, xmax):
        px = x_to_px(t)
        out.append(
            f'<line x1="{px:.2f}" y1="{_Y1:.2f}" x2="{px:.2f}" y2="{_Y1 + 5:.2f}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{_Y1 + 18:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
        )

    # plot frame and axis titles
    out.append(
        f'<rect x="{_X0:.2f}" y="{_Y0:.2f}" width="{_X1 - _X0:.2f}" '
        f'height="{_Y1 - _Y0:.2f}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    out.append(
        f'<text x="{(_X0 + _X1) / 2:.2f}" y="{_HEIGHT - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(spec.x_axis.title)}</text>'
    )
    mid_y = (_Y0 + _Y1) / 2
    out.append(
        f'<text x="18" y="{mid_y:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {mid_y:.2f})">{escape(spec.y_axis.title)}</text>'
    )
    if spec.y2_axis is not None:
        out.append(
            f'<text x="{_WIDTH - 14}" y="{mid_y:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(90 {_WIDTH - 14} {mid_y:.2f})">'
            f"{escape(spec.y2_axis.title)}</text>"
        )

    # series
    for i, s in enumerate(spec.series):
        color = _PALETTE[i % len(_PALETTE)]
        to_py = ly_px if s.axis == "left" else ry_px
        assert to_py is not None
        coords = [(x_to_px(x), to_py(y)) for x, y in s.points]
        dash = ' stroke-dasharray="6 3"' if s.axis == "right" else ""
        if len(coords) >= 2:
            pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in coords)
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="2"{dash}/>'
            )
        for px, py in coords:
            out.append(
                f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="{color}"/>'
            )

    # legend, top-right inside the plot
    legend_w = max(len(s.label) for s in spec.series) * 7 + 40
    lx = _X1 - legend_w - 6
    ly = _Y0 + 8
    out.append(
        f'<rect x="{lx:.2f}" y="{ly:.2f}" width="{legend_w}" '
        f'height="{len(spec.series) * 18 + 6}" fill="#ffffff" '
        f'stroke="#999999" stroke-width="1"/>'
    )
    for i, s in enumerate(spec.series):
        color = _PALETTE[i % len(_PALETTE)]
        ey = ly + 14 + i * 18
        dash = ' stroke-dasharray="6 3"' if s.axis == "right" else ""
        out.append(
            f'<line x1="{lx + 6:.2f}" y1="{ey - 4:.2f}" x2="{lx + 26:.2f}" '
            f'y2="{ey - 4:.2f}" stroke="{color}" stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{lx + 32:.2f}" y="{ey:.2f}" font-family="sans-serif" '
            f'font-size="12">{escape(s.label)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def metric_chart(
    curves: Sequence[LearningCurve], metric: str, title: str | None = None
) -> ChartSpec:
    """Overlay one metric for several curves on a shared fraction axis."""
    if not curves:
        raise ChartError("no curves to chart")
    axis_label = "F1" if metric == "f1" else "ROI"
    unit = "" if metric == "f1" else "ratio"
    series = tuple(
        Series(
            c.technique_label,
            tuple(zip(c.fractions, c.metric_series(metric))),
        )
        for c in curves
    )
    return ChartSpec(
        title or f"{axis_label} by training fraction",
        AxisSpec("training fraction"),
        AxisSpec(axis_label, unit),
        series,
    )


def bi_criterion_chart(curve: LearningCurve, title: str | None = None) -> ChartSpec:
    """F1 on the left axis and ROI on the right, for one technique."""
    f1_series = Series(
        f"{curve.technique_label} F1",
        tuple(zip(curve.fractions, curve.metric_series("f1"))),
        axis="left",
    )
    roi_series = Series(
        f"{curve.technique_label} ROI",
        tuple(zip(curve.fractions, curve.metric_series("roi"))),
        axis="right",
    )
    return ChartSpec(
        title or f"{curve.technique_label}: accuracy vs return",
        AxisSpec("training fraction"),
        AxisSpec("F1"),
        (f1_series, roi_series),
        y2_axis=AxisSpec("ROI", "ratio"),
    )


# --- markdown summary ---------------------------------------------------------


def _fmt_fraction_or_none(value: float | None) -> str:
    return "none" if value is None else format_number(value)


def emit_summary(
    curves: Sequence[LearningCurve],
    summaries: Sequence[DecisionSummary],
    scenarios: Mapping[str, DecisionSummary] | None = None,
    artifacts: Mapping[str, str] | None = None,
) -> str:
    """CommonMark run summary: ranking table, per-curve detail, scenarios.

    Summaries are ranked by max ROI, best first. Every number also
    appears in (or is derivable from) the curve CSVs.
    """
    if not curves or not summaries:
        raise ReportError("summary needs at least one curve and one summary")
    by_label = {c.technique_label: c for c in curves}
    ranked = sorted(summaries, key=lambda s: (-s.max_roi, s.technique_label))

    lines: list[str] = []
    lines.append("# Classifier economics summary")
    lines.append("")
    any_rival = any(s.rival_label for s in ranked)
    header = (
        "| Technique | Max ROI | At fraction | F1 at max ROI | "
        "Break-even (grid) | Break-even (interp.) |"
    )
    rule = "| --- | --- | --- | --- | --- | --- |"
    if any_rival:
        header += " Crossovers (ROI) |"
        rule += " --- |"
    lines.append(header)
    lines.append(rule)
    for s in ranked:
        be_grid = "none" if s.break_even is None else format_number(s.break_even.grid_fraction)
        be_interp = (
            "none"
            if s.break_even is None
            else format_number(s.break_even.interpolated_fraction)
        )
        row = (
            f"| {s.technique_label} | {format_number(s.max_roi)} | "
            f"{format_number(s.max_roi_fraction)} | {format_number(s.f1_at_max_roi)} | "
            f"{be_grid} | {be_interp} |"
        )
        if any_rival:
            if s.rival_label is None or s.crossovers_roi is None:
                row += " none |"
            else:
                cross = (
                    ", ".join(format_number(f) for f in s.crossovers_roi)
                    if s.crossovers_roi
                    else "none"
                )
                row += f" {cross} (vs {s.rival_label}) |"
        lines.append(row)
    lines.append("")

    for s in ranked:
        curve = by_label.get(s.technique_label)
        if curve is None:
            continue
        last = curve.points[-1]
        lines.append(f"## {s.technique_label}")
        lines.append("")
        lines.append(
            f"- {len(curve.points)} points, fractions "
            f"{format_number(curve.points[0].fraction)} to "
            f"{format_number(last.fraction)}"
        )
        lines.append(
            f"- at the largest fraction: F1 {format_number(last.f1)}, "
            f"ROI {format_number(last.econ.roi)}, "
            f"cost {format_number(last.econ.cost_usd)} USD"
        )
        lines.append(
            f"- diminishing returns: F1 at "
            f"{_fmt_fraction_or_none(s.diminishing_returns_f1)}, "
            f"ROI at {_fmt_fraction_or_none(s.diminishing_returns_roi)}"
        )
        if s.rival_label is not None:
            f1_cross = (
                ", ".join(format_number(f) for f in (s.crossovers_f1 or ()))
                or "none"
            )
            roi_cross = (
                ", ".join(format_number(f) for f in (s.crossovers_roi or ()))
                or "none"
            )
            lines.append(
                f"- vs {s.rival_label}: F1 crossovers {f1_cross}; "
                f"ROI crossovers {roi_cross}"
            )
        lines.append("")

    if scenarios:
        lines.append("## Scenario analysis")
        lines.append("")
        lines.append("| Scenario | Max ROI | At fraction | Break-even (grid) |")
        lines.append("| --- | --- | --- | --- |")
        for name, s in scenarios.items():
            be = "none" if s.break_even is None else format_number(s.break_even.grid_fraction)
            lines.append(
                f"| {name} | {format_number(s.max_roi)} | "
                f"{format_number(s.max_roi_fraction)} | {be} |"
            )
        lines.append("")

    if artifacts:
        lines.append("## Artifacts")
        lines.append("")
        for name, path in artifacts.items():
            lines.append(f"- [{name}]({path})")
        lines.append("")

    return "\n".join(lines)
