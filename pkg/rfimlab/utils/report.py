"""
Run artifacts: summary JSON, CSV tables and the SVG chart.

The chart plots log m_N against N with error bars and the fitted decay line
for origin-decay runs, and log median D_N against log N with the fitted
exponent for geodesic runs. Other experiments get tables only.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from rfimlab.exceptions import ParameterError, RecordIOError
from rfimlab.models import ExperimentKind, RunConfig, RunSummary
from rfimlab.templates.svg_template import (
    PALETTE,
    SVG_AXES,
    SVG_DOCUMENT,
    SVG_ERROR_BAR,
    SVG_FIT_LINE,
    SVG_LEGEND,
    SVG_POINT,
    SVG_TICK_X,
    SVG_TICK_Y,
)
from rfimlab.utils.records import RECORDS_FILE, read_records
from rfimlab.utils.registry import get_experiment

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
CSV_FILE = "summary.csv"
CHART_FILE = "chart.svg"
RUN_CONFIG_FILE = "run_config.json"

CSV_COLUMNS = ("N", "epsilon", "samples", "ties", "section", "name", "value", "stderr", "low", "high")

_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 170, 40, 50


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise RecordIOError(f"cannot write {path}: {e}") from e
    return path


def write_run_config(run: RunConfig, out_dir: Path) -> Path:
    return _write_text(Path(out_dir) / RUN_CONFIG_FILE, run.model_dump_json(indent=2) + "\n")


def write_summary(summary: RunSummary, out_dir: Path) -> Path:
    return _write_text(Path(out_dir) / SUMMARY_FILE, summary.model_dump_json(indent=2) + "\n")


def summary_rows(summary: RunSummary) -> List[List]:
    """Flatten every group statistic into one CSV row."""
    rows = []
    for g in summary.groups:
        head = [g.N, f"{g.epsilon:g}", g.samples, g.ties]
        for section, table in (("probability", g.probabilities), ("mean", g.means)):
            for name, est in table.items():
                rows.append(head + [section, name, est.value, est.stderr, est.low, est.high])
        for name, count in g.counts.items():
            rows.append(head + ["count", name, count, None, None, None])
        for name, value in g.values.items():
            rows.append(head + ["value", name, value, None, None, None])
    return rows


def write_csv(summary: RunSummary, out_dir: Path) -> Path:
    path = Path(out_dir) / CSV_FILE
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in summary_rows(summary):
                writer.writerow(["" if v is None else v for v in row])
    except OSError as e:
        raise RecordIOError(f"cannot write {path}: {e}") from e
    return path


class _Axes:
    """Linear map from data coordinates to the SVG plot area."""

    def __init__(self, xs: List[float], ys: List[float]):
        self.x_min, self.x_max = self._span(xs)
        self.y_min, self.y_max = self._span(ys)

    @staticmethod
    def _span(values: List[float]) -> Tuple[float, float]:
        low, high = min(values), max(values)
        pad = 0.05 * (high - low) if high > low else 0.5
        return low - pad, high + pad

    def x(self, value: float) -> float:
        return _LEFT + (value - self.x_min) / (self.x_max - self.x_min) * (_WIDTH - _LEFT - _RIGHT)

    def y(self, value: float) -> float:
        return _HEIGHT - _BOTTOM - (value - self.y_min) / (self.y_max - self.y_min) * (_HEIGHT - _TOP - _BOTTOM)

    def frame(self, x_label: str, y_label: str) -> List[str]:
        parts = [
            SVG_AXES.format(
                x0=_LEFT,
                y0=_HEIGHT - _BOTTOM,
                x1=_WIDTH - _RIGHT,
                y1=_TOP,
                x_label=x_label,
                x_label_x=(_LEFT + _WIDTH - _RIGHT) // 2,
                x_label_y=_HEIGHT - 10,
                y_label=y_label,
                y_label_y=(_TOP + _HEIGHT - _BOTTOM) // 2,
            )
        ]
        for i in range(5):
            xv = self.x_min + i * (self.x_max - self.x_min) / 4
            yv = self.y_min + i * (self.y_max - self.y_min) / 4
            parts.append(
                SVG_TICK_X.format(
                    x=f"{self.x(xv):.2f}", y=_HEIGHT - _BOTTOM, y_end=_HEIGHT - _BOTTOM + 5,
                    y_text=_HEIGHT - _BOTTOM + 18, label=f"{xv:.3g}",
                )
            )
            parts.append(
                SVG_TICK_Y.format(x=_LEFT, x_end=_LEFT - 5, x_text=_LEFT - 8, y=f"{self.y(yv):.2f}", label=f"{yv:.3g}")
            )
        return parts


# (x, y, y_low, y_high) per point, fitted (slope, intercept), legend text
Series = Tuple[List[Tuple[float, float, float, float]], Optional[Tuple[float, float]], str]


def _decay_series(summary: RunSummary) -> Dict[str, Series]:
    series = {}
    for key, fit in summary.decay.items():
        points = []
        for n, est in sorted(fit.estimates.items(), key=lambda kv: int(kv[0])):
            if not est.value:
                continue
            y = math.log(est.value)
            # delta method on log p
            spread = (est.stderr or 0.0) / est.value
            points.append((float(n), y, y - spread, y + spread))
        line = None
        if fit.rate is not None and fit.intercept is not None:
            line = (-fit.rate.value, fit.intercept)
            label = f"eps={key} c={fit.rate.value:.3g}"
        else:
            label = f"eps={key}"
        if points:
            series[key] = (points, line, label)
    return series


def _geodesic_series(summary: RunSummary) -> Dict[str, Series]:
    series = {}
    for key, exp in summary.exponent.items():
        points = []
        for n, qs in sorted(exp.quantiles.items(), key=lambda kv: int(kv[0])):
            lx = math.log(float(n))
            points.append((lx, math.log(qs["0.5"]), math.log(qs["0.25"]), math.log(qs["0.75"])))
        line = None
        label = f"eps={key}"
        if exp.alpha_hat is not None and points:
            mx = sum(p[0] for p in points) / len(points)
            my = sum(p[1] for p in points) / len(points)
            line = (exp.alpha_hat, my - exp.alpha_hat * mx)
            label = f"eps={key} alpha={exp.alpha_hat:.3g}"
        if points:
            series[key] = (points, line, label)
    return series


def render_chart(summary: RunSummary) -> Optional[str]:
    """SVG document for decay and geodesic runs, ``None`` for other kinds."""
    if summary.kind is ExperimentKind.MN:
        series = _decay_series(summary)
        title, x_label, y_label = "origin zero-label probability", "N", "log m_N"
    elif summary.kind is ExperimentKind.GEODESIC:
        series = _geodesic_series(summary)
        title, x_label, y_label = "geodesic length", "log N", "log median D_N"
    else:
        return None
    if not series:
        logger.warning("nothing to plot for %s", summary.kind.value)
        return None

    xs = [p[0] for pts, _, _ in series.values() for p in pts]
    ys = [v for pts, _, _ in series.values() for p in pts for v in p[1:]]
    axes = _Axes(xs, ys)
    body = axes.frame(x_label, y_label)
    for i, (points, line, label) in enumerate(series.values()):
        color = PALETTE[i % len(PALETTE)]
        for x, y, low, high in points:
            body.append(SVG_ERROR_BAR.format(x=axes.x(x), y_low=axes.y(low), y_high=axes.y(high), color=color))
            body.append(SVG_POINT.format(x=axes.x(x), y=axes.y(y), color=color))
        if line is not None:
            slope, intercept = line
            x1, x2 = min(p[0] for p in points), max(p[0] for p in points)
            body.append(
                SVG_FIT_LINE.format(
                    x1=axes.x(x1), y1=axes.y(intercept + slope * x1),
                    x2=axes.x(x2), y2=axes.y(intercept + slope * x2), color=color,
                )
            )
        body.append(SVG_LEGEND.format(x=_WIDTH - _RIGHT + 10, y=_TOP + 16 * (i + 1), color=color, text=label))
    return SVG_DOCUMENT.format(
        width=_WIDTH, height=_HEIGHT, title_x=_WIDTH // 2, title=title, body="\n".join(body)
    )


def write_report(summary: RunSummary, out_dir: Path) -> List[Path]:
    """Write the CSV table and, where it applies, the chart."""
    paths = [write_csv(summary, out_dir)]
    svg = render_chart(summary)
    if svg is not None:
        paths.append(_write_text(Path(out_dir) / CHART_FILE, svg))
    return paths


def load_run_config(out_dir: Path) -> RunConfig:
    path = Path(out_dir) / RUN_CONFIG_FILE
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise RecordIOError(f"cannot read {path}: {e}") from e
    try:
        return RunConfig.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ParameterError(f"{path} is not valid JSON: {e}") from e


def rebuild_summary(out_dir: Path) -> RunSummary:
    """Recompute the summary of a finished run from its stored config and records."""
    run = load_run_config(out_dir)
    records = read_records(Path(out_dir) / RECORDS_FILE)
    logger.info("rebuilding %s summary from %d records", run.kind.value, len(records))
    return get_experiment(run).summarize(records)
