"""
Plotter
Static SVG figures: the four-panel STL decomposition and the forecast overlay
"""

import logging
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fire-forecast"

import matplotlib.pyplot as plt  # noqa: E402

from models.data_models import DecomposedSeries, ForecastResult, TimeSeries  # noqa: E402

logger = logging.getLogger(__name__)

HORIZON_STYLES = {1: ("tab:blue", "h = 1"), 2: ("tab:red", "h = 2")}


def _save(figure, path: Path) -> Path:
    figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    logger.debug(f"Сохранён график: {path}")
    return path


def plot_decomposition(parts: DecomposedSeries, path: Path) -> Path:
    """Observed, seasonal, trend and remainder on stacked panels with a shared time axis"""
    panels = [("observed", parts.observed), ("seasonal", parts.seasonal),
              ("trend", parts.trend), ("remainder", parts.remainder)]
    panels = [(label, series) for label, series in panels if series is not None]
    figure, axes = plt.subplots(len(panels), 1, figsize=(10, 2.2 * len(panels)), sharex=True)
    dates = parts.seasonal.months.to_timestamp()
    for axis, (label, series) in zip(axes, panels):
        axis.plot(dates, series.values, color="black", linewidth=0.9)
        axis.set_ylabel(label)
        axis.grid(alpha=0.3)
    axes[0].set_title("STL decomposition")
    axes[-1].set_xlabel("month")
    figure.tight_layout()
    return _save(figure, path)


def plot_forecasts(series: TimeSeries, results: Mapping[int, ForecastResult], path: Path) -> Path:
    """Observed series with dotted forecasts per horizon and a train/test marker"""
    figure, axis = plt.subplots(figsize=(11, 4.5))
    axis.plot(series.months.to_timestamp(), series.values, color="black", linewidth=1.0,
              label="observed")
    test_start = None
    for horizon, result in sorted(results.items()):
        color, label = HORIZON_STYLES.get(horizon, ("tab:gray", f"h = {horizon}"))
        axis.plot(result.months.to_timestamp(), result.recomposed, linestyle=":",
                  color=color, linewidth=1.4, label=f"{result.name} {label}")
        test_start = result.test_start if test_start is None else test_start
    if test_start is not None and test_start < len(series):
        axis.axvline(series.month_at(test_start).to_timestamp(), color="gray",
                     linestyle="--", linewidth=0.8, label="train / test")
    axis.set_xlabel("month")
    axis.set_ylabel(series.name)
    axis.grid(alpha=0.3)
    axis.legend(loc="upper right", fontsize="small")
    figure.tight_layout()
    return _save(figure, path)
