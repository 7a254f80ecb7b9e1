"""Seasonal-trend decomposition by iterated loess on monthly series.

The inner loop detrends, smooths each cycle-subseries (all Januaries, all
Februaries, ...), removes the low-frequency leakage of the reassembled
seasonal with a moving-average cascade plus loess, deseasonalizes, and
re-estimates the trend. An optional outer loop derives bisquare robustness
weights from the remainder and repeats the inner loop with them.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .loess import loess
from .series import MonthlySeries, format_month

PERIODIC = "periodic"
AUTO = "auto"


def next_odd(x: float) -> int:
    """Smallest odd integer >= x."""
    n = math.ceil(x)
    return n if n % 2 == 1 else n + 1


def auto_trend_window(period: int, seasonal_window) -> int:
    """Trend window rule: NextOdd(Ceiling(1.5*period / (1 - 1.5/s))).

    The periodic seasonal setting acts as s -> infinity, collapsing the
    denominator to 1.
    """
    if period < 2:
        raise ValueError("period must be at least 2")
    if seasonal_window == PERIODIC:
        denom = 1.0
    else:
        s = float(seasonal_window)
        if s <= 1.5:
            raise ValueError("integer seasonal window must exceed 1.5")
        denom = 1.0 - 1.5 / s
    return next_odd(math.ceil(1.5 * period / denom))


def _check_odd_window(name: str, value) -> None:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an odd integer, got {value!r}")
    if value < 3 or value % 2 == 0:
        raise ValueError(f"{name} must be odd and >= 3, got {value}")


@dataclass(frozen=True)
class StlConfig:
    period: int = 12
    seasonal_window: int | str = PERIODIC
    trend_window: int | str = AUTO
    lowpass_window: int | None = None  # None -> next_odd(period)
    inner_iterations: int = 2
    outer_iterations: int = 0

    def __post_init__(self):
        if self.period < 2:
            raise ValueError("period must be at least 2")
        if self.seasonal_window != PERIODIC:
            _check_odd_window("seasonal_window", self.seasonal_window)
        if self.trend_window != AUTO:
            _check_odd_window("trend_window", self.trend_window)
        if self.lowpass_window is not None:
            _check_odd_window("lowpass_window", self.lowpass_window)
        if self.inner_iterations < 0 or self.outer_iterations < 0:
            raise ValueError("iteration counts must be nonnegative")

    def resolved_trend_window(self) -> int:
        if self.trend_window == AUTO:
            return auto_trend_window(self.period, self.seasonal_window)
        return int(self.trend_window)

    def resolved_lowpass_window(self) -> int:
        if self.lowpass_window is None:
            return next_odd(self.period)
        return int(self.lowpass_window)


@dataclass(frozen=True)
class Decomposition:
    trend: MonthlySeries
    seasonal: MonthlySeries
    remainder: MonthlySeries
    robustness_weights: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["month", "trend", "seasonal", "remainder"])
        for i in range(len(self.trend)):
            writer.writerow([
                format_month(self.trend.month_at(i)),
                repr(float(self.trend.values[i])),
                repr(float(self.seasonal.values[i])),
                repr(float(self.remainder.values[i])),
            ])
        return buf.getvalue()


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    return np.convolve(x, np.full(width, 1.0 / width), mode="valid")


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    total = weights.sum()
    if total <= 0:
        return float(values.mean())
    return float(np.dot(weights, values) / total)


def _bisquare_weights(residuals: np.ndarray) -> np.ndarray:
    h = 6.0 * float(np.median(np.abs(residuals)))
    if h == 0.0:
        return np.ones_like(residuals)
    u = np.abs(residuals) / h
    w = np.zeros_like(residuals)
    inside = u < 1.0
    w[inside] = (1.0 - u[inside] ** 2) ** 2
    return w


def stl_decompose(series: MonthlySeries, config: StlConfig) -> Decomposition:
    """Additive decomposition Y = T + S + R."""
    y = series.values
    n = len(y)
    period = config.period
    if n < 2 * period:
        raise ValueError("series must span at least two full periods")

    trend_w = config.resolved_trend_window()
    lowpass_w = config.resolved_lowpass_window()
    periodic = config.seasonal_window == PERIODIC
    grid = np.arange(n, dtype=float)

    trend = np.zeros(n)
    seasonal = np.zeros(n)
    rho = np.ones(n)

    for outer in range(config.outer_iterations + 1):
        for _ in range(config.inner_iterations):
            detrended = y - trend
            # Smooth each cycle-subseries, evaluated one period beyond both
            # ends so the low-pass cascade can trim back to the data span.
            extended = np.empty(n + 2 * period)
            for m in range(period):
                src = np.arange(m, n, period)
                n_y = len(src)
                queries = np.arange(-1, n_y + 1, dtype=float)
                if periodic:
                    value = _weighted_mean(detrended[src], rho[src])
                    fitted = np.full(len(queries), value)
                else:
                    fitted = loess(np.arange(n_y, dtype=float), detrended[src],
                                   queries, int(config.seasonal_window), 1,
                                   rho[src])
                positions = m + np.arange(-1, n_y + 1) * period + period
                extended[positions] = fitted
            lowfreq = _moving_average(
                _moving_average(_moving_average(extended, period), period), 3)
            lowpass = loess(grid, lowfreq, grid, lowpass_w, 1)
            seasonal = extended[period:period + n] - lowpass
            trend = loess(grid, y - seasonal, grid, trend_w, 1, rho)
        remainder = y - trend - seasonal
        if outer < config.outer_iterations:
            rho = _bisquare_weights(remainder)

    start = series.start_month
    return Decomposition(
        trend=MonthlySeries(start, trend, series.label),
        seasonal=MonthlySeries(start, seasonal, series.label),
        remainder=MonthlySeries(start, remainder, series.label),
        robustness_weights=rho,
    )
