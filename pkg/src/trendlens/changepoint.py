"""MOSUM change-point detection with pruning criteria and bootstrap intervals.

The statistic at time t contrasts the mean of the G points after t with the
mean of the G points before it, studentized by the windows' combined sample
standard deviation. Candidates are trace local maxima above an asymptotic
threshold, pruned so each exceeds the threshold on a neighborhood of width
epsilon*G and detections stay at least eta*G apart. Percentile bootstrap
intervals come from re-detecting on residual resamples of a local
two-segment mean fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .series import Month, SlopeSeries, add_months, format_month

VARIANCE_RULES = ("average", "min", "max")


@dataclass(frozen=True)
class MosumConfig:
    bandwidth: int
    eta: float = 12.0
    epsilon: float = 0.1
    alpha: float = 0.05
    variance_rule: str = "average"
    bootstrap_replicates: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.bandwidth < 2:
            raise ValueError("bandwidth must be at least 2")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.variance_rule not in VARIANCE_RULES:
            raise ValueError(f"variance_rule must be one of {VARIANCE_RULES}")
        if self.bootstrap_replicates < 0:
            raise ValueError("bootstrap_replicates must be nonnegative")


@dataclass(frozen=True)
class ChangePointReport:
    start_month: Month
    trace: np.ndarray  # nan at the undefined first/last G positions
    threshold: float
    change_points: list[int]
    intervals: list[tuple[int, int]]
    config: MosumConfig

    def change_point_months(self) -> list[Month]:
        return [add_months(self.start_month, k) for k in self.change_points]

    def interval_months(self) -> list[tuple[Month, Month]]:
        return [(add_months(self.start_month, a), add_months(self.start_month, b))
                for a, b in self.intervals]

    def to_json_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "trace": [None if math.isnan(v) else v for v in self.trace.tolist()],
            "change_points": [format_month(m) for m in self.change_point_months()],
            "intervals": [[format_month(a), format_month(b)]
                          for a, b in self.interval_months()],
            "config": {
                "bandwidth": self.config.bandwidth,
                "eta": self.config.eta,
                "epsilon": self.config.epsilon,
                "alpha": self.config.alpha,
                "variance_rule": self.config.variance_rule,
                "bootstrap_replicates": self.config.bootstrap_replicates,
                "seed": self.config.seed,
            },
        }


def _window_stats(values: np.ndarray, bandwidth: int):
    """Rolling window means and unbiased variances via cumulative sums."""
    g = bandwidth
    cs = np.concatenate([[0.0], np.cumsum(values)])
    cs2 = np.concatenate([[0.0], np.cumsum(values * values)])
    sums = cs[g:] - cs[:-g]
    sq = cs2[g:] - cs2[:-g]
    means = sums / g
    var = (sq - g * means * means) / (g - 1)
    return means, np.maximum(var, 0.0)


def _trace(values: np.ndarray, bandwidth: int, variance_rule: str) -> np.ndarray:
    n = len(values)
    g = bandwidth
    means, variances = _window_stats(values, g)
    # window starting at i covers values[i:i+g]
    prior_mean = means[:n - 2 * g + 1]
    after_mean = means[g:]
    prior_var = variances[:n - 2 * g + 1]
    after_var = variances[g:]
    if variance_rule == "average":
        combined = 0.5 * (prior_var + after_var)
    elif variance_rule == "min":
        combined = np.minimum(prior_var, after_var)
    else:
        combined = np.maximum(prior_var, after_var)
    sigma = np.sqrt(combined)
    numer = np.abs(after_mean - prior_mean)
    scale = sigma * math.sqrt(2.0 / g)
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = numer / scale
    stat[(scale == 0.0) & (numer == 0.0)] = 0.0
    stat[(scale == 0.0) & (numer > 0.0)] = np.inf

    trace = np.full(n, np.nan)
    trace[g:n - g + 1] = stat
    trace[n - g] = np.nan  # keep exactly G undefined points at each end
    return trace


def mosum_statistic(series: SlopeSeries, bandwidth: int,
                    variance_rule: str = "average") -> np.ndarray:
    """Trace of the studentized moving-sum contrast; nan where undefined."""
    if variance_rule not in VARIANCE_RULES:
        raise ValueError(f"variance_rule must be one of {VARIANCE_RULES}")
    if bandwidth < 2:
        raise ValueError("bandwidth must be at least 2")
    values = np.asarray(series.values, dtype=float)
    if len(values) <= 2 * bandwidth:
        raise ValueError("series must be longer than twice the bandwidth")
    return _trace(values, bandwidth, variance_rule)


def mosum_threshold(n: int, bandwidth: int, alpha: float) -> float:
    """Gumbel-type asymptotic critical value for the max of the trace.

    The ln ln argument is clamped at e so the constant stays finite for
    small n/G ratios where the asymptotic is vacuous anyway.
    """
    if not (n > 2 * bandwidth >= 2):
        raise ValueError("need n > 2*bandwidth >= 2")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    ratio = n / bandwidth
    a = math.sqrt(2.0 * math.log(ratio))
    b = (2.0 * math.log(ratio)
         + 0.5 * math.log(math.log(max(ratio, math.e)))
         + math.log(3.0 / (2.0 * math.sqrt(math.pi))))
    q = -math.log(math.log(1.0 / math.sqrt(1.0 - alpha)))
    return (b + q) / a


def _local_maxima_above(trace: np.ndarray, threshold: float) -> list[int]:
    v = np.where(np.isnan(trace), -np.inf, trace)
    out = []
    for t in range(len(v)):
        if not v[t] > threshold:
            continue
        left = v[t - 1] if t > 0 else -np.inf
        right = v[t + 1] if t + 1 < len(v) else -np.inf
        # plateaus resolve to their first index
        if v[t] > left and v[t] >= right:
            out.append(t)
    return out


def _epsilon_prune(trace: np.ndarray, candidates: list[int], threshold: float,
                   bandwidth: int, epsilon: float) -> list[int]:
    v = np.where(np.isnan(trace), -np.inf, trace)
    half = math.ceil((epsilon * bandwidth - 1.0) / 2.0)
    half = max(half, 0)
    kept = []
    for t in candidates:
        lo, hi = t - half, t + half
        if lo < 0 or hi >= len(v):
            continue
        if np.all(v[lo:hi + 1] > threshold):
            kept.append(t)
    return kept


def _eta_prune(trace: np.ndarray, candidates: list[int], bandwidth: int,
               eta: float) -> list[int]:
    spacing = eta * bandwidth
    ordered = sorted(candidates, key=lambda t: (-trace[t], t))
    kept: list[int] = []
    for t in ordered:
        if all(abs(t - u) >= spacing for u in kept):
            kept.append(t)
    return sorted(kept)


def _bootstrap_interval(values: np.ndarray, k: int, lo: int, hi: int,
                        config: MosumConfig) -> tuple[int, int]:
    """Percentile interval for one change-point via residual resampling.

    The stretch [lo, hi] around k is refit as two constant segments meeting
    at k; each replicate rebuilds it from resampled residuals and relocates
    the change-point at the argmax of the local trace.
    """
    g = config.bandwidth
    segment = values[lo:hi + 1]
    m = len(segment)
    split_at = k - lo
    fitted = np.empty(m)
    fitted[:split_at] = segment[:split_at].mean()
    fitted[split_at:] = segment[split_at:].mean()
    residuals = segment - fitted

    seed = config.seed % (2 ** 64)
    relocations = np.empty(config.bootstrap_replicates, dtype=int)
    for b in range(config.bootstrap_replicates):
        rng = np.random.default_rng(np.random.SeedSequence((seed, k, b)))
        resampled = fitted + residuals[rng.integers(0, m, size=m)]
        local = _trace(resampled, g, config.variance_rule)
        with np.errstate(invalid="ignore"):
            relocations[b] = lo + int(np.nanargmax(local))
    q_lo, q_hi = np.quantile(relocations,
                             [config.alpha / 2.0, 1.0 - config.alpha / 2.0])
    return min(int(math.floor(q_lo)), k), max(int(math.ceil(q_hi)), k)


def detect(series: SlopeSeries, config: MosumConfig) -> ChangePointReport:
    values = np.asarray(series.values, dtype=float)
    n = len(values)
    g = config.bandwidth
    trace = mosum_statistic(series, g, config.variance_rule)
    threshold = mosum_threshold(n, g, config.alpha)

    candidates = _local_maxima_above(trace, threshold)
    candidates = _epsilon_prune(trace, candidates, threshold, g, config.epsilon)
    points = _eta_prune(trace, candidates, g, config.eta)

    intervals: list[tuple[int, int]] = []
    if config.bootstrap_replicates > 0:
        for i, k in enumerate(points):
            left = points[i - 1] if i > 0 else 0
            right = points[i + 1] - 1 if i + 1 < len(points) else n - 1
            lo = max(0, min(left, k - g))
            hi = min(n - 1, max(right, k + g))
            intervals.append(_bootstrap_interval(values, k, lo, hi, config))
    else:
        intervals = [(k, k) for k in points]

    return ChangePointReport(
        start_month=series.start_month,
        trace=trace,
        threshold=threshold,
        change_points=points,
        intervals=intervals,
        config=config,
    )
