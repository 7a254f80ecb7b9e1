"""Continuous piecewise-linear regression with estimated breakpoints.

The iterative fitter linearizes the kink positions: alongside the ramp
columns (t - psi_k)+ it adds step columns -1{t > psi_k}, solves ordinary
least squares, and moves each breakpoint by gamma_k / delta_k. Steps that
would raise the residual sum of squares are halved (up to ten times), chains
whose kink flattens out restart from jittered initials, and the best chain
by rss wins. An exhaustive grid fitter provides an independent optimum for
bounding the iterative one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .errors import NumericalError
from .inference import student_t_quantile
from .series import Month, MonthlySeries, add_months, format_month

_FLAT_KINK = 1e-12
_MAX_HALVINGS = 10


@dataclass(frozen=True)
class SegregConfig:
    n_breakpoints: int = 2
    initial_breakpoints: tuple[float, ...] | None = None
    max_iterations: int = 50
    tolerance: float = 1e-6
    restarts: int = 10
    jitter_months: float = 6.0
    seed: int = 0

    def __post_init__(self):
        if self.n_breakpoints < 1:
            raise ValueError("need at least one breakpoint")
        if self.initial_breakpoints is not None:
            object.__setattr__(self, "initial_breakpoints",
                               tuple(float(v) for v in self.initial_breakpoints))
            if len(self.initial_breakpoints) != self.n_breakpoints:
                raise ValueError("one initial guess per breakpoint required")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        if self.jitter_months < 0:
            raise ValueError("jitter_months must be nonnegative")


@dataclass(frozen=True)
class SegmentedFit:
    intercept: float
    slope: float
    slope_increments: tuple[float, ...]
    breakpoints: tuple[float, ...]  # fractional month offsets from start
    breakpoint_se: tuple[float, ...]
    breakpoint_intervals: tuple[tuple[float, float], ...]
    rss: float
    converged: bool
    iterations: int
    start_month: Month
    n_points: int

    def predict(self, at) -> np.ndarray:
        t = np.asarray(at, dtype=float)
        out = self.intercept + self.slope * t
        for psi, inc in zip(self.breakpoints, self.slope_increments):
            out = out + inc * np.maximum(t - psi, 0.0)
        return out

    def breakpoint_months(self) -> list[Month]:
        return [add_months(self.start_month, int(math.floor(psi + 0.5)))
                for psi in self.breakpoints]

    def interval_months(self) -> list[tuple[Month, Month]]:
        out = []
        for lo, hi in self.breakpoint_intervals:
            lo_m = add_months(self.start_month, int(math.floor(lo + 0.5)))
            hi_m = add_months(self.start_month, int(math.floor(hi + 0.5)))
            out.append((lo_m, hi_m))
        return out

    def to_json_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "slope": self.slope,
            "slope_increments": list(self.slope_increments),
            "breakpoints": list(self.breakpoints),
            "breakpoint_months": [format_month(m) for m in self.breakpoint_months()],
            "breakpoint_se": list(self.breakpoint_se),
            "breakpoint_intervals": [list(iv) for iv in self.breakpoint_intervals],
            "interval_months": [[format_month(a), format_month(b)]
                                for a, b in self.interval_months()],
            "rss": self.rss,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _ramp_design(t: np.ndarray, psi: np.ndarray) -> np.ndarray:
    cols = [np.ones_like(t), t]
    cols.extend(np.maximum(t - p, 0.0) for p in psi)
    return np.column_stack(cols)


def _continuous_fit(t: np.ndarray, y: np.ndarray, psi: np.ndarray):
    design = _ramp_design(t, psi)
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    return float(resid @ resid), beta


def _full_design(t: np.ndarray, psi: np.ndarray) -> np.ndarray:
    cols = [np.ones_like(t), t]
    cols.extend(np.maximum(t - p, 0.0) for p in psi)
    cols.extend(-(t > p).astype(float) for p in psi)
    return np.column_stack(cols)


def _order_interior(psi: np.ndarray, lo: float, hi: float) -> np.ndarray:
    out = np.sort(np.clip(psi, lo, hi))
    for i in range(1, len(out)):
        if out[i] - out[i - 1] < 1e-6:
            out[i] = out[i - 1] + 1e-6
    return np.clip(out, lo, hi)


def _run_chain(t, y, start_psi, config):
    k = config.n_breakpoints
    lo, hi = t[0] + 1e-6, t[-1] - 1e-6
    psi = _order_interior(np.asarray(start_psi, dtype=float), lo, hi)
    rss_cur, _ = _continuous_fit(t, y, psi)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        design = _full_design(t, psi)
        beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        delta = beta[2:2 + k]
        gamma = beta[2 + k:2 + 2 * k]
        if np.any(np.abs(delta) < _FLAT_KINK):
            return None  # flat kink, let a jittered restart take over
        step = gamma / delta
        scale = 1.0
        accepted = None
        for _ in range(_MAX_HALVINGS + 1):
            cand = _order_interior(psi + scale * step, lo, hi)
            rss_new, _ = _continuous_fit(t, y, cand)
            if rss_new <= rss_cur:
                accepted = (cand, rss_new)
                break
            scale *= 0.5
        if accepted is None:
            converged = True  # no descent direction left
            break
        cand, rss_new = accepted
        movement = float(np.max(np.abs(cand - psi)))
        psi, rss_cur = cand, rss_new
        if movement < config.tolerance:
            converged = True
            break
    return psi, rss_cur, converged, iterations


def _assemble_fit(t, y, psi, rss, converged, iterations, series):
    n = len(t)
    k = len(psi)
    _, beta_cont = _continuous_fit(t, y, psi)
    design = _full_design(t, psi)
    beta_full, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta_full
    p = 2 + 2 * k
    dof = n - p
    sigma2 = float(resid @ resid) / dof if dof > 0 else float("nan")
    cov = sigma2 * np.linalg.pinv(design.T @ design)
    delta = beta_full[2:2 + k]
    se_gamma = np.sqrt(np.maximum(np.diag(cov)[2 + k:2 + 2 * k], 0.0))
    with np.errstate(divide="ignore"):
        se_psi = np.where(np.abs(delta) > 0, se_gamma / np.abs(delta), np.inf)
    t_q = student_t_quantile(0.975, dof) if dof > 0 else float("nan")
    intervals = tuple((float(ps - t_q * se), float(ps + t_q * se))
                      for ps, se in zip(psi, se_psi))
    return SegmentedFit(
        intercept=float(beta_cont[0]),
        slope=float(beta_cont[1]),
        slope_increments=tuple(float(b) for b in beta_cont[2:2 + k]),
        breakpoints=tuple(float(ps) for ps in psi),
        breakpoint_se=tuple(float(se) for se in se_psi),
        breakpoint_intervals=intervals,
        rss=float(rss),
        converged=bool(converged),
        iterations=int(iterations),
        start_month=series.start_month,
        n_points=n,
    )


def _initial_guesses(t: np.ndarray, config: SegregConfig) -> np.ndarray:
    if config.initial_breakpoints is not None:
        return np.asarray(config.initial_breakpoints, dtype=float)
    k = config.n_breakpoints
    qs = [(i + 1) / (k + 1) for i in range(k)]
    return np.quantile(t, qs)


def fit_segmented(series: MonthlySeries, config: SegregConfig) -> SegmentedFit:
    """Best-of-restarts iterative segmented fit."""
    n = len(series)
    k = config.n_breakpoints
    if n < 4 * (k + 1):
        raise ValueError("series too short for the requested breakpoints")
    t = np.arange(n, dtype=float)
    y = series.values
    base = _initial_guesses(t, config)
    seed = config.seed % (2 ** 64)

    best = None
    best_key = None
    for chain in range(config.restarts + 1):
        if chain == 0:
            start = base
        else:
            rng = np.random.default_rng(np.random.SeedSequence((seed, chain)))
            start = base + rng.uniform(-config.jitter_months,
                                       config.jitter_months, size=k)
        result = _run_chain(t, y, start, config)
        if result is None:
            continue
        psi, rss, converged, iterations = result
        key = (rss, tuple(psi))
        if best_key is None or key < best_key:
            best_key = key
            best = result
    if best is None:
        raise NumericalError("no stable breakpoint configuration")
    psi, rss, converged, iterations = best
    return _assemble_fit(t, y, psi, rss, converged, iterations, series)


def fit_segmented_exhaustive(series: MonthlySeries,
                             n_breakpoints: int) -> SegmentedFit:
    """Exact rss minimizer over integer-month breakpoint tuples.

    Independent of the iterative path; intended as a test oracle and
    therefore restricted to short series and at most two breakpoints.
    """
    n = len(series)
    if n > 300:
        raise ValueError("exhaustive search is limited to 300 points")
    if n_breakpoints not in (1, 2):
        raise ValueError("exhaustive search supports 1 or 2 breakpoints")
    if n < 4 * (n_breakpoints + 1):
        raise ValueError("series too short for the requested breakpoints")
    grid = range(1, n - 1)
    total = math.comb(len(grid), n_breakpoints)
    if total > 10 ** 6:
        raise ValueError("breakpoint grid too large")
    t = np.arange(n, dtype=float)
    y = series.values

    best_key = None
    best_psi = None
    best_rss = None
    for combo in combinations(grid, n_breakpoints):
        psi = np.asarray(combo, dtype=float)
        rss, _ = _continuous_fit(t, y, psi)
        key = (rss, combo)
        if best_key is None or key < best_key:
            best_key, best_psi, best_rss = key, psi, rss
    return _assemble_fit(t, y, best_psi, best_rss, True, 0, series)


@dataclass(frozen=True)
class StabilityReport:
    spreads: tuple[float, ...]
    unstable: bool
    message: str
    breakpoints_by_run: tuple[tuple[float, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "spreads": list(self.spreads),
            "unstable": self.unstable,
            "message": self.message,
            "breakpoints_by_run": [list(b) for b in self.breakpoints_by_run],
        }


def stability_probe(series: MonthlySeries, config: SegregConfig,
                    runs: int) -> StabilityReport:
    """Re-fit under fresh jitter seeds and measure breakpoint dispersion.

    A spread above 6 months on any breakpoint marks the configuration
    unstable, echoing run-to-run breakpoint drift.
    """
    if runs < 2:
        raise ValueError("need at least 2 runs")
    collected = []
    failures = 0
    for r in range(runs):
        seed_r = int(np.random.SeedSequence(
            (config.seed % (2 ** 64), r)).generate_state(1, np.uint64)[0])
        try:
            fit = fit_segmented(series, replace(config, seed=seed_r))
        except NumericalError:
            failures += 1
            continue
        collected.append(fit.breakpoints)
    if not collected:
        raise NumericalError("no stable breakpoint configuration")
    arr = np.asarray(collected)
    spreads = tuple(float(v) for v in arr.max(axis=0) - arr.min(axis=0))
    unstable = failures > 0 or any(s > 6.0 for s in spreads)
    message = ("unstable: reconsider n_breakpoints" if unstable
               else "stable across jittered restarts")
    return StabilityReport(
        spreads=spreads,
        unstable=unstable,
        message=message,
        breakpoints_by_run=tuple(collected),
    )
