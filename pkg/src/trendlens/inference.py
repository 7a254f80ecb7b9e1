"""Welch's unequal-variance t-test and Student-t quantiles from first principles.

The Student-t CDF is evaluated through the regularized incomplete beta
function (continued-fraction expansion), and the quantile inverts it with a
safeguarded Newton iteration. No statistical library is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_CF_MAX_ITER = 300
_CF_EPS = 3e-15
_CF_TINY = 1e-300

LESS = "less"
GREATER = "greater"


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the continued fraction for the incomplete beta.

    Converges quickly for x < (a+1)/(a+b+2); callers use the symmetry
    I_x(a,b) = 1 - I_{1-x}(b,a) outside that range.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_cdf(x: float, dof: float) -> float:
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if x == 0.0:
        return 0.5
    tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + x * x))
    return tail if x < 0 else 1.0 - tail


def student_t_pdf(x: float, dof: float) -> float:
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    ln = (math.lgamma((dof + 1.0) / 2.0) - math.lgamma(dof / 2.0)
          - 0.5 * math.log(dof * math.pi)
          - (dof + 1.0) / 2.0 * math.log1p(x * x / dof))
    return math.exp(ln)


def student_t_quantile(p: float, dof: float) -> float:
    """Inverse CDF, absolute accuracy well under 1e-8.

    Newton steps on the CDF, bracketed by bisection so the iteration can
    never escape [lo, hi].
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_quantile(1.0 - p, dof)

    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, dof) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("quantile bracket expansion failed")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = student_t_cdf(x, dof) - p
        if f > 0:
            hi = x
        else:
            lo = x
        g = student_t_pdf(x, dof)
        step = f / g if g > 0 else 0.0
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < 1e-13 * max(1.0, abs(x)) or hi - lo < 1e-13 * max(1.0, lo):
            return x_new
        x = x_new
    return x


@dataclass(frozen=True)
class WelchSummary:
    """Epoch summary (mean, sample sd with n-1 denominator, n)."""

    mean: float
    sd: float
    n: int

    def __post_init__(self):
        if self.sd < 0:
            raise ValueError("sd must be nonnegative")
        if self.n < 2:
            raise ValueError("need n >= 2")


@dataclass(frozen=True)
class WelchResult:
    t_statistic: float
    dof: float
    critical: float
    alpha: float
    tail: str
    significant: bool
    percent_change: float
    before: WelchSummary
    after: WelchSummary

    def to_json_dict(self) -> dict:
        return {
            "mean_before": self.before.mean,
            "sd_before": self.before.sd,
            "n_before": self.before.n,
            "mean_after": self.after.mean,
            "sd_after": self.after.sd,
            "n_after": self.after.n,
            "t": self.t_statistic,
            "dof": self.dof,
            "t_critical": self.critical,
            "alpha": self.alpha,
            "tail": self.tail,
            "significant": self.significant,
            "percent_change": self.percent_change,
        }

    def csv_row(self) -> list[str]:
        """Row in table column order: before, after, t, t_s, verdict, percent."""
        return [
            f"{self.before.mean:.2f}", f"{self.before.sd:.2f}", str(self.before.n),
            f"{self.after.mean:.2f}", f"{self.after.sd:.2f}", str(self.after.n),
            f"{self.t_statistic:.2f}", f"{self.critical:.2f}",
            "yes" if self.significant else "no",
            f"{self.percent_change:+.1f}%",
        ]


def _pooled_se_squared(before: WelchSummary, after: WelchSummary) -> float:
    return before.sd ** 2 / before.n + after.sd ** 2 / after.n


def welch_t(before: WelchSummary, after: WelchSummary) -> float:
    """t = (mean_before - mean_after) / sqrt(sd_b^2/n_b + sd_a^2/n_a)."""
    se2 = _pooled_se_squared(before, after)
    if se2 == 0.0:
        raise ValueError("both variances are zero")
    return (before.mean - after.mean) / math.sqrt(se2)


def welch_satterthwaite_dof(before: WelchSummary, after: WelchSummary) -> float:
    se2 = _pooled_se_squared(before, after)
    if se2 == 0.0:
        raise ValueError("both variances are zero")
    denom = (before.sd ** 4 / (before.n ** 2 * (before.n - 1))
             + after.sd ** 4 / (after.n ** 2 * (after.n - 1)))
    return se2 ** 2 / denom


def welch_test(before: WelchSummary, after: WelchSummary,
               alpha: float = 0.05, tail: str = GREATER) -> WelchResult:
    """One-sided Welch test of the declared alternative.

    tail=GREATER tests mean_after > mean_before, tail=LESS the reverse.
    t_statistic is signed along the alternative so that significance is
    always t_statistic > critical.
    """
    if not 0.0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 0.5]")
    tail = tail.lower()
    if tail not in (LESS, GREATER):
        raise ValueError(f"unknown tail {tail!r}")
    raw = welch_t(before, after)
    dof = welch_satterthwaite_dof(before, after)
    critical = student_t_quantile(1.0 - alpha, dof)
    directional = -raw if tail == GREATER else raw
    if before.mean != 0.0:
        percent = 100.0 * (after.mean - before.mean) / before.mean
    else:
        percent = float("nan")
    return WelchResult(
        t_statistic=directional,
        dof=dof,
        critical=critical,
        alpha=alpha,
        tail=tail,
        significant=directional > critical,
        percent_change=percent,
        before=before,
        after=after,
    )
