"""Month-indexed count series, epoch splitting, and backward-difference slopes."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

import numpy as np

Month = tuple[int, int]

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_index(month: Month) -> int:
    """Absolute month number (year*12 + month-1), used for arithmetic."""
    year, mon = month
    if not 1 <= mon <= 12:
        raise ValueError(f"month out of range: {month!r}")
    return year * 12 + (mon - 1)


def month_from_index(index: int) -> Month:
    return index // 12, index % 12 + 1


def add_months(month: Month, count: int) -> Month:
    return month_from_index(month_index(month) + count)


def months_between(start: Month, end: Month) -> int:
    """Signed number of months from start to end."""
    return month_index(end) - month_index(start)


def format_month(month: Month) -> str:
    return f"{month[0]:04d}-{month[1]:02d}"


def parse_month(text: str) -> Month:
    m = _MONTH_RE.match(text.strip())
    if m is None:
        raise ValueError(f"expected YYYY-MM, got {text!r}")
    month = (int(m.group(1)), int(m.group(2)))
    month_index(month)  # range check
    return month


def _as_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("values must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """Gapless sequence of monthly values starting at start_month.

    Entry i belongs to start_month + i; months without incidents hold 0,
    never a gap.
    """

    start_month: Month
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        month_index(self.start_month)
        object.__setattr__(self, "values", _as_values(self.values))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_month(self) -> Month:
        return add_months(self.start_month, len(self) - 1)

    def month_at(self, i: int) -> Month:
        return add_months(self.start_month, i)

    def months(self) -> list[Month]:
        return [self.month_at(i) for i in range(len(self))]

    def index_of(self, month: Month) -> int:
        idx = months_between(self.start_month, month)
        if not 0 <= idx < len(self):
            raise ValueError(f"{format_month(month)} outside series span")
        return idx

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["month", "value"])
        for i, v in enumerate(self.values):
            writer.writerow([format_month(self.month_at(i)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "MonthlySeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["month", "value"]:
            raise ValueError("expected header 'month,value'")
        months = [parse_month(r[0]) for r in rows[1:]]
        values = [float(r[1]) for r in rows[1:]]
        if not months:
            raise ValueError("empty series")
        start = months[0]
        for i, m in enumerate(months):
            if m != add_months(start, i):
                raise ValueError(f"months not consecutive at row {i + 2}")
        return cls(start, values, label)


@dataclass(frozen=True, eq=False)
class SlopeSeries:
    """First differences of a monthly series; start_month is the month of
    the first difference (the second month of the source)."""

    start_month: Month
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        month_index(self.start_month)
        object.__setattr__(self, "values", _as_values(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def month_at(self, i: int) -> Month:
        return add_months(self.start_month, i)


@dataclass(frozen=True)
class EpochCut:
    """One cut month. boundary_month_in_later declares which epoch owns the
    boundary month itself (policy cuts differ: the reclassification cut puts
    its month in the later epoch, the transit-opening cut in the earlier)."""

    month: Month
    boundary_month_in_later: bool = True

    def first_index_of_later(self, series: MonthlySeries) -> int:
        idx = series.index_of(self.month)
        return idx if self.boundary_month_in_later else idx + 1


@dataclass(frozen=True)
class EpochSplit:
    cuts: tuple[EpochCut, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        indices = [month_index(c.month) for c in self.cuts]
        if sorted(set(indices)) != indices:
            raise ValueError("cut months must be strictly increasing")


def aggregate_monthly(records, classes, window: tuple[Month, Month],
                      label: str = "") -> MonthlySeries:
    """Count records per month over the window, zero-filled.

    classes: set of classification values to include, or None for all
    records regardless of classification.
    """
    start, end = window
    n = months_between(start, end) + 1
    if n < 1:
        raise ValueError("window is empty")
    values = np.zeros(n)
    lo = month_index(start)
    for rec in records:
        if classes is not None and rec.classification not in classes:
            continue
        idx = rec.occurred_on.year * 12 + (rec.occurred_on.month - 1) - lo
        if 0 <= idx < n:
            values[idx] += 1.0
    return MonthlySeries(start, values, label)


def slope(series: MonthlySeries) -> SlopeSeries:
    """Backward difference: out[i] = in[i+1] - in[i]."""
    if len(series) < 2:
        raise ValueError("need at least 2 months to difference")
    return SlopeSeries(add_months(series.start_month, 1),
                       np.diff(series.values), series.label)


def split(series: MonthlySeries, epoch_split: EpochSplit) -> list[MonthlySeries]:
    """Cut the series into epochs; concatenating the pieces restores it."""
    bounds = [0]
    for cut in epoch_split.cuts:
        idx = cut.first_index_of_later(series)
        if not 0 < idx < len(series):
            raise ValueError(
                f"cut {format_month(cut.month)} does not split the series")
        if idx <= bounds[-1]:
            raise ValueError("cuts produce an empty epoch")
        bounds.append(idx)
    bounds.append(len(series))
    return [
        MonthlySeries(series.month_at(a), series.values[a:b], series.label)
        for a, b in zip(bounds, bounds[1:])
    ]


def summarize(series: MonthlySeries) -> tuple[float, float, int]:
    """(mean, sample sd, n); sd uses the n-1 denominator, nan when n < 2."""
    n = len(series)
    mean = float(np.mean(series.values))
    sd = float(np.std(series.values, ddof=1)) if n >= 2 else float("nan")
    return mean, sd, n
