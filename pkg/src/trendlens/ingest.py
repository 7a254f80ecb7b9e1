"""Incident CSV parsing, category collapse, thresholding and classification.

Raw offense descriptions collapse to analysis categories through ordered,
case-insensitive substring rules. Categories then classify as reclassified,
non-reclassified, or excluded; categories whose full-window count falls
below the inclusion threshold drop out, as do exclusion-listed and unmapped
ones. Malformed rows are counted and skipped, never repaired.
"""

from __future__ import annotations

import configparser
import csv
import enum
import json
import re
from dataclasses import dataclass, replace
from datetime import date, datetime
from importlib import resources

from .errors import ConfigError
from .series import Month

UNMAPPED = "Unmapped"

DEFAULT_WINDOW: tuple[Month, Month] = ((2006, 1), (2019, 12))

DEFAULT_SCHEMA = {
    "date": "date_occurred",
    "code": "ucr_code",
    "description": "description",
    "lat": "latitude",
    "lon": "longitude",
}

_US_DATE_RE = re.compile(r"^\d{1,2}/\d{1,2}/\d{4}$")


class CrimeClass(enum.Enum):
    RECLASSIFIED = "reclassified"
    NONRECLASSIFIED = "non-reclassified"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class IncidentRecord:
    occurred_on: date
    ucr_code: str
    raw_category: str
    category: str
    lat: float
    lon: float
    classification: CrimeClass | None = None


@dataclass(frozen=True)
class CategoryMap:
    """Ordered collapse rules plus the category-level classification."""

    collapse_rules: tuple[tuple[str, str], ...]
    classification: dict[str, CrimeClass]
    min_count_threshold: int = 450
    exclusions: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.min_count_threshold < 0:
            raise ValueError("min_count_threshold must be nonnegative")
        object.__setattr__(self, "collapse_rules", tuple(
            (pattern.lower(), target) for pattern, target in self.collapse_rules))
        object.__setattr__(self, "exclusions",
                           frozenset(e.lower() for e in self.exclusions))
        produced = {target for _, target in self.collapse_rules}
        missing = sorted(set(self.classification) - produced)
        if missing:
            raise ValueError(
                f"classified categories never produced by any rule: {missing}")


def collapse_category(raw_category: str, category_map: CategoryMap) -> str:
    """First matching substring rule wins; no match falls to Unmapped."""
    needle = raw_category.lower()
    for pattern, target in category_map.collapse_rules:
        if pattern in needle:
            return target
    return UNMAPPED


def classify(category: str, category_map: CategoryMap) -> CrimeClass:
    if category.lower() in category_map.exclusions:
        return CrimeClass.EXCLUDED
    return category_map.classification.get(category, CrimeClass.EXCLUDED)


@dataclass(frozen=True)
class IngestReport:
    input_rows: int = 0
    accepted: int = 0
    rejected_corrupt: int = 0
    dropped_out_of_window: int = 0
    dropped_below_threshold: tuple[tuple[str, int], ...] = ()
    dropped_excluded: tuple[tuple[str, int], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "input_rows": self.input_rows,
            "accepted": self.accepted,
            "rejected_corrupt": self.rejected_corrupt,
            "dropped_out_of_window": self.dropped_out_of_window,
            "dropped_below_threshold": [
                {"category": c, "count": n}
                for c, n in self.dropped_below_threshold],
            "dropped_excluded": [
                {"category": c, "count": n} for c, n in self.dropped_excluded],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _parse_date(text: str) -> date:
    text = text.strip()
    if _US_DATE_RE.match(text):
        return datetime.strptime(text, "%m/%d/%Y").date()
    try:
        return datetime.fromisoformat(text).date()
    except ValueError:
        raise ValueError(f"unsupported date form: {text!r}") from None


def parse_csv(path, schema: dict | None = None,
              window: tuple[Month, Month] = DEFAULT_WINDOW):
    """Parse an incident CSV into records plus a parse-stage report.

    Returns (records, report). Records carry the raw category as their
    category and no classification yet; the full pipeline in ingest_csv
    fills both in. Rows with missing fields, unparseable dates or
    coordinates out of range count as corrupt. Rows dated outside the
    window are dropped and counted separately.
    """
    schema = dict(DEFAULT_SCHEMA, **(schema or {}))
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read input CSV: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ConfigError("input CSV has no header row")
        missing = [col for col in schema.values()
                   if col not in reader.fieldnames]
        if missing:
            raise ConfigError(f"input CSV lacks configured columns: {missing}")
        (w_start, w_end) = window
        lo = w_start[0] * 12 + w_start[1] - 1
        hi = w_end[0] * 12 + w_end[1] - 1
        records: list[IncidentRecord] = []
        rows = corrupt = out_of_window = 0
        for row in reader:
            rows += 1
            try:
                raw_date = row[schema["date"]]
                raw_lat = row[schema["lat"]]
                raw_lon = row[schema["lon"]]
                raw_desc = row[schema["description"]]
                if raw_date is None or raw_lat is None or raw_lon is None \
                        or raw_desc is None:
                    raise ValueError("short row")
                occurred = _parse_date(raw_date)
                lat = float(raw_lat)
                lon = float(raw_lon)
            except (ValueError, KeyError):
                corrupt += 1
                continue
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                corrupt += 1
                continue
            m = occurred.year * 12 + occurred.month - 1
            if not lo <= m <= hi:
                out_of_window += 1
                continue
            records.append(IncidentRecord(
                occurred_on=occurred,
                ucr_code=(row.get(schema["code"]) or "").strip(),
                raw_category=raw_desc.strip(),
                category=raw_desc.strip(),
                lat=lat,
                lon=lon,
            ))
    report = IngestReport(
        input_rows=rows,
        accepted=len(records),
        rejected_corrupt=corrupt,
        dropped_out_of_window=out_of_window,
    )
    return records, report


def apply_threshold(records, category_map: CategoryMap):
    """Move categories with full-window counts below the threshold to
    excluded. Returns (kept records, drop list as (category, count))."""
    counts: dict[str, int] = {}
    for rec in records:
        counts[rec.category] = counts.get(rec.category, 0) + 1
    dropped = sorted((c, n) for c, n in counts.items()
                     if n < category_map.min_count_threshold)
    dropped_set = {c for c, _ in dropped}
    kept = [r for r in records if r.category not in dropped_set]
    return kept, dropped


def ingest_csv(path, category_map: CategoryMap, schema: dict | None = None,
               window: tuple[Month, Month] = DEFAULT_WINDOW):
    """Full pipeline: parse, collapse, threshold, classify.

    Returns (records, report) where every parsed in-window record appears
    with a classification (excluded ones included, so downstream filters
    decide what to keep) and the report partitions the input row count.
    """
    parsed, stage = parse_csv(path, schema, window)
    collapsed = [replace(r, category=collapse_category(r.raw_category,
                                                       category_map))
                 for r in parsed]

    counts: dict[str, int] = {}
    for rec in collapsed:
        counts[rec.category] = counts.get(rec.category, 0) + 1

    excluded_counts: dict[str, int] = {}
    threshold_counts: dict[str, int] = {}
    final: list[IncidentRecord] = []
    accepted = 0
    for rec in collapsed:
        cls = classify(rec.category, category_map)
        if cls is CrimeClass.EXCLUDED:
            excluded_counts[rec.category] = excluded_counts.get(rec.category, 0) + 1
        elif counts[rec.category] < category_map.min_count_threshold:
            threshold_counts[rec.category] = threshold_counts.get(rec.category, 0) + 1
            cls = CrimeClass.EXCLUDED
        else:
            accepted += 1
        final.append(replace(rec, classification=cls))

    report = IngestReport(
        input_rows=stage.input_rows,
        accepted=accepted,
        rejected_corrupt=stage.rejected_corrupt,
        dropped_out_of_window=stage.dropped_out_of_window,
        dropped_below_threshold=tuple(sorted(threshold_counts.items())),
        dropped_excluded=tuple(sorted(excluded_counts.items())),
    )
    return final, report


def load_category_map(path=None) -> CategoryMap:
    """Load a CategoryMap from INI-style text configuration.

    Sections: [settings] (min_count_threshold, exclusions), [collapse]
    (pattern = collapsed name, order significant), [classification]
    (collapsed name = reclassified | non-reclassified; anything absent is
    excluded).
    """
    parser = configparser.ConfigParser(interpolation=None)
    if path is None:
        text = resources.files("trendlens.data").joinpath(
            "category_map.cfg").read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read category map: {exc}") from exc
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed category map: {exc}") from exc
    if not parser.has_section("collapse") or not parser.has_section("classification"):
        raise ConfigError("category map needs [collapse] and [classification]")

    rules = tuple(parser.items("collapse"))
    classification = {}
    for category, label in parser.items("classification"):
        label = label.strip().lower()
        if label == "reclassified":
            classification[category] = CrimeClass.RECLASSIFIED
        elif label == "non-reclassified":
            classification[category] = CrimeClass.NONRECLASSIFIED
        else:
            raise ConfigError(
                f"classification for {category!r} must be reclassified or "
                f"non-reclassified, got {label!r}")
    threshold = 450
    exclusions = frozenset()
    if parser.has_section("settings"):
        threshold = parser.getint("settings", "min_count_threshold",
                                  fallback=450)
        raw = parser.get("settings", "exclusions", fallback="")
        exclusions = frozenset(
            e.strip().lower() for e in raw.split(",") if e.strip())
    try:
        return CategoryMap(
            collapse_rules=rules,
            classification=classification,
            min_count_threshold=threshold,
            exclusions=exclusions,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


NORMALIZED_HEADER = ["occurred_on", "ucr_code", "raw_category", "category",
                     "classification", "lat", "lon"]


def write_normalized(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(NORMALIZED_HEADER)
    for r in records:
        writer.writerow([
            r.occurred_on.isoformat(), r.ucr_code, r.raw_category,
            r.category,
            r.classification.value if r.classification else "",
            repr(r.lat), repr(r.lon),
        ])


def read_normalized(path) -> list[IncidentRecord]:
    by_value = {c.value: c for c in CrimeClass}
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != NORMALIZED_HEADER:
            raise ConfigError("not a normalized record store")
        for row in reader:
            records.append(IncidentRecord(
                occurred_on=date.fromisoformat(row[0]),
                ucr_code=row[1],
                raw_category=row[2],
                category=row[3],
                classification=by_value.get(row[4]),
                lat=float(row[5]),
                lon=float(row[6]),
            ))
    return records


def is_normalized_store(path) -> bool:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            first = next(csv.reader(fh), None)
    except (OSError, UnicodeDecodeError):
        return False
    return first == NORMALIZED_HEADER
