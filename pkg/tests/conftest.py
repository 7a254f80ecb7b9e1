"""Shared fixtures: a synthetic incident corpus with planted structure.

The generator plants two slope kinks in the reclassified class (month
indices 106 and 150 relative to January 2006), a mild linear decline in
the non-reclassified class, one below-threshold category, one excluded
category, unmapped rows, corrupt rows, out-of-window rows, and two
spatial clusters with matching neighborhood geometry and one station
inside the eastern cluster.
"""

import csv
import json
from datetime import date

import numpy as np
import pytest

WINDOW_START = (2006, 1)
WINDOW_END = (2019, 12)
N_MONTHS = 168
KINK1 = 106   # first planted slope change (2014-11)
KINK2 = 150   # second planted slope change (2018-07)

EAST_CENTER = (34.0281, -118.4681)
WEST_CENTER = (34.0134, -118.4916)
FAR_AWAY = (34.1000, -118.3000)

RECLASSIFIED_CATEGORIES = (
    ("PETTY THEFT $1-$950", 0.55),
    ("SHOPLIFTING", 0.25),
    ("POSSESSION OF NARCOTICS", 0.20),
)
NONRECLASSIFIED_CATEGORIES = (
    ("BATTERY ON PERSON", 0.50),
    ("VANDALISM UNDER $400", 0.30),
    ("BURGLARY - RESIDENTIAL", 0.20),
)

N_BELOW_THRESHOLD = 120   # CONTEMPT OF COURT rows, under the 450 cutoff
N_EXCLUDED = 80           # ARSON rows
N_UNMAPPED = 60           # rows no collapse rule matches
N_CORRUPT = 5
N_OUT_OF_WINDOW = 4


def reclassified_level(t: np.ndarray) -> np.ndarray:
    base = 55.0 + 0.6 * np.maximum(t - KINK1, 0.0) - 0.9 * np.maximum(t - KINK2, 0.0)
    return base + 5.0 * np.sin(2.0 * np.pi * t / 12.0)


def nonreclassified_level(t: np.ndarray) -> np.ndarray:
    return 85.0 - 0.06 * t + 4.0 * np.sin(2.0 * np.pi * (t + 3) / 12.0)


def month_of(index: int) -> tuple[int, int]:
    y, m = WINDOW_START
    total = (y * 12 + m - 1) + index
    return total // 12, total % 12 + 1


def _format_date(d: date, use_us: bool) -> str:
    if use_us:
        return f"{d.month:02d}/{d.day:02d}/{d.year}"
    return d.isoformat()


def _emit_rows(writer, rng, counts, categories, code):
    names = [c for c, _ in categories]
    probs = [w for _, w in categories]
    for idx, count in enumerate(counts):
        year, month = month_of(idx)
        for j in range(count):
            day = int(rng.integers(1, 29))
            east = rng.random() < 0.55
            clat, clon = EAST_CENTER if east else WEST_CENTER
            lat = clat + rng.uniform(-0.0035, 0.0035)
            lon = clon + rng.uniform(-0.0040, 0.0040)
            desc = names[int(rng.choice(len(names), p=probs))]
            writer.writerow([
                _format_date(date(year, month, day), use_us=(j % 2 == 0)),
                code, desc, f"{lat:.6f}", f"{lon:.6f}",
            ])


def build_incident_csv(path) -> dict:
    """Write the synthetic incident CSV; return planted ground truth."""
    rng = np.random.default_rng(20140611)
    t = np.arange(N_MONTHS, dtype=float)
    rec = np.clip(np.rint(reclassified_level(t) + rng.normal(0, 2, N_MONTHS)), 0, None)
    non = np.clip(np.rint(nonreclassified_level(t) + rng.normal(0, 2, N_MONTHS)), 0, None)
    rec = rec.astype(int)
    non = non.astype(int)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date_occurred", "ucr_code", "description",
                         "latitude", "longitude"])
        _emit_rows(writer, rng, rec, RECLASSIFIED_CATEGORIES, "484")
        _emit_rows(writer, rng, non, NONRECLASSIFIED_CATEGORIES, "242")

        def scatter(n, desc, code):
            for i in range(n):
                idx = int(rng.integers(0, N_MONTHS))
                year, month = month_of(idx)
                day = int(rng.integers(1, 29))
                lat = EAST_CENTER[0] + rng.uniform(-0.003, 0.003)
                lon = EAST_CENTER[1] + rng.uniform(-0.003, 0.003)
                writer.writerow([
                    _format_date(date(year, month, day), use_us=(i % 2 == 0)),
                    code, desc, f"{lat:.6f}", f"{lon:.6f}",
                ])

        scatter(N_BELOW_THRESHOLD, "CONTEMPT OF COURT", "166")
        scatter(N_EXCLUDED, "ARSON", "451")
        scatter(N_UNMAPPED, "ZZZ MYSTERY INCIDENT", "999")

        # corrupt rows: missing lat, bad dates, out-of-range coordinate, short row
        writer.writerow(["06/15/2014", "484", "PETTY THEFT $1-$950", "", "-118.468"])
        writer.writerow(["13/45/2019", "484", "PETTY THEFT $1-$950", "34.01", "-118.468"])
        writer.writerow(["2014-13-01", "484", "PETTY THEFT $1-$950", "34.01", "-118.468"])
        writer.writerow(["06/15/2014", "484", "PETTY THEFT $1-$950", "999.0", "-118.468"])
        writer.writerow(["06/15/2014", "484"])

        # in-range rows dated outside the analysis window
        writer.writerow(["12/31/2005", "484", "PETTY THEFT $1-$950", "34.028", "-118.468"])
        writer.writerow(["2005-06-01", "242", "BATTERY ON PERSON", "34.028", "-118.468"])
        writer.writerow(["01/15/2020", "484", "PETTY THEFT $1-$950", "34.028", "-118.468"])
        writer.writerow(["2020-06-01", "242", "BATTERY ON PERSON", "34.028", "-118.468"])

    return {
        "reclassified_monthly": rec,
        "nonreclassified_monthly": non,
        "n_reclassified": int(rec.sum()),
        "n_nonreclassified": int(non.sum()),
        "n_below_threshold": N_BELOW_THRESHOLD,
        "n_excluded": N_EXCLUDED,
        "n_unmapped": N_UNMAPPED,
        "n_corrupt": N_CORRUPT,
        "n_out_of_window": N_OUT_OF_WINDOW,
        "input_rows": int(rec.sum() + non.sum()) + N_BELOW_THRESHOLD
        + N_EXCLUDED + N_UNMAPPED + N_CORRUPT + N_OUT_OF_WINDOW,
    }


def _rectangle(center, dlat, dlon):
    lat, lon = center
    return [
        [lon - dlon, lat - dlat],
        [lon + dlon, lat - dlat],
        [lon + dlon, lat + dlat],
        [lon - dlon, lat + dlat],
        [lon - dlon, lat - dlat],
    ]


def build_geometry(path) -> None:
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"name": "Eastside"},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [_rectangle(EAST_CENTER, 0.006, 0.007)],
                },
            },
            {
                "type": "Feature",
                "properties": {"name": "Westside"},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [_rectangle(WEST_CENTER, 0.006, 0.007)],
                },
            },
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def build_stations(path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "lat", "lon", "radius_m"])
        writer.writerow(["East Stop", EAST_CENTER[0], EAST_CENTER[1], 450])
        writer.writerow(["Nowhere Stop", FAR_AWAY[0], FAR_AWAY[1], ""])


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Synthetic corpus on disk plus its planted ground truth."""
    root = tmp_path_factory.mktemp("corpus")
    incidents = root / "incidents.csv"
    geometry = root / "neighborhoods.geojson"
    stations = root / "stations.csv"
    truth = build_incident_csv(incidents)
    build_geometry(geometry)
    build_stations(stations)
    return {
        "root": root,
        "incidents": incidents,
        "geometry": geometry,
        "stations": stations,
        **truth,
    }


@pytest.fixture()
def tiny_csv_writer(tmp_path):
    """Write small hand-built incident CSVs for edge-case tests."""

    def write(rows, name="tiny.csv", header=("date_occurred", "ucr_code",
                                              "description", "latitude",
                                              "longitude")):
        path = tmp_path / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(header))
            writer.writerows(rows)
        return path

    return write
