"""Command-line pipeline around the analysis modules.

Subcommands ingest incident CSVs and emit the report tables (CSV), machine
readable results (JSON), and plots (SVG) into an output directory. Outputs
are deterministic for a fixed config and seed: rerunning a command
overwrites every artifact with identical bytes.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import svgplot
from .changepoint import MosumConfig, detect
from .errors import ConfigError, DataError, NumericalError, TrendlensError
from .geo import GeoPoint, assign_neighborhood, load_geojson, load_stations, within_radius
from .inference import GREATER, LESS, WelchSummary, welch_test
from .ingest import (
    DEFAULT_WINDOW,
    CrimeClass,
    ingest_csv,
    is_normalized_store,
    load_category_map,
    read_normalized,
    write_normalized,
)
from .segreg import SegregConfig, fit_segmented, stability_probe
from .series import (
    EpochCut,
    EpochSplit,
    MonthlySeries,
    add_months,
    aggregate_monthly,
    format_month,
    parse_month,
    slope,
    split,
    summarize,
)
from .stl import StlConfig, stl_decompose

ANALYSIS_CLASSES = (CrimeClass.RECLASSIFIED, CrimeClass.NONRECLASSIFIED)
CLASS_ALL = "all"

# Verdict text for station rows whose counts are too sparse to compare.
INSUFFICIENT = "N/A — insufficient data"
SPARSE_MEAN = 1.5

_WELCH_HEADER = [
    "mean_before", "sd_before", "n_before",
    "mean_after", "sd_after", "n_after",
    "t", "t_critical", "significant", "percent_change",
]

_CLASS_COLORS = {
    CrimeClass.RECLASSIFIED.value: svgplot.BLUE,
    CrimeClass.NONRECLASSIFIED.value: svgplot.ORANGE,
    CLASS_ALL: svgplot.GREEN,
}


@dataclass(frozen=True)
class AnalysisConfig:
    input: str | None
    category_map: str | None
    geometry: str | None
    stations: str | None
    out: str
    seed: int
    window: tuple
    reclassification: EpochCut
    rail: EpochCut
    stl: StlConfig
    mosum: MosumConfig
    segreg: SegregConfig
    bin_width: int = 10
    alpha: float = 0.05
    stability_runs: int = 8


_CONFIG_KEYS = {
    "input", "category_map", "geometry", "stations", "out", "seed",
    "w_trend", "mosum_g", "eta", "epsilon", "breakpoints",
    "bootstrap_replicates", "alpha", "window",
    "reclassification_month", "rail_month",
}


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _resolve_seed(args, file_cfg: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in file_cfg:
        return int(file_cfg["seed"])
    env = os.environ.get("TRENDLENS_SEED")
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"TRENDLENS_SEED is not an integer: {env!r}") from None
    return 0


def _pick(flag_value, file_cfg: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        return file_cfg[key]
    return default


def resolve_config(args) -> AnalysisConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}
    try:
        seed = _resolve_seed(args, file_cfg)
        window_raw = file_cfg.get("window")
        if window_raw is None:
            window = DEFAULT_WINDOW
        else:
            if not (isinstance(window_raw, list) and len(window_raw) == 2):
                raise ConfigError("window must be a [start, end] month pair")
            window = (parse_month(window_raw[0]), parse_month(window_raw[1]))
        reclassification = EpochCut(
            parse_month(str(file_cfg.get("reclassification_month", "2014-11"))),
            boundary_month_in_later=True)
        rail = EpochCut(
            parse_month(str(file_cfg.get("rail_month", "2016-05"))),
            boundary_month_in_later=False)
        w_trend = _pick(args.w_trend, file_cfg, "w_trend", None)
        stl_cfg = StlConfig() if w_trend is None else StlConfig(
            trend_window=int(w_trend))
        mosum_cfg = MosumConfig(
            bandwidth=int(_pick(args.mosum_g, file_cfg, "mosum_g", 10)),
            eta=float(_pick(args.eta, file_cfg, "eta", 12.0)),
            epsilon=float(_pick(args.epsilon, file_cfg, "epsilon", 0.1)),
            alpha=float(file_cfg.get("alpha", 0.05)),
            bootstrap_replicates=int(file_cfg.get("bootstrap_replicates", 1000)),
            seed=seed,
        )
        segreg_cfg = SegregConfig(
            n_breakpoints=int(_pick(args.breakpoints, file_cfg,
                                    "breakpoints", 2)),
            seed=seed,
        )
        return AnalysisConfig(
            input=_pick(args.input, file_cfg, "input", None),
            category_map=_pick(args.category_map, file_cfg,
                               "category_map", None),
            geometry=_pick(args.geometry, file_cfg, "geometry", None),
            stations=_pick(args.stations, file_cfg, "stations", None),
            out=str(_pick(args.out, file_cfg, "out", "out")),
            seed=seed,
            window=window,
            reclassification=reclassification,
            rail=rail,
            stl=stl_cfg,
            mosum=mosum_cfg,
            segreg=segreg_cfg,
            alpha=float(file_cfg.get("alpha", 0.05)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(cfg: AnalysisConfig) -> str:
    """Hash of the analysis settings; filesystem paths stay out so the same
    analysis run from different locations carries the same fingerprint."""
    payload = {
        "alpha": cfg.alpha,
        "bin_width": cfg.bin_width,
        "mosum": asdict(cfg.mosum),
        "rail_month": format_month(cfg.rail.month),
        "reclassification_month": format_month(cfg.reclassification.month),
        "seed": cfg.seed,
        "segreg": asdict(cfg.segreg),
        "stability_runs": cfg.stability_runs,
        "stl": asdict(cfg.stl),
        "window": [format_month(cfg.window[0]), format_month(cfg.window[1])],
    }
    canonical = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


class Workspace:
    """Output directory with a record of every artifact written."""

    def __init__(self, out_dir: str):
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory: {exc}") from exc
        self.out_dir = out_dir
        self.artifacts: list[str] = []

    def write_text(self, name: str, text: str) -> None:
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if name not in self.artifacts:
            self.artifacts.append(name)


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _slug(name: str) -> str:
    out = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")
    return out or "unnamed"


def _month_ticks(n: int, start_month) -> list[tuple[int, str]]:
    if n > 96:
        step = 24
    elif n > 36:
        step = 12
    else:
        step = max(1, n // 6)
    return [(i, format_month(add_months(start_month, i)))
            for i in range(0, n, step)]


def _obtain_records(cfg: AnalysisConfig):
    """Records plus the ingest report (None when reading a prebuilt store)."""
    if cfg.input is None:
        raise ConfigError("an input CSV is required (--input)")
    if is_normalized_store(cfg.input):
        try:
            return read_normalized(cfg.input), None
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read record store: {exc}") from exc
    category_map = load_category_map(cfg.category_map)
    return ingest_csv(cfg.input, category_map, window=cfg.window)


def _analysis_records(cfg: AnalysisConfig):
    records, _ = _obtain_records(cfg)
    kept = [r for r in records if r.classification in ANALYSIS_CLASSES]
    if not kept:
        raise DataError("input contains no analyzable records")
    return kept


def _class_series(records, crime_class: str, cfg: AnalysisConfig) -> MonthlySeries:
    if crime_class == CLASS_ALL:
        classes = set(ANALYSIS_CLASSES)
    else:
        classes = {CrimeClass(crime_class)}
    return aggregate_monthly(records, classes, cfg.window, label=crime_class)


def _epoch_pair(series: MonthlySeries, cut: EpochCut):
    try:
        before, after = split(series, EpochSplit((cut,)))
    except ValueError as exc:
        raise ConfigError(f"epoch cut does not split the window: {exc}") from exc
    return before, after


def _welch_cells(before: MonthlySeries, after: MonthlySeries, alpha: float):
    """Welch test with the alternative from the observed direction of change.

    Returns (result or None, table cells); cells carry blanks and an N/A
    verdict when the test cannot run.
    """
    mu_b, sd_b, n_b = summarize(before)
    mu_a, sd_a, n_a = summarize(after)
    cells = [
        f"{mu_b:.2f}", f"{sd_b:.2f}" if n_b >= 2 else "", str(n_b),
        f"{mu_a:.2f}", f"{sd_a:.2f}" if n_a >= 2 else "", str(n_a),
        "", "", "N/A", "",
    ]
    if n_b < 2 or n_a < 2:
        return None, cells
    tail = GREATER if mu_a >= mu_b else LESS
    try:
        result = welch_test(WelchSummary(mu_b, sd_b, n_b),
                            WelchSummary(mu_a, sd_a, n_a),
                            alpha=alpha, tail=tail)
    except ValueError:
        return None, cells
    return result, result.csv_row()


def _histogram_counts(values: np.ndarray, edges: np.ndarray) -> list[int]:
    counts, _ = np.histogram(values, bins=edges)
    return [int(c) for c in counts]


def cmd_ingest(cfg: AnalysisConfig, ws: Workspace) -> None:
    if cfg.input is None:
        raise ConfigError("an input CSV is required (--input)")
    if is_normalized_store(cfg.input):
        raise ConfigError("input is already a normalized record store")
    category_map = load_category_map(cfg.category_map)
    records, report = ingest_csv(cfg.input, category_map, window=cfg.window)
    buf = io.StringIO()
    write_normalized(records, buf)
    ws.write_text("normalized.csv", buf.getvalue())
    ws.write_text("ingest_report.json", _json_text(report.to_json_dict()))


def cmd_citywide(cfg: AnalysisConfig, ws: Workspace, records=None) -> None:
    if records is None:
        records = _analysis_records(cfg)
    welch_rows = []
    welch_json = {}
    for crime_class in (c.value for c in ANALYSIS_CLASSES):
        series = _class_series(records, crime_class, cfg)
        before, after = _epoch_pair(series, cfg.reclassification)
        result, cells = _welch_cells(before, after, cfg.alpha)
        welch_rows.append([crime_class] + cells)
        welch_json[crime_class] = (result.to_json_dict() if result
                                   else {"status": "N/A"})
        class_slug = _slug(crime_class)

        ws.write_text(f"series_{class_slug}.csv", series.to_csv())

        top = float(max(series.values.max(), 0.0))
        n_bins = int(top // cfg.bin_width) + 1
        edges = np.arange(n_bins + 1) * float(cfg.bin_width)
        counts_b = _histogram_counts(before.values, edges)
        counts_a = _histogram_counts(after.values, edges)
        hist_rows = [
            [repr(float(edges[i])), repr(float(edges[i + 1])),
             counts_b[i], counts_a[i]]
            for i in range(n_bins)
        ]
        ws.write_text(
            f"hist_{class_slug}.csv",
            _csv_text(["bin_lo", "bin_hi", "months_before", "months_after"],
                      hist_rows))
        ws.write_text(
            f"hist_{class_slug}.svg",
            svgplot.render_histogram(
                f"monthly counts, {crime_class}", edges,
                [("before", counts_b, svgplot.GRAY),
                 ("after", counts_a, _CLASS_COLORS[crime_class])]))

        dec = stl_decompose(series, cfg.stl)
        ws.write_text(f"stl_{class_slug}.csv", dec.to_csv())
        color = _CLASS_COLORS[crime_class]
        panels = [
            svgplot.Panel(title=f"observed, {crime_class}",
                          curves=[(series.values.tolist(), color, "")]),
            svgplot.Panel(title="trend",
                          curves=[(dec.trend.values.tolist(), color, "")]),
            svgplot.Panel(title="seasonal",
                          curves=[(dec.seasonal.values.tolist(), color, "")]),
            svgplot.Panel(title="remainder",
                          curves=[(dec.remainder.values.tolist(), color, "")]),
        ]
        ticks = _month_ticks(len(series), series.start_month)
        ws.write_text(f"stl_{class_slug}.svg",
                      svgplot.render_panels(panels, ticks))

    ws.write_text(
        "citywide_welch.csv",
        _csv_text(["crime_class"] + _WELCH_HEADER, welch_rows))
    ws.write_text("citywide_welch.json", _json_text(welch_json))


def cmd_neighborhoods(cfg: AnalysisConfig, ws: Workspace, records=None) -> None:
    if cfg.geometry is None:
        raise ConfigError("a neighborhood geometry file is required (--geometry)")
    try:
        neighborhoods = load_geojson(cfg.geometry)
    except OSError as exc:
        raise ConfigError(f"cannot read geometry: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad geometry: {exc}") from exc
    if records is None:
        records = _analysis_records(cfg)

    grouped: dict[str, list] = {name: [] for name in neighborhoods.names()}
    for rec in records:
        name = assign_neighborhood(GeoPoint(rec.lat, rec.lon), neighborhoods)
        if name is not None:
            grouped[name].append(rec)

    welch_rows = []
    for name in neighborhoods.names():
        members = grouped[name]
        decs = {}
        series_by_class = {}
        for crime_class in (c.value for c in ANALYSIS_CLASSES):
            series = _class_series(members, crime_class, cfg)
            before, after = _epoch_pair(series, cfg.reclassification)
            _, cells = _welch_cells(before, after, cfg.alpha)
            welch_rows.append([name, crime_class] + cells)
            series_by_class[crime_class] = series
            decs[crime_class] = stl_decompose(series, cfg.stl)

        slug = _slug(name)
        header = ["month"]
        columns = []
        for crime_class in (c.value for c in ANALYSIS_CLASSES):
            class_slug = _slug(crime_class)
            header += [f"observed_{class_slug}", f"trend_{class_slug}",
                       f"seasonal_{class_slug}", f"remainder_{class_slug}"]
            dec = decs[crime_class]
            columns += [series_by_class[crime_class].values,
                        dec.trend.values, dec.seasonal.values,
                        dec.remainder.values]
        start = series_by_class[ANALYSIS_CLASSES[0].value].start_month
        n = len(columns[0])
        rows = [[format_month(add_months(start, i))]
                + [repr(float(col[i])) for col in columns]
                for i in range(n)]
        ws.write_text(f"neighborhood_{slug}_stl.csv", _csv_text(header, rows))

        panel_specs = [
            ("observed", lambda cls: series_by_class[cls].values),
            ("trend", lambda cls: decs[cls].trend.values),
            ("seasonal", lambda cls: decs[cls].seasonal.values),
            ("remainder", lambda cls: decs[cls].remainder.values),
        ]
        panels = []
        for title, get in panel_specs:
            curves = [(get(cls.value).tolist(), _CLASS_COLORS[cls.value],
                       cls.value if title == "observed" else "")
                      for cls in ANALYSIS_CLASSES]
            panels.append(svgplot.Panel(title=f"{name}: {title}"
                                        if title == "observed" else title,
                                        curves=curves))
        ticks = _month_ticks(n, start)
        ws.write_text(f"neighborhood_{slug}_stl.svg",
                      svgplot.render_panels(panels, ticks))

    ws.write_text(
        "neighborhoods_welch.csv",
        _csv_text(["neighborhood", "crime_class"] + _WELCH_HEADER, welch_rows))


def cmd_stations(cfg: AnalysisConfig, ws: Workspace, records=None) -> None:
    if cfg.stations is None:
        raise ConfigError("a station CSV is required (--stations)")
    try:
        stations = load_stations(cfg.stations)
    except OSError as exc:
        raise ConfigError(f"cannot read stations: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad station CSV: {exc}") from exc
    if records is None:
        records = _analysis_records(cfg)

    header = (["station", "crime_class", "pair",
               "before_start", "before_end", "after_start", "after_end"]
              + _WELCH_HEADER)
    rows = []
    for station in stations:
        nearby = within_radius(records, station)
        for crime_class in [CLASS_ALL] + [c.value for c in ANALYSIS_CLASSES]:
            series = _class_series(nearby, crime_class, cfg)
            rail_before, rail_after = _epoch_pair(series, cfg.rail)
            try:
                epochs = split(series, EpochSplit((cfg.reclassification,
                                                   cfg.rail)))
            except ValueError as exc:
                raise ConfigError(
                    f"epoch cuts do not split the window: {exc}") from exc
            pairs = [
                ("rail", rail_before, rail_after),
                ("reclassification_pre_rail", epochs[0], epochs[1]),
                ("interim_vs_post_rail", epochs[1], epochs[2]),
            ]
            for pair_id, before, after in pairs:
                _, cells = _welch_cells(before, after, cfg.alpha)
                mu_b = float(np.mean(before.values))
                mu_a = float(np.mean(after.values))
                if mu_b < SPARSE_MEAN and mu_a < SPARSE_MEAN:
                    cells = cells[:8] + [INSUFFICIENT, ""]
                rows.append([
                    station.name, crime_class, pair_id,
                    format_month(before.start_month),
                    format_month(before.end_month),
                    format_month(after.start_month),
                    format_month(after.end_month),
                ] + cells)
    ws.write_text("stations_welch.csv", _csv_text(header, rows))


def cmd_changepoint(cfg: AnalysisConfig, ws: Workspace, records=None) -> None:
    if records is None:
        records = _analysis_records(cfg)
    for crime_class in (c.value for c in ANALYSIS_CLASSES):
        series = _class_series(records, crime_class, cfg)
        dec = stl_decompose(series, cfg.stl)
        trend_slope = slope(dec.trend)
        report = detect(trend_slope, cfg.mosum)
        class_slug = _slug(crime_class)
        ws.write_text(
            f"changepoint_{class_slug}.json",
            _json_text({
                "crime_class": crime_class,
                "slope_of": "trend",
                "start_month": format_month(trend_slope.start_month),
                "n": len(trend_slope),
                "report": report.to_json_dict(),
            }))

        # slope index k sits one month after observed index k
        vlines = [(k + 1, svgplot.RED) for k in report.change_points]
        bands = [(a + 1, b + 1, svgplot.ORANGE)
                 for a, b in report.intervals]
        top_panel = svgplot.Panel(
            title=f"monthly counts and trend, {crime_class}",
            curves=[(series.values.tolist(), svgplot.GRAY, "observed"),
                    (dec.trend.values.tolist(), svgplot.BLUE, "trend")],
            vlines=vlines, bands=bands)
        padded_trace = [math.nan] + report.trace.tolist()
        bottom_panel = svgplot.Panel(
            title="detection statistic on the trend slope",
            curves=[(padded_trace, svgplot.BLUE, "")],
            hlines=[(report.threshold, svgplot.RED)],
            vlines=vlines)
        ticks = _month_ticks(len(series), series.start_month)
        ws.write_text(f"changepoint_{class_slug}.svg",
                      svgplot.render_panels([top_panel, bottom_panel], ticks))


def cmd_segreg(cfg: AnalysisConfig, ws: Workspace, records=None) -> None:
    if records is None:
        records = _analysis_records(cfg)
    for crime_class in (c.value for c in ANALYSIS_CLASSES):
        series = _class_series(records, crime_class, cfg)
        dec = stl_decompose(series, cfg.stl)
        fits = {}
        stability = {}
        for target, target_series in (("observed", series),
                                      ("trend", dec.trend)):
            fits[target] = fit_segmented(target_series, cfg.segreg)
            stability[target] = stability_probe(
                target_series, cfg.segreg, runs=cfg.stability_runs)
        class_slug = _slug(crime_class)
        ws.write_text(
            f"segreg_{class_slug}.json",
            _json_text({
                "crime_class": crime_class,
                "start_month": format_month(series.start_month),
                "n": len(series),
                "observed": fits["observed"].to_json_dict(),
                "trend": fits["trend"].to_json_dict(),
                "stability": {t: s.to_json_dict()
                              for t, s in stability.items()},
            }))

        n = len(series)
        grid = np.arange(n, dtype=float)
        fit = fits["observed"]
        fitted = fit.predict(grid)
        vlines = [(psi, svgplot.RED) for psi in fit.breakpoints]
        xerr = [(lo, hi, float(fit.predict([psi])[0]), svgplot.GREEN)
                for (lo, hi), psi in zip(fit.breakpoint_intervals,
                                         fit.breakpoints)]
        panel = svgplot.Panel(
            title=f"piecewise-linear fit, {crime_class}",
            curves=[(series.values.tolist(), svgplot.GRAY, "observed"),
                    (fitted.tolist(), svgplot.BLUE, "fit"),
                    (dec.trend.values.tolist(), svgplot.ORANGE, "trend")],
            vlines=vlines, xerr=xerr)
        ticks = _month_ticks(n, series.start_month)
        ws.write_text(f"segreg_{class_slug}.svg",
                      svgplot.render_panels([panel], ticks))


def cmd_report_all(cfg: AnalysisConfig, ws: Workspace) -> None:
    if cfg.input is None:
        raise ConfigError("an input CSV is required (--input)")
    if is_normalized_store(cfg.input):
        try:
            records = read_normalized(cfg.input)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read record store: {exc}") from exc
    else:
        category_map = load_category_map(cfg.category_map)
        records, report = ingest_csv(cfg.input, category_map,
                                     window=cfg.window)
        buf = io.StringIO()
        write_normalized(records, buf)
        ws.write_text("normalized.csv", buf.getvalue())
        ws.write_text("ingest_report.json", _json_text(report.to_json_dict()))
    kept = [r for r in records if r.classification in ANALYSIS_CLASSES]
    if not kept:
        raise DataError("input contains no analyzable records")
    cmd_citywide(cfg, ws, records=kept)
    if cfg.geometry is not None:
        cmd_neighborhoods(cfg, ws, records=kept)
    if cfg.stations is not None:
        cmd_stations(cfg, ws, records=kept)
    cmd_changepoint(cfg, ws, records=kept)
    cmd_segreg(cfg, ws, records=kept)


_COMMANDS = {
    "ingest": cmd_ingest,
    "citywide": cmd_citywide,
    "neighborhoods": cmd_neighborhoods,
    "stations": cmd_stations,
    "changepoint": cmd_changepoint,
    "segreg": cmd_segreg,
    "report-all": cmd_report_all,
}

_COMMAND_HELP = {
    "ingest": "parse and classify an incident CSV into a record store",
    "citywide": "epoch comparison tables, histograms, and decompositions",
    "neighborhoods": "per-neighborhood comparison tables and decompositions",
    "stations": "per-station epoch comparison tables",
    "changepoint": "trend-slope change-point detection reports",
    "segreg": "piecewise-linear trend fits with stability checks",
    "report-all": "run every stage and write a full report",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendlens",
        description="Monthly crime-trend analysis pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=_COMMAND_HELP[name])
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--input", help="incident CSV or normalized record store")
        p.add_argument("--category-map", dest="category_map",
                       help="category collapse/classification INI file")
        p.add_argument("--geometry", help="neighborhood GeoJSON file")
        p.add_argument("--stations", help="station CSV (name,lat,lon,radius_m)")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--seed", type=int,
                       help="RNG seed (default: $TRENDLENS_SEED or 0)")
        p.add_argument("--w-trend", dest="w_trend", type=int,
                       help="trend smoothing window in months (odd)")
        p.add_argument("--mosum-g", dest="mosum_g", type=int,
                       help="detection bandwidth in months (default: 10)")
        p.add_argument("--eta", type=float,
                       help="minimum change-point spacing factor (default: 12)")
        p.add_argument("--epsilon", type=float,
                       help="threshold neighborhood factor (default: 0.1)")
        p.add_argument("--breakpoints", type=int,
                       help="piecewise-linear breakpoint count (default: 2)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        ws = Workspace(cfg.out)
        _COMMANDS[args.command](cfg, ws)
        ws.write_text("manifest.json", _json_text({
            "command": args.command,
            "config_hash": config_hash(cfg),
            "artifacts": sorted(a for a in ws.artifacts
                                if a != "manifest.json"),
        }))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except TrendlensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
