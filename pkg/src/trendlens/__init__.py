"""Monthly crime-trend analysis: ingestion, decomposition, inference,
change-point detection, segmented regression, and geospatial filters."""

from .errors import ConfigError, DataError, NumericalError, TrendlensError
from .series import (
    EpochCut,
    EpochSplit,
    MonthlySeries,
    SlopeSeries,
    aggregate_monthly,
    slope,
    split,
    summarize,
)
from .ingest import (
    CategoryMap,
    CrimeClass,
    IncidentRecord,
    IngestReport,
    ingest_csv,
    load_category_map,
)
from .stl import Decomposition, StlConfig, auto_trend_window, stl_decompose
from .inference import (
    WelchResult,
    WelchSummary,
    student_t_cdf,
    student_t_quantile,
    welch_test,
)
from .changepoint import ChangePointReport, MosumConfig, detect, mosum_threshold
from .segreg import (
    SegmentedFit,
    SegregConfig,
    StabilityReport,
    fit_segmented,
    fit_segmented_exhaustive,
    stability_probe,
)
from .geo import (
    GeoPoint,
    NeighborhoodSet,
    StationFilter,
    assign_neighborhood,
    haversine_m,
    load_geojson,
    load_stations,
    point_in_polygon,
    within_radius,
)

__version__ = "0.1.0"

__all__ = [
    "CategoryMap",
    "ChangePointReport",
    "ConfigError",
    "CrimeClass",
    "DataError",
    "Decomposition",
    "EpochCut",
    "EpochSplit",
    "GeoPoint",
    "IncidentRecord",
    "IngestReport",
    "MonthlySeries",
    "MosumConfig",
    "NeighborhoodSet",
    "NumericalError",
    "SegmentedFit",
    "SegregConfig",
    "SlopeSeries",
    "StabilityReport",
    "StationFilter",
    "StlConfig",
    "TrendlensError",
    "WelchResult",
    "WelchSummary",
    "aggregate_monthly",
    "assign_neighborhood",
    "auto_trend_window",
    "detect",
    "fit_segmented",
    "fit_segmented_exhaustive",
    "haversine_m",
    "ingest_csv",
    "load_category_map",
    "load_geojson",
    "load_stations",
    "mosum_threshold",
    "point_in_polygon",
    "slope",
    "split",
    "stability_probe",
    "stl_decompose",
    "student_t_cdf",
    "student_t_quantile",
    "summarize",
    "welch_test",
    "within_radius",
]
