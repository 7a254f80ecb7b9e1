"""Great-circle radius filters and point-in-polygon neighborhood assignment.

Conventions are boundary-inclusive on both the radius test and polygon
edges, so a record sitting exactly on a station circle or a neighborhood
border is counted rather than dropped.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class StationFilter:
    name: str
    center: GeoPoint
    radius_m: float = 450.0

    def __post_init__(self):
        if self.radius_m <= 0:
            raise ValueError("radius_m must be positive")


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters on a spherical Earth."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    s = (math.sin(dphi / 2.0) ** 2
         + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(s)))


def within_radius(records, station: StationFilter) -> list:
    """Records within radius_m of the station center, boundary inclusive."""
    center = station.center
    return [r for r in records
            if haversine_m(center, GeoPoint(r.lat, r.lon)) <= station.radius_m]


def _on_segment(px, py, ax, ay, bx, by) -> bool:
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0.0:
        return False
    return (min(ax, bx) <= px <= max(ax, bx)
            and min(ay, by) <= py <= max(ay, by))


def point_in_polygon(point: GeoPoint, vertices) -> bool:
    """Even-odd ray-casting test in (lon, lat) coordinates.

    Boundary points count as inside.
    """
    px, py = point.lon, point.lat
    n = len(vertices)
    inside = False
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        ax, ay = a.lon, a.lat
        bx, by = b.lon, b.lat
        if _on_segment(px, py, ax, ay, bx, by):
            return True
        # horizontal ray to the right; half-open rule on edge endpoints
        if (ay > py) != (by > py):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_cross:
                inside = not inside
    return inside


@dataclass(frozen=True)
class NeighborhoodSet:
    """Named simple polygons checked in declared order."""

    polygons: tuple[tuple[str, tuple[GeoPoint, ...]], ...]

    def __post_init__(self):
        names = [name for name, _ in self.polygons]
        if len(set(names)) != len(names):
            raise ValueError("polygon names must be unique")
        for name, verts in self.polygons:
            if len(verts) < 3:
                raise ValueError(f"polygon {name!r} needs at least 3 vertices")
            area = 0.0
            for i in range(len(verts)):
                a, b = verts[i], verts[(i + 1) % len(verts)]
                area += a.lon * b.lat - b.lon * a.lat
            if area == 0.0:
                raise ValueError(f"polygon {name!r} has zero area")

    def names(self) -> list[str]:
        return [name for name, _ in self.polygons]


def assign_neighborhood(point: GeoPoint, neighborhoods: NeighborhoodSet):
    """Name of the first polygon containing the point, else None."""
    for name, verts in neighborhoods.polygons:
        if point_in_polygon(point, verts):
            return name
    return None


def load_geojson(path) -> NeighborhoodSet:
    """Read named Polygon features from a GeoJSON FeatureCollection."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise ValueError("geometry file must be a FeatureCollection")
    polygons = []
    for feature in doc.get("features", []):
        geometry = feature.get("geometry") or {}
        if geometry.get("type") != "Polygon":
            raise ValueError("only Polygon features are supported")
        rings = geometry.get("coordinates") or []
        if len(rings) != 1:
            raise ValueError("polygons with holes are not supported")
        props = feature.get("properties") or {}
        name = props.get("name")
        if not name:
            raise ValueError("every polygon feature needs a 'name' property")
        ring = rings[0]
        if len(ring) >= 2 and ring[0] == ring[-1]:
            ring = ring[:-1]  # drop the GeoJSON closing vertex
        verts = tuple(GeoPoint(lat=c[1], lon=c[0]) for c in ring)
        polygons.append((str(name), verts))
    return NeighborhoodSet(tuple(polygons))


def load_stations(path) -> list[StationFilter]:
    """Read stations from CSV with columns name, lat, lon, radius_m."""
    stations = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"name", "lat", "lon"}
        have = set(reader.fieldnames or [])
        if not required <= have:
            raise ValueError(f"station CSV must have columns {sorted(required)}")
        for row in reader:
            radius = row.get("radius_m")
            stations.append(StationFilter(
                name=row["name"],
                center=GeoPoint(lat=float(row["lat"]), lon=float(row["lon"])),
                radius_m=float(radius) if radius not in (None, "") else 450.0,
            ))
    return stations
