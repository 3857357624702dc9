"""Parametric description of a tracked cyclone path.

The pressure structure (central/ambient pressure, depth, radius) is read
from a densified window around the path's final center; motion parameters
come from the center sequence itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

import numpy as np

from dslake.errors import DegenerateBearing
from dslake.cyclone.geo import (
    EARTH_RADIUS_KM,
    classify_direction,
    haversine_km,
    initial_bearing,
)
from dslake.cyclone.grid import GridSnapshot, densify
from dslake.cyclone.track import CyclonePath

WINDOW_HALF_DEG = 5.0  # the analysis window is 10 x 10 degrees
RADIUS_DEPTH_FRACTION = 0.75
DEFAULT_DENSIFY_FACTOR = 4


@dataclass(frozen=True)
class CycloneParams:
    end_time: datetime
    central_pressure: float  # hPa
    ambient_pressure: float  # hPa
    depth: float  # ambient - central, hPa, >= 0
    radius_km: float
    mean_speed_kmh: float
    average_bearing: float | None  # degrees in [0, 360); None for length-1 paths
    direction_sector: str | None

    semantic_type = "cyclone-params"

    def portable_text(self) -> str:
        """Exact key=value rendering for the external command contract."""
        from dslake.times import iso_seconds

        bearing = "none" if self.average_bearing is None else repr(self.average_bearing)
        sector = self.direction_sector or "none"
        return (
            f"ambient_pressure={self.ambient_pressure!r}\n"
            f"average_bearing={bearing}\n"
            f"central_pressure={self.central_pressure!r}\n"
            f"depth={self.depth!r}\n"
            f"direction_sector={sector}\n"
            f"end_time={iso_seconds(self.end_time)}\n"
            f"mean_speed_kmh={self.mean_speed_kmh!r}\n"
            f"radius_km={self.radius_km!r}\n"
        )

    @staticmethod
    def from_portable_text(text: str) -> "CycloneParams":
        from dslake.times import parse_utc

        fields = dict(
            line.split("=", 1) for line in text.splitlines() if line.strip()
        )
        bearing = fields["average_bearing"]
        sector = fields["direction_sector"]
        return CycloneParams(
            end_time=parse_utc(fields["end_time"]),
            central_pressure=float(fields["central_pressure"]),
            ambient_pressure=float(fields["ambient_pressure"]),
            depth=float(fields["depth"]),
            radius_km=float(fields["radius_km"]),
            mean_speed_kmh=float(fields["mean_speed_kmh"]),
            average_bearing=None if bearing == "none" else float(bearing),
            direction_sector=None if sector == "none" else sector,
        )


def parametrize(
    path: CyclonePath,
    snapshot_for: Callable[[datetime], GridSnapshot],
    k: int = DEFAULT_DENSIFY_FACTOR,
) -> CycloneParams:
    """Extract CycloneParams from a path and its final snapshot.

    ``snapshot_for`` must return the snapshot holding the given timestamp.
    """
    if not path.centers:
        raise ValueError("cannot parametrize an empty path")
    last = path.centers[-1]
    coarse = _crop_to_window(snapshot_for(last.timestamp), last.lat, last.lon)
    snap = densify(coarse, k)

    i_lo, i_hi = _index_window(snap.lat0, snap.dlat, snap.nlat, last.lat)
    j_lo, j_hi = _index_window(snap.lon0, snap.dlon, snap.nlon, last.lon)
    window = snap.values[i_lo : i_hi + 1, j_lo : j_hi + 1]

    flat_min = int(np.argmin(window))
    mi, mj = divmod(flat_min, window.shape[1])
    central = float(window[mi, mj])
    clat = snap.lat_of(i_lo + mi)
    clon = snap.lon_of(j_lo + mj)

    boundary = np.ones(window.shape, dtype=bool)
    boundary[1:-1, 1:-1] = False
    ambient = float(window[boundary].max())
    depth = max(ambient - central, 0.0)

    radius = _contour_radius(snap, window, i_lo, j_lo, mi, mj, clat, clon, central, depth)

    speed = 0.0
    if len(path.centers) > 1:
        length = sum(
            haversine_km(a.lat, a.lon, b.lat, b.lon)
            for a, b in zip(path.centers, path.centers[1:])
        )
        hours = (path.centers[-1].timestamp - path.centers[0].timestamp).total_seconds() / 3600.0
        speed = length / hours

    first = path.centers[0]
    try:
        bearing = initial_bearing(first.lat, first.lon, last.lat, last.lon)
        sector = classify_direction(bearing)
    except DegenerateBearing:
        bearing = None
        sector = None

    return CycloneParams(
        end_time=last.timestamp,
        central_pressure=central,
        ambient_pressure=ambient,
        depth=depth,
        radius_km=radius,
        mean_speed_kmh=speed,
        average_bearing=bearing,
        direction_sector=sector,
    )


def _index_window(x0: float, dx: float, n: int, center: float) -> tuple[int, int]:
    lo = math.ceil((center - WINDOW_HALF_DEG - x0) / dx - 1e-9)
    hi = math.floor((center + WINDOW_HALF_DEG - x0) / dx + 1e-9)
    return max(lo, 0), min(hi, n - 1)


def _crop_to_window(snap: GridSnapshot, lat: float, lon: float) -> GridSnapshot:
    """Trim to the coarse cells covering the analysis window.

    Bilinear refinement is local to each coarse cell, so a crop aligned
    to coarse nodes leaves every dense value inside the window unchanged
    while keeping the refinement cost proportional to the window.
    """
    i_lo, i_hi = _index_window(snap.lat0, snap.dlat, snap.nlat, lat)
    j_lo, j_hi = _index_window(snap.lon0, snap.dlon, snap.nlon, lon)
    i_lo, i_hi = max(i_lo - 1, 0), min(i_hi + 1, snap.nlat - 1)
    j_lo, j_hi = max(j_lo - 1, 0), min(j_hi + 1, snap.nlon - 1)
    if (i_lo, i_hi, j_lo, j_hi) == (0, snap.nlat - 1, 0, snap.nlon - 1):
        return snap
    return GridSnapshot(
        lat0=snap.lat0 + i_lo * snap.dlat,
        lon0=snap.lon0 + j_lo * snap.dlon,
        dlat=snap.dlat,
        dlon=snap.dlon,
        nlat=i_hi - i_lo + 1,
        nlon=j_hi - j_lo + 1,
        timestamp=snap.timestamp,
        values=snap.values[i_lo : i_hi + 1, j_lo : j_hi + 1],
    )


def _contour_radius(
    snap: GridSnapshot,
    window: np.ndarray,
    i_lo: int,
    j_lo: int,
    mi: int,
    mj: int,
    clat: float,
    clon: float,
    central: float,
    depth: float,
) -> float:
    """Distance from the pressure minimum to the 0.75-depth contour.

    The radius is the distance to the nearest window node at or above
    central + 0.75 * depth, the minimum itself excluded. If no node
    qualifies the window diagonal is returned as a conservative bound.
    """
    lats = snap.lat0 + snap.dlat * (i_lo + np.arange(window.shape[0]))
    lons = snap.lon0 + snap.dlon * (j_lo + np.arange(window.shape[1]))
    dist = _haversine_grid(clat, clon, lats, lons)
    qualifies = window >= central + RADIUS_DEPTH_FRACTION * depth
    qualifies[mi, mj] = False
    if not qualifies.any():
        return float(dist.max())
    return float(dist[qualifies].min())


def _haversine_grid(lat: float, lon: float, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    p1 = math.radians(lat)
    p2 = np.radians(lats)[:, None]
    dl = np.radians(lons[None, :] - lon)
    dp = p2 - p1
    a = np.sin(dp / 2.0) ** 2 + math.cos(p1) * np.cos(p2) * np.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(a))
