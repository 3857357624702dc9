"""Cyclone center detection: strict local pressure minima below a threshold."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from dslake.lang.ast import GeoBox
from dslake.cyclone.grid import GridSnapshot

DEFAULT_THRESHOLD_HPA = 1000.0


@dataclass(frozen=True)
class CycloneCenter:
    lat: float
    lon: float
    pressure: float
    timestamp: datetime
    grid_index: tuple[int, int]


def detect_centers(
    snapshot: GridSnapshot,
    threshold: float = DEFAULT_THRESHOLD_HPA,
    area: GeoBox | None = None,
) -> list[CycloneCenter]:
    """Interior cells below threshold and strictly below all 8 neighbors.

    Border cells are never centers. Results are sorted by (lat, lon),
    i.e. by grid index since spacings are positive.
    """
    minima = interior_minima(snapshot.values, threshold)
    centers = []
    for i, j, pressure in minima:
        lat = snapshot.lat_of(i)
        lon = snapshot.lon_of(j)
        if area is not None and not area.contains(lat, lon):
            continue
        centers.append(
            CycloneCenter(
                lat=lat,
                lon=lon,
                pressure=pressure,
                timestamp=snapshot.timestamp,
                grid_index=(i, j),
            )
        )
    return centers


def interior_minima(values: np.ndarray, threshold: float) -> list[tuple[int, int, float]]:
    """(i, j, value) for strict 8-neighborhood minima below threshold."""
    c = values[1:-1, 1:-1]
    mask = c < threshold
    for di, dj in (
        (-1, -1), (-1, 0), (-1, 1),
        (0, -1), (0, 1),
        (1, -1), (1, 0), (1, 1),
    ):
        neighbor = values[1 + di : values.shape[0] - 1 + di,
                          1 + dj : values.shape[1] - 1 + dj]
        mask &= c < neighbor
    out = []
    for i, j in np.argwhere(mask):
        out.append((int(i) + 1, int(j) + 1, float(values[i + 1, j + 1])))
    return out
