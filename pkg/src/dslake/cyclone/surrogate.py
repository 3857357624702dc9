"""Deterministic Baltic sea-level surrogate.

A stub standing in for the real surge model: the hourly level response is
a Gaussian pulse in time centered on the cyclone's end time, scaled by an
inverse-barometer coefficient and an approach-direction weight,

    level(t) = k_ib * depth * exp(-((t - end_time) / sigma)^2) * w(bearing)
    w(theta) = max(0, cos(theta - 45 deg))

with k_ib = 1 cm/hPa and sigma = 12 h. The constants are declared stub
parameters, not physical claims. A path without a defined bearing gets
w = 0. Gauges are addressed by grid index; only the Saint-Petersburg
gauge (440, 414) is registered.
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta

from dslake.errors import UnknownGauge
from dslake.cyclone.params import CycloneParams

K_IB_CM_PER_HPA = 1.0
RESPONSE_SIGMA_HOURS = 12.0
WORST_BEARING_DEG = 45.0
DEFAULT_HORIZON_HOURS = 96

GAUGES = {(440, 414): "saint-petersburg"}


def bearing_weight(bearing_deg: float | None) -> float:
    if bearing_deg is None:
        return 0.0
    return max(0.0, math.cos(math.radians(bearing_deg - WORST_BEARING_DEG)))


def bsm_surrogate(
    params: CycloneParams,
    start: datetime,
    horizon_hours: int = DEFAULT_HORIZON_HOURS,
    gauge: tuple[int, int] = (440, 414),
) -> list[tuple[datetime, float]]:
    """Hourly level series in cm from start to start + horizon inclusive."""
    if gauge not in GAUGES:
        raise UnknownGauge(f"no gauge at grid index {gauge}")
    if horizon_hours < 1:
        raise ValueError("horizon must be at least one hour")
    w = bearing_weight(params.average_bearing)
    series = []
    for hour in range(horizon_hours + 1):
        t = start + timedelta(hours=hour)
        x = (t - params.end_time).total_seconds() / 3600.0 / RESPONSE_SIGMA_HOURS
        level = K_IB_CM_PER_HPA * params.depth * math.exp(-x * x) * w
        series.append((t, level))
    return series
