"""Ground-truthed synthetic pressure datasets.

Each snapshot is a uniform background minus one Gaussian depression per
alive cyclone,

    p(x, t) = background - sum_i depth_i * exp(-d(x, c_i(t))^2 / (2 sigma_i^2))

with centers moving along great circles at constant speed and bearing.
The generator refuses overlapping cyclones: planted tracks must keep a
mutual distance of at least 3 * max(sigma) (and, for the random planner,
a tracking-safe floor) at all observation times.

Randomness enters only through the optional random planner; explicitly
listed cyclones always produce the exact fields above, so a spec with no
cyclones yields identical uniform snapshots whatever the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import datetime, timedelta

import numpy as np

from dslake.errors import SpecError
from dslake.lang.ast import GeoBox
from dslake.storage import DataFile
from dslake.times import iso_minutes, iso_seconds
from dslake.cyclone.ensemble import SplitMix64
from dslake.cyclone.geo import (
    EARTH_RADIUS_KM,
    classify_direction,
    destination_point,
    haversine_km,
    initial_bearing,
)
from dslake.cyclone.grid import GridSnapshot, render_body, render_grid_snapshot
from dslake.cyclone.track import CyclonePath

BACKGROUND_HPA = 1013.25

# the random planner keeps cyclones inside the area by this margin and
# mutually apart by the tracking-safe floor below
PLANT_MARGIN_DEG = 2.0
TRACKING_SAFE_KM = 1300.0


@dataclass(frozen=True)
class PlantedCyclone:
    t_start: datetime
    t_end: datetime
    lat: float
    lon: float
    bearing: float
    speed_kmh: float
    depth_hpa: float
    sigma_km: float

    def alive(self, ts: datetime) -> bool:
        return self.t_start <= ts <= self.t_end

    def center_at(self, ts: datetime) -> tuple[float, float]:
        hours = (ts - self.t_start).total_seconds() / 3600.0
        return destination_point(self.lat, self.lon, self.bearing, self.speed_kmh * hours)

    def clamped_center_at(self, ts: datetime) -> tuple[float, float]:
        ts = min(max(ts, self.t_start), self.t_end)
        return self.center_at(ts)


@dataclass(frozen=True)
class SyntheticSpec:
    dataset: str
    area: GeoBox
    start: datetime
    end: datetime
    step_hours: int = 6
    spacing_deg: float = 0.5
    background_hpa: float = BACKGROUND_HPA
    cyclones: tuple[PlantedCyclone, ...] = ()
    random_count: int = 0  # extra randomly planted cyclones
    random_north_east: int = 0  # how many of those head north-east

    def snapshot_times(self) -> list[datetime]:
        times = []
        ts = self.start
        while ts <= self.end:
            times.append(ts)
            ts = ts + timedelta(hours=self.step_hours)
        return times

    def grid_shape(self) -> tuple[int, int]:
        nlat = int((self.area.lat_max - self.area.lat_min) / self.spacing_deg) + 1
        nlon = int((self.area.lon_max - self.area.lon_min) / self.spacing_deg) + 1
        return nlat, nlon


@dataclass(frozen=True)
class GroundTruthPath:
    cyclone: PlantedCyclone
    times: tuple[datetime, ...]  # snapshot times the cyclone is observable
    positions: tuple[tuple[float, float], ...]  # true (unsnapped) centers
    end_time: datetime  # last observable snapshot time
    bearing: float | None  # first-to-last observed bearing
    sector: str | None

    def matches(self, path: CyclonePath, tolerance_km: float) -> bool:
        if len(path.centers) != len(self.times):
            return False
        for center, ts, (lat, lon) in zip(path.centers, self.times, self.positions):
            if center.timestamp != ts:
                return False
            if haversine_km(center.lat, center.lon, lat, lon) > tolerance_km:
                return False
        return True


@dataclass(frozen=True)
class GroundTruth:
    spec: SyntheticSpec
    seed: int
    paths: tuple[GroundTruthPath, ...]

    def paths_in_sector(self, sector: str) -> tuple[GroundTruthPath, ...]:
        return tuple(p for p in self.paths if p.sector == sector)

    def canonical_text(self) -> str:
        lines = ["GROUND-TRUTH"]
        for p in sorted(self.paths, key=lambda p: (p.times[0], p.positions[0])):
            bearing = "none" if p.bearing is None else f"{p.bearing:.4f}"
            lines.append(f"cyclone {iso_seconds(p.times[0])}")
            lines.append(f"  bearing {bearing}")
            lines.append(f"  depth {p.cyclone.depth_hpa:.4f}")
            lines.append(f"  end_time {iso_seconds(p.end_time)}")
            lines.append(f"  sector {p.sector or 'none'}")
            lines.append(f"  snapshots {len(p.times)}")
        return "\n".join(lines) + "\n"


_REPLAN_ATTEMPTS = 25


def generate_synthetic(
    spec: SyntheticSpec, seed: int = 0
) -> tuple[list[DataFile], GroundTruth]:
    """Produce snapshot files plus the planted truth used as a test oracle.

    Randomly planted cyclones are verified against the rendered bytes:
    every alive snapshot must show exactly one detectable minimum near
    the true center (two-decimal quantization can tie neighbor cells on
    a Gaussian's flat top, hiding the minimum from the strict 8-neighbor
    rule). A dirty plan is regenerated from a reseeded stream.
    """
    times = spec.snapshot_times()
    plan_seed = seed
    for attempt in range(_REPLAN_ATTEMPTS):
        cyclones = list(spec.cyclones)
        if spec.random_count:
            cyclones.extend(_plant_random(spec, plan_seed))
        _check_separation(cyclones, times, spec.step_hours)
        files = _render_files(spec, cyclones, times)
        if not spec.random_count or detection_is_clean(files, cyclones, spec):
            break
        plan_seed = (seed + 0x9E3779B97F4A7C15 * (attempt + 1)) & ((1 << 64) - 1)
    else:
        raise SpecError("could not plant cleanly detectable cyclones; relax the spec")

    truth_paths = []
    for c in cyclones:
        observed = [ts for ts in times if c.alive(ts)]
        if not observed:
            raise SpecError("planted cyclone observable in no snapshot")
        positions = tuple(c.center_at(ts) for ts in observed)
        if len(observed) > 1 and positions[0] != positions[-1]:
            bearing = initial_bearing(*positions[0], *positions[-1])
            sector = classify_direction(bearing)
        else:
            bearing = None
            sector = None
        truth_paths.append(
            GroundTruthPath(
                cyclone=c,
                times=tuple(observed),
                positions=positions,
                end_time=observed[-1],
                bearing=bearing,
                sector=sector,
            )
        )
    truth = GroundTruth(
        spec=replace(spec, cyclones=tuple(cyclones), random_count=0, random_north_east=0),
        seed=seed,
        paths=tuple(truth_paths),
    )
    return files, truth


def _render_files(
    spec: SyntheticSpec, cyclones: list[PlantedCyclone], times: list[datetime]
) -> list[DataFile]:
    nlat, nlon = spec.grid_shape()
    lats = spec.area.lat_min + spec.spacing_deg * np.arange(nlat)
    lons = spec.area.lon_min + spec.spacing_deg * np.arange(nlon)
    lat_rad = np.radians(lats)[:, None]

    uniform = np.full((nlat, nlon), spec.background_hpa)
    uniform_body = render_body(uniform)

    files = []
    for ts in times:
        alive = [c for c in cyclones if c.alive(ts)]
        if alive:
            field = uniform.copy()
            for c in alive:
                clat, clon = c.center_at(ts)
                d = _haversine_field(clat, clon, lat_rad, lons)
                field -= c.depth_hpa * np.exp(-(d * d) / (2.0 * c.sigma_km**2))
            snapshot = GridSnapshot(
                lat0=spec.area.lat_min,
                lon0=spec.area.lon_min,
                dlat=spec.spacing_deg,
                dlon=spec.spacing_deg,
                nlat=nlat,
                nlon=nlon,
                timestamp=ts,
                values=field,
            )
            data = render_grid_snapshot(snapshot)
        else:
            header = (
                f"grid {_num(spec.area.lat_min)} {_num(spec.area.lon_min)}"
                f" {_num(spec.spacing_deg)} {_num(spec.spacing_deg)}"
                f" {nlat} {nlon} {iso_minutes(ts)}\n"
            )
            data = header.encode() + uniform_body
        files.append(DataFile.from_bytes(spec.dataset, ts, ts, data))
    return files


def detection_is_clean(
    files: list[DataFile],
    cyclones: list[PlantedCyclone],
    spec: SyntheticSpec,
    threshold: float = 1000.0,
) -> bool:
    """Check that each alive cyclone shows as exactly one strict minimum.

    Works on the parsed-back bytes so it sees exactly what the engine
    will see, quantization included.
    """
    from dslake.cyclone.detect import interior_minima
    from dslake.cyclone.grid import parse_grid_snapshot

    tolerance_km = 1.5 * spec.spacing_deg * 111.0
    for f in files:
        alive = [c for c in cyclones if c.alive(f.t0)]
        if not alive:
            continue
        snapshot = parse_grid_snapshot(f.data)
        minima = interior_minima(snapshot.values, threshold)
        if len(minima) != len(alive):
            return False
        positions = [
            (snapshot.lat_of(i), snapshot.lon_of(j)) for i, j, _ in minima
        ]
        for c in alive:
            truth = c.center_at(f.t0)
            near = [
                p for p in positions if haversine_km(*truth, *p) <= tolerance_km
            ]
            if len(near) != 1:
                return False
    return True


def _check_separation(
    cyclones: list[PlantedCyclone], times: list[datetime], step_hours: int
) -> None:
    step = timedelta(hours=step_hours)
    sigma_max = max((c.sigma_km for c in cyclones), default=0.0)
    required = 3.0 * sigma_max
    for i, a in enumerate(cyclones):
        for b in cyclones[i + 1 :]:
            if a.t_start > b.t_end + step or b.t_start > a.t_end + step:
                continue  # lifespans (plus one step) disjoint
            for ts in times:
                in_a = a.t_start - step <= ts <= a.t_end + step
                in_b = b.t_start - step <= ts <= b.t_end + step
                if not (in_a and in_b):
                    continue
                pa = a.clamped_center_at(ts)
                pb = b.clamped_center_at(ts)
                if haversine_km(*pa, *pb) <= required:
                    raise SpecError(
                        f"cyclones overlap at {iso_seconds(ts)}:"
                        f" separation <= 3 * max sigma ({required:.0f} km)"
                    )


def _plant_random(spec: SyntheticSpec, seed: int) -> list[PlantedCyclone]:
    """Randomly place cyclones that the tracker can provably keep apart."""
    if spec.random_north_east > spec.random_count:
        raise SpecError("more north-east cyclones requested than total")
    rng = SplitMix64(seed)
    box = spec.area
    lat_lo = box.lat_min + PLANT_MARGIN_DEG
    lat_hi = box.lat_max - PLANT_MARGIN_DEG
    lon_lo = box.lon_min + PLANT_MARGIN_DEG
    lon_hi = box.lon_max - PLANT_MARGIN_DEG
    if lat_lo >= lat_hi or lon_lo >= lon_hi:
        raise SpecError("area too small for random planting")
    horizon_h = (spec.end - spec.start).total_seconds() / 3600.0

    planted: list[PlantedCyclone] = []
    other_sectors = (0.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0)
    for k in range(spec.random_count):
        north_east = k < spec.random_north_east
        for _ in range(4000):
            if north_east:
                bearing = 30.0 + 30.0 * rng.next_unit()
            else:
                center = other_sectors[rng.next_u64() % len(other_sectors)]
                bearing = (center - 10.0 + 20.0 * rng.next_unit()) % 360.0
            duration_h = 36.0 + 36.0 * rng.next_unit()
            speed = 25.0 + (min(70.0, 2200.0 / duration_h) - 25.0) * rng.next_unit()
            length_km = speed * duration_h
            # approximate displacement to sample a feasible start point
            dlat = length_km * math.cos(math.radians(bearing)) / 111.0
            s_lat_lo = max(lat_lo, lat_lo - min(0.0, dlat))
            s_lat_hi = min(lat_hi, lat_hi - max(0.0, dlat))
            if s_lat_lo >= s_lat_hi:
                continue
            lat = s_lat_lo + (s_lat_hi - s_lat_lo) * rng.next_unit()
            coslat = math.cos(math.radians(lat + dlat / 2.0))
            dlon = length_km * math.sin(math.radians(bearing)) / (111.0 * max(coslat, 0.2))
            s_lon_lo = max(lon_lo, lon_lo - min(0.0, dlon))
            s_lon_hi = min(lon_hi, lon_hi - max(0.0, dlon))
            if s_lon_lo >= s_lon_hi:
                continue
            lon = s_lon_lo + (s_lon_hi - s_lon_lo) * rng.next_unit()
            start_offset_h = (horizon_h - duration_h) * rng.next_unit()
            t_start = spec.start + timedelta(hours=start_offset_h)
            candidate = PlantedCyclone(
                t_start=t_start,
                t_end=t_start + timedelta(hours=duration_h),
                lat=lat,
                lon=lon,
                bearing=bearing,
                speed_kmh=speed,
                depth_hpa=25.0 + 30.0 * rng.next_unit(),
                sigma_km=180.0 + 140.0 * rng.next_unit(),
            )
            end_lat, end_lon = candidate.center_at(candidate.t_end)
            if not (lat_lo <= end_lat <= lat_hi and lon_lo <= end_lon <= lon_hi):
                continue
            if _safe_against(candidate, planted, spec):
                planted.append(candidate)
                break
        else:
            raise SpecError(
                f"could not place cyclone {k} without overlap; relax the spec"
            )
    return planted


def _safe_against(
    candidate: PlantedCyclone, others: list[PlantedCyclone], spec: SyntheticSpec
) -> bool:
    step = timedelta(hours=spec.step_hours)
    for other in others:
        if candidate.t_start > other.t_end + step or other.t_start > candidate.t_end + step:
            continue
        lo = min(candidate.t_start, other.t_start) - step
        hi = max(candidate.t_end, other.t_end) + step
        required = max(3.0 * max(candidate.sigma_km, other.sigma_km), TRACKING_SAFE_KM)
        ts = lo
        while ts <= hi:
            pa = candidate.clamped_center_at(ts)
            pb = other.clamped_center_at(ts)
            if haversine_km(*pa, *pb) <= required:
                return False
            ts += step
    return True


def parse_spec_text(text: str) -> SyntheticSpec:
    """Parse the line-oriented synthetic-spec format.

        dataset d1
        area <lat_min> <lon_min> <lat_max> <lon_max>
        time <ISO start> <ISO end>
        step <hours>
        spacing <degrees>
        background <hPa>                       # optional
        cyclone t_start=<ISO> t_end=<ISO> lat=<deg> lon=<deg> bearing=<deg>
                speed=<km/h> depth=<hPa> sigma=<km>
        random-cyclones count=<n> northeast=<m>
    """
    from dslake.times import parse_utc

    values: dict[str, str] = {}
    cyclones: list[PlantedCyclone] = []
    random_count = 0
    random_ne = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "cyclone":
            kv = dict(part.split("=", 1) for part in rest.split())
            try:
                cyclones.append(
                    PlantedCyclone(
                        t_start=parse_utc(kv["t_start"]),
                        t_end=parse_utc(kv["t_end"]),
                        lat=float(kv["lat"]),
                        lon=float(kv["lon"]),
                        bearing=float(kv["bearing"]),
                        speed_kmh=float(kv["speed"]),
                        depth_hpa=float(kv["depth"]),
                        sigma_km=float(kv["sigma"]),
                    )
                )
            except KeyError as exc:
                raise SpecError(f"line {lineno}: cyclone missing field {exc}") from None
        elif key == "random-cyclones":
            kv = dict(part.split("=", 1) for part in rest.split())
            random_count = int(kv.get("count", "0"))
            random_ne = int(kv.get("northeast", "0"))
        elif key in ("dataset", "area", "time", "step", "spacing", "background"):
            values[key] = rest
        else:
            raise SpecError(f"line {lineno}: unknown spec key {key!r}")

    for required in ("dataset", "area", "time"):
        if required not in values:
            raise SpecError(f"spec is missing the {required!r} line")
    corners = [float(x) for x in values["area"].split()]
    if len(corners) != 4:
        raise SpecError("area takes four numbers: lat_min lon_min lat_max lon_max")
    start_s, end_s = values["time"].split()
    return SyntheticSpec(
        dataset=values["dataset"],
        area=GeoBox(
            lat_min=min(corners[0], corners[2]),
            lon_min=min(corners[1], corners[3]),
            lat_max=max(corners[0], corners[2]),
            lon_max=max(corners[1], corners[3]),
        ),
        start=parse_utc(start_s),
        end=parse_utc(end_s),
        step_hours=int(values.get("step", "6")),
        spacing_deg=float(values.get("spacing", "0.5")),
        background_hpa=float(values.get("background", str(BACKGROUND_HPA))),
        cyclones=tuple(cyclones),
        random_count=random_count,
        random_north_east=random_ne,
    )


def _haversine_field(
    clat: float, clon: float, lat_rad: np.ndarray, lons: np.ndarray
) -> np.ndarray:
    p1 = math.radians(clat)
    dl = np.radians(lons[None, :] - clon)
    dp = lat_rad - p1
    a = np.sin(dp / 2.0) ** 2 + math.cos(p1) * np.cos(lat_rad) * np.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(a))


def _num(x: float) -> str:
    s = repr(float(x))
    if "e" in s or "E" in s:
        s = f"{x:.12f}".rstrip("0")
        if s.endswith("."):
            s += "0"
    return s
