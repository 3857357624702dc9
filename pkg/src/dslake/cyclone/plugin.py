"""Registration of the cyclone domain library and the BSM package.

Procedure contract with the engine:

  * extractor(data, MapContext) -> (timestamp, [CycloneCenter])
  * combiner([(timestamp, [CycloneCenter])], ReduceContext) -> [DomainObject]
  * filter(object params dict, value) -> bool
  * builtin package procedure(bindings dict) -> outputs dict

Extraction caches interior-minima scans by body digest: snapshots are
content-addressed, so identical bodies (the common all-background case)
are scanned once.
"""

from __future__ import annotations

import hashlib
from collections import OrderedDict
from datetime import datetime, timedelta

from dslake.errors import CombinerFailure, FormatError
from dslake.registry import (
    DomainLibraryDescriptor,
    DomainObject,
    ExecutionMode,
    KnowledgeRegistry,
    MapContext,
    ObjectTypeInfo,
    PackageDescriptor,
    PackageInput,
    PackageOutputDecl,
    Placement,
    ReduceContext,
    StructureLevel,
)
from dslake.hybrid import IndexedSeries
from dslake.cyclone.detect import DEFAULT_THRESHOLD_HPA, CycloneCenter, interior_minima
from dslake.cyclone.grid import parse_grid_snapshot, parse_header
from dslake.cyclone.params import DEFAULT_DENSIFY_FACTOR, parametrize
from dslake.cyclone.surrogate import GAUGES, bsm_surrogate
from dslake.cyclone.track import DEFAULT_GATE_SPEED_KMH, track

LIBRARY_NAME = "cyclone"
OBJECT_TYPE = "cyclone-path"
FILE_KIND = "grid"

OUTPUT_PARAMS = (
    ("Bearing", "float"),
    ("Depth", "float"),
    ("Direction", "string"),
    ("EndTime", "datetime"),
    ("MeanSpeed", "float"),
    ("Pressure", "float"),
    ("Radius", "float"),
    ("StartTime", "datetime"),
    ("cyclone", "cyclone-params"),
)

_minima_cache: OrderedDict[tuple, list] = OrderedDict()
_MINIMA_CACHE_MAX = 8192

_snapshot_cache: OrderedDict[str, object] = OrderedDict()
_SNAPSHOT_CACHE_MAX = 256


def extract_centers(data: bytes, ctx: MapContext) -> tuple[datetime, list[CycloneCenter]]:
    threshold = float(ctx.params.get("threshold", DEFAULT_THRESHOLD_HPA))
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(1, f"not UTF-8 text: {exc}") from None
    header, _, body = text.partition("\n")
    lat0, lon0, dlat, dlon, nlat, nlon, ts = parse_header(header)

    if ctx.time is not None and not ctx.time.contains(ts):
        return ts, []

    key = (hashlib.sha256(body.encode()).hexdigest(), threshold, nlat, nlon)
    minima = _minima_cache.get(key)
    if minima is None:
        snapshot = parse_grid_snapshot(data)  # full validation on first sight
        minima = interior_minima(snapshot.values, threshold)
        _minima_cache[key] = minima
        if len(_minima_cache) > _MINIMA_CACHE_MAX:
            _minima_cache.popitem(last=False)

    centers = []
    for i, j, pressure in minima:
        lat = lat0 + i * dlat
        lon = lon0 + j * dlon
        if ctx.area is not None and not ctx.area.contains(lat, lon):
            continue
        centers.append(
            CycloneCenter(
                lat=lat, lon=lon, pressure=pressure, timestamp=ts, grid_index=(i, j)
            )
        )
    return ts, centers


def _snapshot_accessor(ctx: ReduceContext):
    def snapshot_for(ts: datetime):
        file_id = ctx.file_for(ts)
        if not file_id:
            raise CombinerFailure(f"no snapshot file covers {ts}")
        snapshot = _snapshot_cache.get(file_id)  # file ids are content hashes
        if snapshot is None:
            snapshot = parse_grid_snapshot(ctx.read_file(file_id))
            _snapshot_cache[file_id] = snapshot
            if len(_snapshot_cache) > _SNAPSHOT_CACHE_MAX:
                _snapshot_cache.popitem(last=False)
        return snapshot

    return snapshot_for


def combine_paths(
    center_sets: list[tuple[datetime, list[CycloneCenter]]],
    ctx: ReduceContext,
) -> list[DomainObject]:
    gate_speed = float(ctx.params.get("gate_speed", DEFAULT_GATE_SPEED_KMH))
    k = int(ctx.params.get("densify", DEFAULT_DENSIFY_FACTOR))
    paths = track(center_sets, gate_speed)
    snapshot_for = _snapshot_accessor(ctx)
    objects = []
    for path in paths:
        params = parametrize(path, snapshot_for, k)
        provenance = []
        for center in path.centers:
            file_id = ctx.file_for(center.timestamp)
            if file_id and (not provenance or provenance[-1] != file_id):
                provenance.append(file_id)
        objects.append(
            DomainObject(
                object_id=path.path_id,
                object_type=OBJECT_TYPE,
                params={
                    "Bearing": params.average_bearing,
                    "Depth": params.depth,
                    "Direction": params.direction_sector,
                    "EndTime": params.end_time,
                    "MeanSpeed": params.mean_speed_kmh,
                    "Pressure": params.central_pressure,
                    "Radius": params.radius_km,
                    "StartTime": path.start_time,
                    "cyclone": params,
                },
                provenance=tuple(provenance),
            )
        )
    return objects


def filter_direction(params: dict, value: str) -> bool:
    return params.get("Direction") == value


def bsm_builtin(bindings: dict) -> dict:
    start = bindings["startTime"]
    cyclone = bindings["cyclone"]
    horizon: timedelta = bindings["horizon"]
    horizon_hours = int(horizon.total_seconds() // 3600)
    by_index = {
        gauge: bsm_surrogate(cyclone, start, horizon_hours, gauge) for gauge in GAUGES
    }
    return {"level": IndexedSeries(by_index)}


def library_descriptor() -> DomainLibraryDescriptor:
    return DomainLibraryDescriptor(
        name=LIBRARY_NAME,
        object_types=(
            ObjectTypeInfo(
                name=OBJECT_TYPE,
                aliases=("cyclon-path",),
                structure_level=StructureLevel.HIGH_LEVEL,
                output_params=OUTPUT_PARAMS,
                fragment_type="center-set",
            ),
        ),
        extractors=((FILE_KIND, "cyclone.extract_centers"),),
        combiners=((OBJECT_TYPE, "cyclone.combine_paths"),),
        filters=((OBJECT_TYPE, "direction", "cyclone.filter_direction"),),
        keyword_aliases=(("directon", "direction"),),
    )


def bsm_descriptor() -> PackageDescriptor:
    return PackageDescriptor(
        name="BSM",
        inputs=(
            PackageInput("startTime", "datetime", required=True),
            PackageInput("cyclone", "cyclone-params", required=True),
            PackageInput("horizon", "duration", required=False, default="96h"),
        ),
        outputs=(PackageOutputDecl("level", "timeseries-cm", indexable=True),),
        execution_mode=ExecutionMode.BUILTIN,
        placement=Placement.ON_AGGREGATOR,
        procedure="cyclone.bsm",
    )


def bsm_external_descriptor(name: str = "BSM", python_exe: str | None = None) -> PackageDescriptor:
    """BSM wrapped as an external command (same surrogate underneath)."""
    import sys

    exe = python_exe or sys.executable
    template = (
        f"{exe} -m dslake.cyclone.bsm_cmd"
        " --start {input:startTime} --cyclone {input:cyclone}"
        " --horizon {input:horizon} --out {outdir}"
    )
    return PackageDescriptor(
        name=name,
        inputs=(
            PackageInput("startTime", "datetime", required=True),
            PackageInput("cyclone", "cyclone-params", required=True),
            PackageInput("horizon", "duration", required=False, default="96h"),
        ),
        outputs=(PackageOutputDecl("level", "timeseries-cm", indexable=True),),
        execution_mode=ExecutionMode.EXTERNAL_COMMAND,
        placement=Placement.ON_AGGREGATOR,
        command_template=template,
    )


def register_cyclone_domain(registry: KnowledgeRegistry) -> KnowledgeRegistry:
    registry.register_domain_library(
        library_descriptor(),
        procedures={
            "cyclone.extract_centers": extract_centers,
            "cyclone.combine_paths": combine_paths,
            "cyclone.filter_direction": filter_direction,
        },
    )
    registry.register_package(bsm_descriptor(), procedure=bsm_builtin)
    return registry
