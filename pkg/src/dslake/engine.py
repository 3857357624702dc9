"""Fixed map/reduce execution of validated queries.

One map stage runs the domain extractor per file on the file's serving
node; one reduce stage stitches fragments into high-level objects,
applies filters, fans simulate statements out per selected object, and
assembles the result document. There is no shuffle and no multi-stage
chaining.

Determinism contract: for fixed (request, dataset bytes, registry) the
canonical result document is byte-identical whatever the node count, the
map completion order, or any survivable failure state. Everything the
reduce consumes is content-addressed, fragments are canonically ordered
before aggregation, and node-dependent facts stay out of the canonical
text.

Map tasks for distinct files may run concurrently (one thread per
simulated node by default); reduce is a single sequential stage. One
submit at a time per engine instance.
"""

from __future__ import annotations

import hashlib
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from threading import Lock
from typing import Any

from dslake.errors import (
    CombinerFailure,
    DslakeError,
    EngineError,
    ExtractorFailure,
)
from dslake.hybrid import PackageInvocation, evaluate_binding, invoke
from dslake.lang.parser import parse
from dslake.lang.validate import SimulatePlan, ValidatedQuery, validate
from dslake.registry import (
    DomainObject,
    KnowledgeRegistry,
    MapContext,
    Placement,
    ReduceContext,
)
from dslake.report import (
    Diagnostics,
    ObjectRecord,
    ResultDocument,
    SimulationRecord,
)
from dslake.storage import DataFile, StorageLayout


@dataclass
class EngineConfig:
    node_count: int = 2
    replication: int = 2
    max_parallel_maps: int | None = None  # defaults to node_count

    @property
    def parallel_maps(self) -> int:
        return self.max_parallel_maps or self.node_count


@dataclass
class TaskRequest:
    dataset: str
    script: str
    extra_params: dict[str, str] = field(default_factory=dict)
    engine_config: EngineConfig = field(default_factory=EngineConfig)

    def task_id(self) -> str:
        """Content digest of the request; engine shape does not affect it."""
        h = hashlib.sha256()
        h.update(self.dataset.encode())
        h.update(b"\x00")
        h.update(self.script.encode())
        for key in sorted(self.extra_params):
            h.update(b"\x00")
            h.update(f"{key}={self.extra_params[key]}".encode())
        return h.hexdigest()[:16]


@dataclass
class Fragment:
    file_id: str
    node: int
    t0: datetime
    t1: datetime
    payload: list
    payload_time: datetime  # the snapshot instant reported by the extractor


def canonical_order(fragments: list[Fragment]) -> list[Fragment]:
    """Stable sort by (t0, file_id); the aggregation input order."""
    return sorted(fragments, key=lambda f: (f.t0, f.file_id))


def run_map(
    node: int,
    data_file: DataFile,
    query: ValidatedQuery,
    registry: KnowledgeRegistry,
    params: dict[str, str] | None = None,
) -> Fragment:
    """Apply the domain extractor to one file; never consults other files."""
    if not query.selects:
        raise EngineError("query has no select statement")
    library = query.selects[0].library
    kind = _file_kind(data_file.data)
    proc_id = library.extractor_for(kind)
    if proc_id is None:
        raise ExtractorFailure(data_file.file_id, f"no extractor for kind {kind!r}")
    extractor = registry.procedure(proc_id)
    ctx = MapContext(area=query.ast.area, time=query.ast.time, params=params or {})
    try:
        payload_time, payload = extractor(data_file.data, ctx)
    except DslakeError as exc:
        raise ExtractorFailure(data_file.file_id, str(exc)) from exc
    return Fragment(
        file_id=data_file.file_id,
        node=node,
        t0=data_file.t0,
        t1=data_file.t1,
        payload=payload,
        payload_time=payload_time,
    )


def _file_kind(data: bytes) -> str:
    head = data[:64].split(None, 1)
    return head[0].decode("utf-8", "replace") if head else ""


# Extraction results are pure functions of (file bytes, query inputs) and
# file ids are content addresses, so payloads can be reused across submits
# and node counts.
_payload_cache: OrderedDict[tuple, tuple] = OrderedDict()
_payload_cache_lock = Lock()
_PAYLOAD_CACHE_MAX = 65536


def _query_key(query: ValidatedQuery, params: dict[str, str]) -> tuple:
    area = query.ast.area
    time = query.ast.time
    return (
        None if area is None else (area.lat_min, area.lon_min, area.lat_max, area.lon_max),
        None if time is None else (time.first_day, time.last_day),
        tuple(sorted(params.items())),
    )


class Engine:
    """Executes task requests over one layout and registry."""

    def __init__(self, registry: KnowledgeRegistry, layout: StorageLayout):
        self.registry = registry
        self.layout = layout

    def submit(self, request: TaskRequest) -> ResultDocument:
        config = request.engine_config
        layout = self.layout
        if config.node_count != layout.node_count:
            layout = layout.reshaped(config.node_count, config.replication)

        query = validate(parse(request.script), self.registry)
        metas = layout.dataset_files(request.dataset)
        qkey = _query_key(query, request.extra_params)

        def map_one(meta) -> Fragment:
            node = layout.serving_node(meta.file_id)
            cache_key = (meta.file_id, qkey)
            with _payload_cache_lock:
                cached = _payload_cache.get(cache_key)
            if cached is not None:
                payload_time, payload = cached
                return Fragment(
                    file_id=meta.file_id,
                    node=node,
                    t0=meta.t0,
                    t1=meta.t1,
                    payload=payload,
                    payload_time=payload_time,
                )
            data_file = DataFile(
                file_id=meta.file_id,
                dataset=meta.dataset,
                t0=meta.t0,
                t1=meta.t1,
                data=layout.read(meta.file_id),
            )
            fragment = run_map(node, data_file, query, self.registry, request.extra_params)
            with _payload_cache_lock:
                _payload_cache[cache_key] = (fragment.payload_time, fragment.payload)
                if len(_payload_cache) > _PAYLOAD_CACHE_MAX:
                    _payload_cache.popitem(last=False)
            return fragment

        workers = min(config.parallel_maps, max(len(metas), 1))
        if metas and workers > 1:
            batches = [metas[i::workers] for i in range(workers)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = pool.map(lambda batch: [map_one(m) for m in batch], batches)
            fragments = [fragment for batch in results for fragment in batch]
        else:
            fragments = [map_one(meta) for meta in metas]

        fragments = canonical_order(fragments)
        document = run_reduce(
            fragments, query, self.registry, layout, request.extra_params
        )
        document.task_id = request.task_id()
        document.diagnostics.files_mapped = len(metas)
        return document


def submit(
    request: TaskRequest, registry: KnowledgeRegistry, layout: StorageLayout
) -> ResultDocument:
    return Engine(registry, layout).submit(request)


def run_reduce(
    fragments: list[Fragment],
    query: ValidatedQuery,
    registry: KnowledgeRegistry,
    layout: StorageLayout,
    params: dict[str, str] | None = None,
) -> ResultDocument:
    """Aggregate canonically ordered fragments into the result document."""
    params = params or {}
    if not query.selects:
        raise EngineError("query has no select statement")
    type_names = {sel.info.name for sel in query.selects}
    if len(type_names) > 1:
        raise CombinerFailure("one object type per task is supported")
    select0 = query.selects[0]

    center_sets = _group_by_time(fragments)
    file_for = _file_index(fragments)

    combiner_id = select0.library.combiner_for(select0.info.name)
    if combiner_id is None:
        raise CombinerFailure(f"no combiner for {select0.info.name}")
    combiner = registry.procedure(combiner_id)
    ctx = ReduceContext(
        read_file=layout.read,
        file_for=lambda ts: file_for.get(ts, ""),
        params=params,
    )
    try:
        objects: list[DomainObject] = combiner(center_sets, ctx)
    except DslakeError:
        raise
    except Exception as exc:
        raise CombinerFailure(str(exc)) from exc

    selected_per_select: list[list[DomainObject]] = []
    for sel in query.selects:
        kept = []
        for obj in objects:
            if all(
                registry.procedure(f.procedure_id)(obj.params, f.value)
                for f in sel.filters
            ):
                kept.append(obj)
        selected_per_select.append(kept)

    object_records: dict[str, ObjectRecord] = {}
    for sel, kept in zip(query.selects, selected_per_select):
        for obj in kept:
            record = object_records.get(obj.object_id)
            if record is None:
                record = ObjectRecord(
                    object_id=obj.object_id, object_type=obj.object_type
                )
                object_records[obj.object_id] = record
            for name in sel.requested_params:
                record.requested_params[name] = obj.params.get(name)

    simulations = [
        sim
        for plan in query.simulates
        for sim in _run_simulations(
            plan, selected_per_select[plan.select_index], registry, layout
        )
    ]

    document = ResultDocument(
        task_id="",
        objects=sorted(object_records.values(), key=lambda r: r.object_id),
        simulations=simulations,
        diagnostics=Diagnostics(
            files_mapped=len(fragments),
            fragments=len(fragments),
            nodes_used={f.node for f in fragments},
        ),
    )
    return document


def _run_simulations(
    plan: SimulatePlan,
    selected: list[DomainObject],
    registry: KnowledgeRegistry,
    layout: StorageLayout,
) -> list[SimulationRecord]:
    records = []
    for obj in selected:
        record = SimulationRecord(
            object_id=obj.object_id,
            package=plan.package.name,
            statement_index=plan.statement_index,
            provenance=obj.provenance,
        )
        try:
            bindings: dict[str, Any] = {}
            for name, expr in plan.explicit_bindings:
                bindings[name] = evaluate_binding(expr, obj.params)
            for name, param_name in plan.implicit_bindings:
                bindings[name] = obj.params[param_name]

            node = None
            if plan.package.placement is Placement.ON_NODE and obj.provenance:
                node = layout.serving_node(obj.provenance[-1])

            output = invoke(
                PackageInvocation(
                    package=plan.package,
                    bindings=bindings,
                    placement_node=node,
                    object_id=obj.object_id,
                ),
                registry,
            )
            record.node = node
            record.wall_time_s = output.wall_time_s
            for item in plan.requested_outputs:
                indices = tuple(idx.value for idx in item.indices)
                key = item.name
                if indices:
                    key = f"{item.name}[{','.join(str(i) for i in indices)}]"
                record.outputs[key] = output.lookup(item.name, indices)
        except DslakeError as exc:
            # partial-failure policy: record and keep processing the rest
            record.status = "failed"
            record.failure_reason = str(exc)
            record.outputs = {}
        records.append(record)
    return records


def _group_by_time(fragments: list[Fragment]) -> list[tuple[datetime, list]]:
    grouped: dict[datetime, list] = {}
    for fragment in fragments:
        grouped.setdefault(fragment.payload_time, []).extend(fragment.payload)
    return [(ts, grouped[ts]) for ts in sorted(grouped)]


def _file_index(fragments: list[Fragment]) -> dict[datetime, str]:
    index: dict[datetime, str] = {}
    for fragment in fragments:
        existing = index.get(fragment.payload_time)
        if existing is None or fragment.file_id < existing:
            index[fragment.payload_time] = fragment.file_id
    return index
