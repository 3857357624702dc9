"""Simulated multi-node file storage with deterministic placement.

Nodes live in one process. Placement is rendezvous hashing: for each node
n the score is a 64-bit FNV-1a hash of the file id concatenated with the
node id rendered in decimal, and a file's replicas go to the
``replication`` highest-scoring nodes in descending score order (ties by
ascending node id). File ids are content addresses: the SHA-256 hex
digest of the file bytes.

On-disk layout (used by the CLI):

    <root>/fabric.conf                    # node_count=.. replication=..
    <root>/node-<k>/<dataset>/<fid>.snap  # one copy per placement node
    <root>/datasets/<dataset>/manifest.tsv

Manifest columns (tab-separated): file_id, dataset, t0, t1, relative_path;
times are ISO-8601 UTC.

Mutations (ingest, fail, recover) are serialized by the caller; reads are
safe to run concurrently with other reads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

from dslake.errors import (
    DuplicateFile,
    InvalidReplication,
    StorageError,
    UnknownNode,
    UnreadableFile,
)
from dslake.times import iso_seconds, parse_utc

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes, state: int = _FNV_OFFSET) -> int:
    h = state
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=65536)
def _prefix_hash(file_id: str) -> int:
    return fnv1a64(file_id.encode())


def placement_scores(file_id: str, node_count: int) -> list[tuple[int, int]]:
    """(score, node) pairs, highest score first, ties by node id."""
    prefix = _prefix_hash(file_id)
    scored = [
        (fnv1a64(str(node).encode(), prefix), node) for node in range(node_count)
    ]
    scored.sort(key=lambda sn: (-sn[0], sn[1]))
    return scored


def place(file_id: str, node_count: int, replication: int) -> list[int]:
    """Deterministic rendezvous placement of one file."""
    if not 1 <= replication <= node_count:
        raise InvalidReplication(
            f"replication {replication} not in [1, {node_count}]"
        )
    return [node for _, node in placement_scores(file_id, node_count)[:replication]]


@dataclass(frozen=True)
class DataFile:
    file_id: str
    dataset: str
    t0: datetime
    t1: datetime
    data: bytes

    def __post_init__(self):
        if self.t0 > self.t1:
            raise StorageError(f"degenerate time range for {self.file_id}")

    @staticmethod
    def from_bytes(dataset: str, t0: datetime, t1: datetime, data: bytes) -> "DataFile":
        return DataFile(
            file_id=hashlib.sha256(data).hexdigest(),
            dataset=dataset,
            t0=t0,
            t1=t1,
            data=data,
        )


@dataclass(frozen=True)
class FileMeta:
    file_id: str
    dataset: str
    t0: datetime
    t1: datetime
    relative_path: str


@dataclass
class StorageLayout:
    """The simulated node set, file placement, and failure state."""

    node_count: int
    replication: int
    placements: dict[str, tuple[int, ...]] = field(default_factory=dict)
    failed: set[int] = field(default_factory=set)
    blobs: dict[str, bytes] = field(default_factory=dict)
    meta: dict[str, FileMeta] = field(default_factory=dict)
    volumes: list[set[str]] = field(default_factory=list)
    _verified: set[str] = field(default_factory=set)

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidReplication("need at least one node")
        if not 1 <= self.replication <= self.node_count:
            raise InvalidReplication(
                f"replication {self.replication} not in [1, {self.node_count}]"
            )
        if not self.volumes:
            self.volumes = [set() for _ in range(self.node_count)]

    # -- ingestion ---------------------------------------------------------

    def ingest(
        self,
        files: Iterable[DataFile],
        placement_fn: Callable[[str, int, int], Sequence[int]] | None = None,
    ) -> "StorageLayout":
        """Record placements and store bytes on every placement node.

        ``placement_fn`` overrides rendezvous placement; tests use it to
        exercise arbitrary file-to-node assignments.
        """
        chooser = placement_fn or place
        for f in files:
            if f.file_id in self.blobs:
                raise DuplicateFile(f.file_id)
            nodes = tuple(chooser(f.file_id, self.node_count, self.replication))
            if len(set(nodes)) != len(nodes):
                raise StorageError(f"placement nodes not distinct: {nodes}")
            self.placements[f.file_id] = nodes
            self.blobs[f.file_id] = f.data
            self.meta[f.file_id] = FileMeta(
                file_id=f.file_id,
                dataset=f.dataset,
                t0=f.t0,
                t1=f.t1,
                relative_path=f"{f.dataset}/{f.file_id}.snap",
            )
            for node in nodes:
                self.volumes[node].add(f.file_id)
        return self

    # -- failure injection ---------------------------------------------------

    def fail_node(self, node: int) -> "StorageLayout":
        if not 0 <= node < self.node_count:
            raise UnknownNode(str(node))
        self.failed.add(node)
        return self

    def recover_node(self, node: int) -> "StorageLayout":
        if not 0 <= node < self.node_count:
            raise UnknownNode(str(node))
        self.failed.discard(node)
        return self

    # -- reads ---------------------------------------------------------------

    def serving_node(self, file_id: str) -> int:
        """First surviving node in placement order."""
        nodes = self.placements.get(file_id)
        if nodes is None:
            raise UnreadableFile(f"unknown file {file_id}")
        for node in nodes:
            if node not in self.failed and file_id in self.volumes[node]:
                return node
        raise UnreadableFile(f"no surviving replica of {file_id}")

    def read(self, file_id: str) -> bytes:
        self.serving_node(file_id)
        data = self.blobs[file_id]
        if file_id not in self._verified:
            digest = hashlib.sha256(data).hexdigest()
            if digest != file_id:
                raise UnreadableFile(
                    f"content digest mismatch for {file_id}: {digest}"
                )
            self._verified.add(file_id)
        return data

    def readable(self, file_id: str) -> bool:
        try:
            self.serving_node(file_id)
            return True
        except UnreadableFile:
            return False

    def dataset_files(self, dataset: str) -> list[FileMeta]:
        """Dataset metadata ordered by (t0, file_id); empty if unknown."""
        found = [m for m in self.meta.values() if m.dataset == dataset]
        found.sort(key=lambda m: (m.t0, m.file_id))
        return found

    # -- on-disk mode ----------------------------------------------------------

    def save(self, root: Path) -> None:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        (root / "fabric.conf").write_text(
            f"node_count={self.node_count}\nreplication={self.replication}\n"
        )
        datasets: dict[str, list[FileMeta]] = {}
        for meta in self.meta.values():
            datasets.setdefault(meta.dataset, []).append(meta)
        for dataset, metas in datasets.items():
            metas.sort(key=lambda m: (m.t0, m.file_id))
            manifest_dir = root / "datasets" / dataset
            manifest_dir.mkdir(parents=True, exist_ok=True)
            lines = [
                "\t".join(
                    (
                        m.file_id,
                        m.dataset,
                        iso_seconds(m.t0),
                        iso_seconds(m.t1),
                        m.relative_path,
                    )
                )
                for m in metas
            ]
            (manifest_dir / "manifest.tsv").write_text("\n".join(lines) + "\n")
        for node, volume in enumerate(self.volumes):
            for file_id in volume:
                target = root / f"node-{node}" / self.meta[file_id].relative_path
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_bytes(self.blobs[file_id])

    @staticmethod
    def load(root: Path) -> "StorageLayout":
        root = Path(root)
        conf_path = root / "fabric.conf"
        if not conf_path.exists():
            raise StorageError(f"no fabric at {root}")
        conf = dict(
            line.split("=", 1)
            for line in conf_path.read_text().splitlines()
            if "=" in line
        )
        layout = StorageLayout(
            node_count=int(conf["node_count"]),
            replication=int(conf["replication"]),
        )
        datasets_dir = root / "datasets"
        if not datasets_dir.exists():
            return layout
        for manifest in sorted(datasets_dir.glob("*/manifest.tsv")):
            for line in manifest.read_text().splitlines():
                if not line.strip():
                    continue
                file_id, dataset, t0, t1, relpath = line.split("\t")
                nodes = tuple(place(file_id, layout.node_count, layout.replication))
                data = None
                for node in nodes:
                    candidate = root / f"node-{node}" / relpath
                    if candidate.exists():
                        data = candidate.read_bytes()
                        break
                if data is None:
                    raise StorageError(f"no replica of {file_id} on disk")
                layout.placements[file_id] = nodes
                layout.blobs[file_id] = data
                layout.meta[file_id] = FileMeta(
                    file_id=file_id,
                    dataset=dataset,
                    t0=parse_utc(t0),
                    t1=parse_utc(t1),
                    relative_path=relpath,
                )
                for node in nodes:
                    layout.volumes[node].add(file_id)
        return layout

    # -- derived views ----------------------------------------------------------

    def reshaped(self, node_count: int, replication: int | None = None) -> "StorageLayout":
        """Same content re-placed onto a different simulated node set."""
        replication = replication or min(self.replication, node_count)
        view = StorageLayout(node_count=node_count, replication=replication)
        view.blobs = self.blobs  # shared: files are content-addressed
        view._verified = self._verified
        view.meta = self.meta
        for file_id in self.meta:
            nodes = tuple(place(file_id, node_count, replication))
            view.placements[file_id] = nodes
            for node in nodes:
                view.volumes[node].add(file_id)
        return view
