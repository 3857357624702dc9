"""Command-line surface: one verb per pipeline stage.

    dslake validate <script.dq>
    dslake gen-synthetic <spec> [--seed N] [--out DIR]
    dslake ingest <manifest.tsv>
    dslake submit --dataset <id> <script.dq> [--nodes N] [--fail-node K]
                  [--emit-csv PATH]
    dslake results <task_id>
    dslake registry list

Configuration precedence: flags > environment (DSLAKE_STORAGE_ROOT,
DSLAKE_NODES, DSLAKE_REPLICATION, DSLAKE_SEED) > config file (key=value
lines, --config or ./dslake.conf) > defaults. Results go to stdout,
diagnostics to stderr; exit 0 on success, 1 on domain errors, 2 on usage
or file errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from dslake.errors import DslakeError
from dslake.descriptors import load_descriptor_file
from dslake.engine import EngineConfig, TaskRequest, submit
from dslake.lang.formatter import format_query
from dslake.lang.parser import parse
from dslake.lang.validate import validate
from dslake.registry import KnowledgeRegistry
from dslake.storage import DataFile, StorageLayout
from dslake.times import parse_utc
from dslake.cyclone.plugin import register_cyclone_domain

DEFAULTS = {"storage_root": "./dslake-storage", "nodes": "2", "replication": "2", "seed": "0"}
ENV_KEYS = {
    "storage_root": "DSLAKE_STORAGE_ROOT",
    "nodes": "DSLAKE_NODES",
    "replication": "DSLAKE_REPLICATION",
    "seed": "DSLAKE_SEED",
}


@dataclass
class CliConfig:
    storage_root: Path
    node_count: int
    replication: int
    registry_paths: list[Path]
    seed: int


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        return args.handler(args, config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DslakeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dslake", description="DSL-driven analysis over simulated distributed storage"
    )
    parser.add_argument("--config", type=Path, default=None, help="key=value config file")
    parser.add_argument("--storage-root", type=Path, default=None)
    parser.add_argument("--nodes", type=int, default=None)
    parser.add_argument("--replication", type=int, default=None)
    parser.add_argument("--registry", action="append", type=Path, default=None,
                        help="extra .kd descriptor file (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and knowledge-validate a script")
    p.add_argument("script", type=Path)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("gen-synthetic", help="generate a ground-truthed dataset")
    p.add_argument("spec", type=Path)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(handler=_cmd_gen_synthetic)

    p = sub.add_parser("ingest", help="place a manifest's files onto the fabric")
    p.add_argument("manifest", type=Path)
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("submit", help="run a script as a distributed task")
    p.add_argument("script", type=Path)
    p.add_argument("--dataset", required=True)
    p.add_argument("--fail-node", type=int, action="append", default=None)
    p.add_argument("--emit-csv", type=Path, default=None)
    p.set_defaults(handler=_cmd_submit)

    p = sub.add_parser("results", help="print a stored result document")
    p.add_argument("task_id")
    p.set_defaults(handler=_cmd_results)

    p = sub.add_parser("registry", help="inspect the knowledge registry")
    p.add_argument("action", choices=["list"])
    p.set_defaults(handler=_cmd_registry)

    return parser


def _resolve_config(args: argparse.Namespace) -> CliConfig:
    values = dict(DEFAULTS)
    config_path = args.config or Path("dslake.conf")
    if config_path.exists():
        for line in config_path.read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line and "=" in line:
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    for key, env in ENV_KEYS.items():
        if os.environ.get(env):
            values[key] = os.environ[env]
    if args.storage_root is not None:
        values["storage_root"] = str(args.storage_root)
    if getattr(args, "nodes", None) is not None:
        values["nodes"] = str(args.nodes)
    if args.replication is not None:
        values["replication"] = str(args.replication)
    if getattr(args, "seed", None) is not None:
        values["seed"] = str(args.seed)

    registry_paths = [Path(p) for p in values.get("registry", "").split(",") if p]
    if args.registry:
        registry_paths.extend(args.registry)
    return CliConfig(
        storage_root=Path(values["storage_root"]),
        node_count=int(values["nodes"]),
        replication=int(values["replication"]),
        registry_paths=registry_paths,
        seed=int(values["seed"]),
    )


def _load_registry(config: CliConfig) -> KnowledgeRegistry:
    registry = register_cyclone_domain(KnowledgeRegistry())
    for path in config.registry_paths:
        if not path.exists():
            raise FileNotFoundError(f"descriptor file {path}")
        libraries, packages = load_descriptor_file(path)
        for library in libraries:
            registry.register_domain_library(library)
        for package in packages:
            registry.register_package(package)
    return registry


def _read_script(path: Path) -> str:
    if not path.exists():
        raise FileNotFoundError(f"script {path}")
    return path.read_text(encoding="utf-8")


def _cmd_validate(args, config: CliConfig) -> int:
    registry = _load_registry(config)
    ast = parse(_read_script(args.script))
    validate(ast, registry)
    sys.stdout.write(format_query(ast))
    return 0


def _cmd_gen_synthetic(args, config: CliConfig) -> int:
    from dslake.cyclone.synthetic import generate_synthetic, parse_spec_text

    if not args.spec.exists():
        raise FileNotFoundError(f"spec {args.spec}")
    spec = parse_spec_text(args.spec.read_text(encoding="utf-8"))
    seed = args.seed if args.seed is not None else config.seed
    files, truth = generate_synthetic(spec, seed)

    out = args.out or Path(f"synthetic-{spec.dataset}")
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for f in files:
        name = f"{f.file_id}.snap"
        (out / name).write_bytes(f.data)
        from dslake.times import iso_seconds

        lines.append(
            "\t".join((f.file_id, f.dataset, iso_seconds(f.t0), iso_seconds(f.t1), name))
        )
    (out / "manifest.tsv").write_text("\n".join(lines) + "\n")
    (out / "groundtruth.txt").write_text(truth.canonical_text())
    print(f"wrote {len(files)} snapshots to {out}", file=sys.stderr)
    sys.stdout.write(f"{out / 'manifest.tsv'}\n")
    return 0


def _cmd_ingest(args, config: CliConfig) -> int:
    if not args.manifest.exists():
        raise FileNotFoundError(f"manifest {args.manifest}")
    base = args.manifest.parent
    layout = _load_or_create_layout(config)
    files = []
    for line in args.manifest.read_text().splitlines():
        if not line.strip():
            continue
        file_id, dataset, t0, t1, relpath = line.split("\t")
        data = (base / relpath).read_bytes()
        files.append(
            DataFile(
                file_id=file_id,
                dataset=dataset,
                t0=parse_utc(t0),
                t1=parse_utc(t1),
                data=data,
            )
        )
    layout.ingest(files)
    layout.save(config.storage_root)
    print(
        f"ingested {len(files)} files onto {layout.node_count} nodes"
        f" (replication {layout.replication})",
        file=sys.stderr,
    )
    return 0


def _load_or_create_layout(config: CliConfig) -> StorageLayout:
    try:
        return StorageLayout.load(config.storage_root)
    except DslakeError:
        return StorageLayout(
            node_count=config.node_count, replication=config.replication
        )


def _cmd_submit(args, config: CliConfig) -> int:
    registry = _load_registry(config)
    layout = _load_or_create_layout(config)
    for node in args.fail_node or []:
        layout.fail_node(node)
    request = TaskRequest(
        dataset=args.dataset,
        script=_read_script(args.script),
        engine_config=EngineConfig(
            node_count=config.node_count, replication=config.replication
        ),
    )
    document = submit(request, registry, layout)
    text = document.canonical_text()
    results_dir = config.storage_root / "results"
    results_dir.mkdir(parents=True, exist_ok=True)
    (results_dir / f"{document.task_id}.txt").write_text(text)
    if args.emit_csv:
        _write_csv(args.emit_csv, document)
    sys.stdout.write(text)
    return 0


def _write_csv(path: Path, document) -> None:
    import csv

    from dslake.times import iso_seconds

    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["object_id", "package", "output", "time", "value"])
        for sim in document.simulations:
            for name, value in sorted(sim.outputs.items()):
                if isinstance(value, list):
                    for ts, level in value:
                        writer.writerow(
                            [sim.object_id, sim.package, name, iso_seconds(ts), f"{level:.4f}"]
                        )
                else:
                    writer.writerow([sim.object_id, sim.package, name, "", value])


def _cmd_results(args, config: CliConfig) -> int:
    path = config.storage_root / "results" / f"{args.task_id}.txt"
    if not path.exists():
        raise FileNotFoundError(f"no stored result {args.task_id}")
    sys.stdout.write(path.read_text())
    return 0


def _cmd_registry(args, config: CliConfig) -> int:
    registry = _load_registry(config)
    for name in sorted(registry.libraries):
        library = registry.libraries[name]
        print(f"library {name}")
        for info in library.object_types:
            aliases = f" (aliases: {', '.join(info.aliases)})" if info.aliases else ""
            print(f"  object {info.name} [{info.structure_level.value}]{aliases}")
            for pname, ptype in info.output_params:
                print(f"    param {pname}: {ptype}")
            for _, keyword, _ in library.filters:
                print(f"    filter {keyword}")
    for name in sorted(registry.packages):
        package = registry.packages[name]
        print(f"package {name} [{package.execution_mode.value}]")
        for inp in package.inputs:
            required = "required" if inp.required else f"optional ({inp.default})"
            print(f"  input {inp.name}: {inp.semantic_type} {required}")
        for out in package.outputs:
            indexable = " indexable" if out.indexable else ""
            print(f"  output {out.name}: {out.semantic_type}{indexable}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
