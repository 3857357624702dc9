"""Hybrid package execution: builtin procedures and external commands.

Abstract package calls are translated through the package descriptor:
builtin mode dispatches to a registered procedure in-process, external
mode materializes inputs into a per-invocation scratch directory, expands
the command template, runs the command, and reads declared outputs back
from an ``outputs.tsv`` the command must write.

External output contract (all files tab-separated UTF-8):

    <outdir>/outputs.tsv      lines: <name> <TAB> <value-or-series-path>
    series files              lines: <ISO-8601 time> <TAB> <value>

Series values use fixed four-decimal rendering; indexed outputs appear
under their indexed name, e.g. ``level[440,414]``. Template placeholders
are ``{input:<name>}`` (literal or materialized file path) and
``{outdir}``. The environment is passed through unchanged except
``DSLAKE_TASK_ID``. Scratch directories are deleted on success and
retained on failure.

Invocations are independent: no shared mutable state, safe to run
concurrently.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Any

from dslake.errors import BindingError, PackageFailure, UnboundReference
from dslake.lang.ast import DateLit, DurationLit, Expr, IntLit, Offset, Ref
from dslake.registry import ExecutionMode, KnowledgeRegistry, PackageDescriptor
from dslake.times import UTC, iso_seconds, parse_utc

Series = list[tuple[datetime, float]]


@dataclass
class IndexedSeries:
    """A family of series addressed by integer index tuples."""

    by_index: dict[tuple[int, ...], Series]

    def at(self, indices: tuple[int, ...]) -> Series:
        series = self.by_index.get(tuple(indices))
        if series is None:
            raise PackageFailure(f"no series at index {list(indices)}")
        return series


@dataclass
class PackageInvocation:
    package: PackageDescriptor
    bindings: dict[str, Any]
    placement_node: int | None = None
    object_id: str = ""
    task_id: str = ""


@dataclass
class PackageOutput:
    outputs: dict[str, Any]
    exit_status: str = "ok"  # "ok" or "failed"
    failure_reason: str | None = None
    wall_time_s: float = 0.0

    def lookup(self, name: str, indices: tuple[int, ...] = ()) -> Any:
        """Resolve a requested output, applying indices when given."""
        if indices:
            keyed = f"{name}[{','.join(str(i) for i in indices)}]"
            if keyed in self.outputs:
                return self.outputs[keyed]
        if name in self.outputs:
            value = self.outputs[name]
            if indices:
                if isinstance(value, IndexedSeries):
                    return value.at(indices)
                raise PackageFailure(f"output {name} is not indexable")
            return value
        raise PackageFailure(f"output {name} missing")


def evaluate_binding(expr: Expr, object_params: dict[str, Any]) -> Any:
    """Evaluate a binding expression against an object's parameters.

    Offsets apply duration arithmetic in UTC; 48h and 2d are both exactly
    48 hours of timedelta.
    """
    if isinstance(expr, Ref):
        if expr.name not in object_params:
            raise UnboundReference(expr.name)
        return object_params[expr.name]
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, DateLit):
        d = expr.value
        return datetime(d.year, d.month, d.day, tzinfo=UTC)
    if isinstance(expr, DurationLit):
        return timedelta(hours=expr.hours)
    if isinstance(expr, Offset):
        base = evaluate_binding(expr.base, object_params)
        if not isinstance(base, datetime):
            raise BindingError(f"offset applied to non-datetime value {base!r}")
        return base + expr.sign * timedelta(hours=expr.delta.hours)
    raise BindingError(f"cannot evaluate {expr!r}")


def semantic_type_of(value: Any) -> str:
    if isinstance(value, datetime):
        return "datetime"
    if isinstance(value, timedelta):
        return "duration"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, str):
        return "string"
    tag = getattr(value, "semantic_type", None)
    if tag:
        return tag
    return type(value).__name__


def invoke(invocation: PackageInvocation, registry: KnowledgeRegistry) -> PackageOutput:
    """Run one package invocation and collect its declared outputs."""
    package = invocation.package
    bindings = dict(invocation.bindings)

    for inp in package.inputs:
        if inp.name not in bindings:
            if inp.default is not None:
                bindings[inp.name] = _parse_default(inp.default, inp.semantic_type)
            elif inp.required:
                raise BindingError(
                    f"required input {inp.name!r} of {package.name} not bound"
                )
    for name, value in bindings.items():
        declared = package.input_named(name)
        if declared is None:
            raise BindingError(f"{name!r} is not an input of {package.name}")
        actual = semantic_type_of(value)
        if actual != declared.semantic_type:
            raise BindingError(
                f"input {name!r} of {package.name} expects"
                f" {declared.semantic_type}, got {actual}"
            )

    started = time.perf_counter()
    if package.execution_mode is ExecutionMode.BUILTIN:
        proc = registry.procedure(package.procedure or package.name)
        try:
            outputs = proc(bindings)
        except PackageFailure:
            raise
        except Exception as exc:
            raise PackageFailure(f"{package.name}: {exc}") from exc
    else:
        outputs = _run_external(package, bindings, invocation.task_id)

    _check_declared(package, outputs)
    return PackageOutput(
        outputs=outputs,
        exit_status="ok",
        wall_time_s=time.perf_counter() - started,
    )


def _check_declared(package: PackageDescriptor, outputs: dict[str, Any]) -> None:
    for decl in package.outputs:
        if decl.name in outputs:
            continue
        if any(key.startswith(f"{decl.name}[") for key in outputs):
            continue
        raise PackageFailure(f"declared output {decl.name!r} missing")


def _parse_default(text: str, semantic_type: str) -> Any:
    if semantic_type == "duration":
        if text.endswith("d"):
            return timedelta(hours=24 * int(text[:-1]))
        return timedelta(hours=int(text.rstrip("h")))
    if semantic_type == "datetime":
        return parse_utc(text)
    if semantic_type == "int":
        return int(text)
    if semantic_type == "float":
        return float(text)
    return text


# --- external command mode ----------------------------------------------------


def _run_external(
    package: PackageDescriptor, bindings: dict[str, Any], task_id: str
) -> dict[str, Any]:
    scratch = Path(tempfile.mkdtemp(prefix=f"dslake-{package.name}-"))
    try:
        outputs = _run_external_in(package, bindings, task_id, scratch)
    except PackageFailure:
        raise  # scratch retained for inspection
    shutil.rmtree(scratch, ignore_errors=True)
    return outputs


def _run_external_in(
    package: PackageDescriptor,
    bindings: dict[str, Any],
    task_id: str,
    scratch: Path,
) -> dict[str, Any]:
    substitutions = {"{outdir}": str(scratch)}
    for name, value in bindings.items():
        substitutions[f"{{input:{name}}}"] = _materialize(name, value, scratch)

    args = []
    for token in shlex.split(package.command_template):
        for placeholder, concrete in substitutions.items():
            token = token.replace(placeholder, concrete)
        args.append(token)

    env = dict(os.environ)
    env["DSLAKE_TASK_ID"] = task_id
    proc = subprocess.run(args, env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        raise PackageFailure(
            f"{package.name} exited {proc.returncode}:"
            f" {proc.stderr.strip()[:500]} (scratch kept at {scratch})"
        )

    manifest = scratch / "outputs.tsv"
    if not manifest.exists():
        raise PackageFailure(
            f"{package.name} wrote no outputs.tsv (scratch kept at {scratch})"
        )
    outputs: dict[str, Any] = {}
    for lineno, line in enumerate(manifest.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            name, raw = line.split("\t", 1)
        except ValueError:
            raise PackageFailure(
                f"{package.name}: malformed outputs.tsv line {lineno}"
            ) from None
        base = name.split("[", 1)[0]
        decl = package.output_named(base)
        if decl is not None and decl.semantic_type.startswith("timeseries"):
            outputs[name] = _read_series(scratch / raw, package.name)
        else:
            try:
                outputs[name] = float(raw)
            except ValueError:
                outputs[name] = raw
    return outputs


def _read_series(path: Path, package_name: str) -> Series:
    if not path.exists():
        raise PackageFailure(f"{package_name}: series file {path.name} missing")
    series: Series = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        ts, value = line.split("\t")
        series.append((parse_utc(ts), float(value)))
    return series


def _materialize(name: str, value: Any, scratch: Path) -> str:
    if isinstance(value, datetime):
        return iso_seconds(value)
    if isinstance(value, timedelta):
        hours = int(value.total_seconds() // 3600)
        return f"{hours}h"
    if isinstance(value, (int, float, str)):
        return str(value)
    text = getattr(value, "portable_text", None)
    if callable(text):
        target = scratch / f"{name}.txt"
        target.write_text(text())
        return str(target)
    raise BindingError(f"cannot materialize input {name!r} of type {type(value).__name__}")
