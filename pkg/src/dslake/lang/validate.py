"""Knowledge validation: resolve a parsed query against the registry.

Resolution covers object types (alias-aware), filter keywords (through
the library's keyword shortcuts), packages (case-sensitive), package
inputs and outputs, and every reference used in binding expressions.
The result carries a binding plan describing how each simulate statement
consumes the result set of its nearest preceding select, with per-object
fan-out under ``semantic_association yes``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from dslake.errors import (
    DanglingSimulate,
    UnboundReference,
    UnknownFilterKeyword,
    UnknownOptionKeyword,
    UnknownOutputName,
    UnknownPackageInput,
    ValidationError,
)
from dslake.lang.ast import (
    Expr,
    IntLit,
    Offset,
    OutItem,
    QueryAst,
    Ref,
    SelectStmt,
    SimulateStmt,
)
from dslake.registry import (
    DomainLibraryDescriptor,
    KnowledgeRegistry,
    ObjectTypeInfo,
    PackageDescriptor,
)

# Params[...] in a select out clause addresses the object's own parameters
OBJECT_PARAMS_NAME = "Params"

KNOWN_OPTIONS = frozenset({"semantic_association"})


@dataclass(frozen=True)
class FilterBinding:
    keyword: str  # as written in the script
    canonical: str
    value: str
    procedure_id: str
    select_index: int


@dataclass(frozen=True)
class SelectResolution:
    statement_index: int
    info: ObjectTypeInfo
    library: DomainLibraryDescriptor
    filters: tuple[FilterBinding, ...]
    requested_params: tuple[str, ...]  # parameter names to present


@dataclass(frozen=True)
class SimulatePlan:
    statement_index: int
    package: PackageDescriptor
    select_index: int  # index into ValidatedQuery.selects
    fan_out: bool  # one invocation per selected object
    explicit_bindings: tuple[tuple[str, Expr], ...]
    implicit_bindings: tuple[tuple[str, str], ...]  # input name -> object param
    default_bindings: tuple[tuple[str, str], ...]  # input name -> default text
    requested_outputs: tuple[OutItem, ...]


@dataclass(frozen=True)
class ValidatedQuery:
    ast: QueryAst
    selects: tuple[SelectResolution, ...]
    simulates: tuple[SimulatePlan, ...]
    resolved_names: frozenset[str] = field(default_factory=frozenset)

    @property
    def resolved_object(self) -> ObjectTypeInfo | None:
        return self.selects[0].info if self.selects else None

    @property
    def resolved_filters(self) -> tuple[FilterBinding, ...]:
        return tuple(f for sel in self.selects for f in sel.filters)

    @property
    def resolved_packages(self) -> tuple[PackageDescriptor, ...]:
        return tuple(plan.package for plan in self.simulates)

    @property
    def binding_plan(self) -> tuple[SimulatePlan, ...]:
        return self.simulates


def validate(ast: QueryAst, registry: KnowledgeRegistry) -> ValidatedQuery:
    selects: list[SelectResolution] = []
    simulates: list[SimulatePlan] = []
    resolved: set[str] = set()

    for index, stmt in enumerate(ast.statements):
        if isinstance(stmt, SelectStmt):
            selects.append(
                _validate_select(stmt, index, registry, resolved)
            )
        else:
            simulates.append(
                _validate_simulate(stmt, index, selects, registry, resolved)
            )

    return ValidatedQuery(
        ast=ast,
        selects=tuple(selects),
        simulates=tuple(simulates),
        resolved_names=frozenset(resolved),
    )


def _validate_select(
    stmt: SelectStmt,
    index: int,
    registry: KnowledgeRegistry,
    resolved: set[str],
) -> SelectResolution:
    info = registry.resolve_object_type(stmt.object_type)
    library = registry.library_of(stmt.object_type)
    resolved.add(stmt.object_type)

    filters = []
    for keyword, value in stmt.filters:
        canonical = library.canonical_keyword(keyword)
        proc_id = library.filter_for(info.name, canonical)
        if proc_id is None:
            raise UnknownFilterKeyword(keyword, detail=f"object type {info.name}")
        resolved.add(keyword)
        filters.append(
            FilterBinding(
                keyword=keyword,
                canonical=canonical,
                value=value,
                procedure_id=proc_id,
                select_index=index,
            )
        )

    requested = []
    for item in stmt.out:
        if item.name == OBJECT_PARAMS_NAME:
            resolved.add(item.name)
            for idx in item.indices:
                if not isinstance(idx, Ref):
                    raise UnknownOutputName(
                        str(idx), detail="Params[...] takes parameter names"
                    )
                if info.param_type(idx.name) is None:
                    raise UnknownOutputName(
                        idx.name, detail=f"not a parameter of {info.name}"
                    )
                resolved.add(idx.name)
                requested.append(idx.name)
        else:
            if item.indices:
                raise UnknownOutputName(
                    item.name, detail="object parameters take no indices"
                )
            if info.param_type(item.name) is None:
                raise UnknownOutputName(
                    item.name, detail=f"not a parameter of {info.name}"
                )
            resolved.add(item.name)
            requested.append(item.name)

    return SelectResolution(
        statement_index=index,
        info=info,
        library=library,
        filters=tuple(filters),
        requested_params=tuple(requested),
    )


def _validate_simulate(
    stmt: SimulateStmt,
    index: int,
    selects: list[SelectResolution],
    registry: KnowledgeRegistry,
    resolved: set[str],
) -> SimulatePlan:
    if not selects:
        raise DanglingSimulate(
            stmt.package, detail="simulate has no preceding select to consume"
        )
    select_index = len(selects) - 1
    select = selects[select_index]

    package = registry.resolve_package(stmt.package)
    resolved.add(stmt.package)

    fan_out = False
    for keyword, value in stmt.options:
        if keyword not in KNOWN_OPTIONS:
            raise UnknownOptionKeyword(keyword)
        resolved.add(keyword)
        if keyword == "semantic_association":
            if value not in ("yes", "no"):
                raise ValidationError(
                    value, detail="semantic_association takes yes or no"
                )
            fan_out = value == "yes"

    object_params = {name for name, _ in select.info.output_params}

    explicit: list[tuple[str, Expr]] = []
    bound_names: set[str] = set()
    for name, expr in stmt.in_bindings:
        if package.input_named(name) is None:
            raise UnknownPackageInput(
                name, detail=f"not an input of package {package.name}"
            )
        resolved.add(name)
        for ref in _refs_of(expr):
            if not fan_out:
                raise UnboundReference(
                    ref, detail="references need semantic_association yes"
                )
            if ref not in object_params:
                raise UnboundReference(
                    ref, detail=f"not an output parameter of {select.info.name}"
                )
            resolved.add(ref)
        explicit.append((name, expr))
        bound_names.add(name)

    implicit: list[tuple[str, str]] = []
    defaults: list[tuple[str, str]] = []
    for inp in package.inputs:
        if inp.name in bound_names:
            continue
        if fan_out and inp.name in object_params:
            if select.info.param_type(inp.name) == inp.semantic_type:
                implicit.append((inp.name, inp.name))
                continue
        if inp.default is not None:
            defaults.append((inp.name, inp.default))
            continue
        if inp.required:
            raise UnboundReference(
                inp.name,
                detail=f"required input of {package.name} cannot be bound",
            )

    for item in stmt.out:
        out_decl = package.output_named(item.name)
        if out_decl is None:
            raise UnknownOutputName(
                item.name, detail=f"not an output of package {package.name}"
            )
        resolved.add(item.name)
        if item.indices:
            if not out_decl.indexable:
                raise ValidationError(
                    item.name, detail="output is not indexable"
                )
            for idx in item.indices:
                if not isinstance(idx, IntLit):
                    raise ValidationError(
                        item.name, detail="indices must be integer literals"
                    )

    return SimulatePlan(
        statement_index=index,
        package=package,
        select_index=select_index,
        fan_out=fan_out,
        explicit_bindings=tuple(explicit),
        implicit_bindings=tuple(implicit),
        default_bindings=tuple(defaults),
        requested_outputs=stmt.out,
    )


def _refs_of(expr: Expr) -> list[str]:
    if isinstance(expr, Ref):
        return [expr.name]
    if isinstance(expr, Offset):
        return _refs_of(expr.base)
    return []
