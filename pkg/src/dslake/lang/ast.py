"""AST node types produced by the query parser.

All nodes are frozen dataclasses so parsed queries compare by value,
which is what the format/parse round-trip law is stated over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

from dslake.times import UTC


@dataclass(frozen=True)
class GeoBox:
    """Latitude/longitude box, corners normalized to (min, max)."""

    lat_min: float
    lon_min: float
    lat_max: float
    lon_max: float

    @staticmethod
    def from_corners(a: tuple[float, float], b: tuple[float, float]) -> "GeoBox":
        return GeoBox(
            lat_min=min(a[0], b[0]),
            lon_min=min(a[1], b[1]),
            lat_max=max(a[0], b[0]),
            lon_max=max(a[1], b[1]),
        )

    def contains(self, lat: float, lon: float) -> bool:
        return (
            self.lat_min <= lat <= self.lat_max
            and self.lon_min <= lon <= self.lon_max
        )


@dataclass(frozen=True)
class TimeRange:
    """Inclusive calendar-day range; covers the whole last day."""

    first_day: date
    last_day: date

    def contains(self, ts: datetime) -> bool:
        start = datetime(
            self.first_day.year, self.first_day.month, self.first_day.day, tzinfo=UTC
        )
        end = datetime(
            self.last_day.year, self.last_day.month, self.last_day.day, tzinfo=UTC
        ) + timedelta(days=1)
        return start <= ts < end


# --- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class DateLit:
    value: date


@dataclass(frozen=True)
class DurationLit:
    hours: int


@dataclass(frozen=True)
class Offset:
    """base +/- duration; base is a Ref, DateLit, or another Offset."""

    base: "Expr"
    sign: int  # +1 or -1
    delta: DurationLit


Expr = Ref | IntLit | DateLit | DurationLit | Offset


@dataclass(frozen=True)
class OutItem:
    name: str
    indices: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class SelectStmt:
    object_type: str
    filters: tuple[tuple[str, str], ...] = ()
    out: tuple[OutItem, ...] = ()


@dataclass(frozen=True)
class SimulateStmt:
    package: str
    options: tuple[tuple[str, str], ...] = ()
    in_bindings: tuple[tuple[str, Expr], ...] = ()
    out: tuple[OutItem, ...] = ()


Statement = SelectStmt | SimulateStmt


@dataclass(frozen=True)
class QueryAst:
    area: GeoBox | None = None
    time: TimeRange | None = None
    statements: tuple[Statement, ...] = field(default_factory=tuple)

    def identifier_names(self) -> set[str]:
        """All identifiers that validation must resolve.

        Literals and opaque filter/option values are excluded; this is the
        right-hand side of the resolved-names law checked in tests.
        """
        names: set[str] = set()
        for stmt in self.statements:
            if isinstance(stmt, SelectStmt):
                names.add(stmt.object_type)
                names.update(k for k, _ in stmt.filters)
                _collect_out_names(stmt.out, names)
            else:
                names.add(stmt.package)
                names.update(k for k, _ in stmt.options)
                for bname, expr in stmt.in_bindings:
                    names.add(bname)
                    _collect_expr_refs(expr, names)
                _collect_out_names(stmt.out, names)
        return names


def _collect_out_names(items: tuple[OutItem, ...], names: set[str]) -> None:
    for item in items:
        names.add(item.name)
        for idx in item.indices:
            _collect_expr_refs(idx, names)


def _collect_expr_refs(expr: Expr, names: set[str]) -> None:
    if isinstance(expr, Ref):
        names.add(expr.name)
    elif isinstance(expr, Offset):
        _collect_expr_refs(expr.base, names)
