"""UTC timestamp parsing and rendering used across file formats.

Python 3.10's ``fromisoformat`` rejects the trailing ``Z``, so parsing is
done by hand here. All datetimes in the package are timezone-aware UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone

UTC = timezone.utc


def parse_utc(text: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp such as ``2011-01-01T00:00Z``.

    Accepts an optional seconds field and either ``Z`` or ``+00:00``.
    """
    s = text.strip()
    if s.endswith("Z"):
        s = s[:-1]
    elif s.endswith("+00:00"):
        s = s[:-6]
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is not None:
        return dt.astimezone(UTC)
    return dt.replace(tzinfo=UTC)


def iso_minutes(dt: datetime) -> str:
    """Render to minute precision, e.g. ``2011-01-01T00:00Z``."""
    return dt.astimezone(UTC).strftime("%Y-%m-%dT%H:%MZ")


def iso_seconds(dt: datetime) -> str:
    """Render to second precision, e.g. ``2011-01-01T00:00:00Z``."""
    return dt.astimezone(UTC).strftime("%Y-%m-%dT%H:%M:%SZ")
