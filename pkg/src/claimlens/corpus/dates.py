"""Closed date grammar shared by the corpus generator, the tagger and the
linker: ISO-like numeric dates (dash or slash separated) plus "last
<weekday>" phrases. Date values never live in the KB, so both sides of the
pipeline must agree on one normalized form."""

from __future__ import annotations

import re

ISO_DATE_RE = re.compile(r"^(\d{4})[-/](\d{1,2})[-/](\d{1,2})$")

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday",
            "saturday", "sunday")


def is_iso_date_token(token: str) -> bool:
    return ISO_DATE_RE.match(token) is not None


def is_last_weekday(first: str, second: str) -> bool:
    return first.lower() == "last" and second.lower() in WEEKDAYS


def normalize_date(surface: str) -> str:
    """Normalize a date surface to its canonical form: ISO dates become
    zero-padded YYYY-MM-DD, weekday phrases lowercase. Unrecognized
    surfaces are returned stripped (no calendar validation here)."""
    s = surface.strip()
    m = ISO_DATE_RE.match(s)
    if m:
        y, mo, d = m.groups()
        return f"{y}-{int(mo):02d}-{int(d):02d}"
    parts = s.split()
    if len(parts) == 2 and is_last_weekday(parts[0], parts[1]):
        return f"last {parts[1].lower()}"
    return s
