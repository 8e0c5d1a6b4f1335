"""Published counts for the 2008 and 2013 special-needs networks.

Used to put a full-data run next to the published figures. Centralization
and closeness rows are deliberately absent: their normalization is not
known, so they are not comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .metrics import MetricsReport

_FIELDS = ("active", "sending", "receiving", "partnerships", "active_connections", "isolates", "strength", "strength_stem", "strength_non_stem")

# per year and slice; None where no value was published
REFERENCE_COUNTS: dict[int, dict[str, dict[str, int | None]]] = {
    2008: {
        "all": dict(zip(_FIELDS, (252, 122, 160, 199, 202, 649, 203, 39, 164))),
        "M": dict(zip(_FIELDS, (130, 65, 74, None, 80, 771, 80, 21, 59))),
        "F": dict(zip(_FIELDS, (170, 82, 104, None, 122, 731, 123, 18, 105))),
    },
    2013: {
        "all": dict(zip(_FIELDS, (388, 187, 245, 324, 328, 513, 331, 45, 286))),
        "M": dict(zip(_FIELDS, (198, 97, 112, None, 125, 703, 125, 22, 103))),
        "F": dict(zip(_FIELDS, (277, 134, 167, None, 203, 624, 206, 23, 183))),
    },
}
REFERENCE_UNIVERSE = 901


@dataclass(frozen=True)
class Comparison:
    year: int
    slice: str
    metric: str
    computed: int
    reference: int

    @property
    def deviation(self) -> int:
        return self.computed - self.reference


def _value(report: MetricsReport, name: str) -> int:
    if name.startswith("strength"):
        return {"strength": report.strength.total, "strength_stem": report.strength.stem, "strength_non_stem": report.strength.non_stem}[name]
    return getattr(report, name)


def compare_to_reference(reports: Iterable[MetricsReport]) -> list[Comparison]:
    out = []
    for r in reports:
        ref = REFERENCE_COUNTS.get(r.year, {}).get(r.slice.label)
        if ref is None:
            continue
        for name in _FIELDS:
            if ref[name] is not None:
                out.append(Comparison(r.year, r.slice.label, name, _value(r, name), ref[name]))
    return out
