"""Participation shares of special-needs students.

Two views: the yearly share of special-needs participants among all
participants, and per sending country the share of its estimated
special-needs student population that went abroad. Population estimates are
``he_enrollment * impairment_share`` from an operator-supplied table.
"""

from __future__ import annotations

import csv
import logging
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError, PopulationTableError
from .ingest import Gender, MobilityRecord

log = logging.getLogger(__name__)

POPULATION_COLUMNS = ("country", "gender", "he_enrollment", "impairment_share")
_GENDERS = ("F", "M", "All")


@dataclass(frozen=True)
class PopulationRow:
    he_enrollment: int
    impairment_share: Fraction

    @property
    def sn_population(self) -> Fraction:
        return self.he_enrollment * self.impairment_share


@dataclass(frozen=True)
class PopulationTable:
    rows: Mapping[tuple[str, str], PopulationRow]

    def __post_init__(self):
        for (country, gender), row in self.rows.items():
            if gender not in _GENDERS:
                raise PopulationTableError(f"{country}: unknown gender {gender!r}")
            if row.he_enrollment < 0 or not 0 <= row.impairment_share <= 1:
                raise PopulationTableError(f"{country}/{gender}: value out of range")
        for country in self.countries():
            f, m, a = (self.rows.get((country, g)) for g in _GENDERS)
            if f and m and a and f.he_enrollment + m.he_enrollment != a.he_enrollment:
                raise PopulationTableError(
                    f"{country}: F + M enrollment {f.he_enrollment + m.he_enrollment} != All {a.he_enrollment}"
                )

    def countries(self) -> list[str]:
        return sorted({c for c, _ in self.rows})

    def _combined(self, country: str, attr: str):
        row = self.rows.get((country, "All"))
        if row is not None:
            return getattr(row, attr)
        f, m = self.rows.get((country, "F")), self.rows.get((country, "M"))
        if f is None or m is None:
            return None
        return getattr(f, attr) + getattr(m, attr)

    def sn_population(self, country: str, gender: str = "All") -> Fraction | None:
        """Estimated special-needs population; ``All`` falls back to F + M."""
        if gender == "All":
            return self._combined(country, "sn_population")
        row = self.rows.get((country, gender))
        return row.sn_population if row else None

    def enrollment(self, country: str) -> int | None:
        return self._combined(country, "he_enrollment")


def load_population_table(path: str | os.PathLike, delimiter: str = ",") -> PopulationTable:
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise PopulationTableError(f"cannot read population table {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines(), delimiter=delimiter)
    missing = [c for c in POPULATION_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise PopulationTableError(f"{path}: missing columns {', '.join(missing)}")
    rows = {}
    for row in reader:
        key = (row["country"].strip().upper(), row["gender"].strip())
        if key in rows:
            raise PopulationTableError(f"{path}:{reader.line_num}: duplicate row {key}")
        try:
            rows[key] = PopulationRow(int(row["he_enrollment"]), Fraction(row["impairment_share"].strip()))
        except (ValueError, ZeroDivisionError):
            raise PopulationTableError(f"{path}:{reader.line_num}: bad number") from None
    return PopulationTable(rows)


@dataclass(frozen=True)
class ShareRow:
    year: int
    sn: int
    total: int
    female: int
    male: int
    pct: Fraction
    fm_ratio: Fraction | None


def sn_share_timeseries(records: Iterable[MobilityRecord], years: Iterable[int] | None = None) -> list[ShareRow]:
    """Yearly special-needs counts, their percentage of all participants and the F/M ratio.

    The F and M counts are of special-needs participants. The ratio is
    ``None`` for a year without male special-needs participants.
    """
    total: Counter[int] = Counter()
    sn: dict[int, Counter] = defaultdict(Counter)
    for r in records:
        total[r.year] += 1
        if r.special_needs_grant > 0:
            sn[r.year][r.gender] += 1
    years = sorted(total) if years is None else sorted(years)
    out = []
    for y in years:
        if total[y] == 0:
            raise DataError(f"no participants in {y}")
        g = sn[y]
        n_sn = sum(g.values())
        f, m = g[Gender.F], g[Gender.M]
        out.append(ShareRow(y, n_sn, total[y], f, m, Fraction(100 * n_sn, total[y]), Fraction(f, m) if m else None))
    return out


@dataclass(frozen=True)
class CountryShare:
    country: str
    sn_outgoing: int
    sn_female: int
    sn_male: int
    total_outgoing: int
    sn_over_total_pct: Fraction
    male_pct: Fraction | None
    female_pct: Fraction | None
    overall_pct: Fraction | None
    total_over_population_pct: Fraction | None


@dataclass(frozen=True)
class OutgoingCounts:
    sn_outgoing: int
    sn_female: int
    sn_male: int
    total_outgoing: int


@dataclass
class ShareReport:
    year: int
    rows: list[CountryShare]
    counts: dict[str, OutgoingCounts]
    warnings: list[str] = field(default_factory=list)


def _pct(count: int, population) -> Fraction | None:
    if population is None:
        return None
    if population == 0:
        if count:
            raise PopulationTableError(f"{count} outgoing students against an estimated population of 0")
        return None
    return Fraction(100 * count) / population


def country_shares(records: Iterable[MobilityRecord], population: PopulationTable, year: int | None = None) -> ShareReport:
    """Outgoing special-needs students over the estimated special-needs population, per home country.

    Countries without population data stay in ``counts`` but are left out of
    ``rows`` with a warning.
    """
    records = list(records)
    years = {r.year for r in records}
    if year is None:
        if len(years) != 1:
            raise ValueError(f"records span years {sorted(years)}; pass year explicitly")
        year = years.pop()
    else:
        records = [r for r in records if r.year == year]

    tallies: dict[str, Counter] = defaultdict(Counter)
    for r in records:
        t = tallies[r.home_country]
        t["total"] += 1
        if r.special_needs_grant > 0:
            t["sn"] += 1
            t[r.gender.value] += 1
    for c in population.countries():
        tallies.setdefault(c, Counter())

    counts = {
        c: OutgoingCounts(t["sn"], t["F"], t["M"], t["total"]) for c, t in sorted(tallies.items())
    }
    known = set(population.countries())
    rows, warnings = [], []
    for c, k in counts.items():
        if c not in known:
            warnings.append(f"{c}: no population data, omitted from share table")
            continue
        rows.append(
            CountryShare(
                country=c,
                sn_outgoing=k.sn_outgoing,
                sn_female=k.sn_female,
                sn_male=k.sn_male,
                total_outgoing=k.total_outgoing,
                sn_over_total_pct=Fraction(100 * k.sn_outgoing, k.total_outgoing) if k.total_outgoing else Fraction(0),
                male_pct=_pct(k.sn_male, population.sn_population(c, "M")),
                female_pct=_pct(k.sn_female, population.sn_population(c, "F")),
                overall_pct=_pct(k.sn_outgoing, population.sn_population(c)),
                total_over_population_pct=_pct(k.total_outgoing, population.enrollment(c)),
            )
        )
    for w in warnings:
        log.info("%d: %s", year, w)
    return ShareReport(year, rows, counts, warnings)
