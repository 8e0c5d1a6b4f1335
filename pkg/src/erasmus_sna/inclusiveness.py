"""Inclusiveness of receiving institutions relative to their host country.

For a university ``u`` in country ``c`` and one year::

    I = (i_sn_u / i_sn_c) * (i_c / i_u)

where the ``sn`` counts are incoming special-needs students and the others
all incoming students. ``I = 1`` means the university takes the same share
of special-needs students as of students overall. The bounded form

    B = (I - 1) / (I + 1)

maps ``[0, inf)`` onto ``[-1, 1)`` with ``B = 0`` at ``I = 1`` and
``B(1/I) = -B(I)``.

Note: the transform is sometimes printed as ``(I + 1) / (I - 1)``. That
expression is unbounded near ``I = 1`` and never zero, so it cannot be the
intended one; this module uses ``(I - 1) / (I + 1)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConflictingCountryError,
    CountryNoIncomingSN,
    DataError,
    MissingYearError,
    UniversityNoIncoming,
)
from .network import Network


@dataclass(frozen=True)
class InclusivenessScore:
    institution: str
    year: int
    country: str
    i_sn_u: int
    i_sn_c: int
    i_u: int
    i_c: int
    raw_index: Fraction
    bounded_index: Fraction


@dataclass(frozen=True)
class PeriodAverage:
    institution: str
    window: tuple[int, ...]
    mean_bounded_index: Fraction


@dataclass(frozen=True)
class SlopegraphRow:
    institution: str
    early_mean: Fraction
    late_mean: Fraction

    @property
    def delta(self) -> Fraction:
        return self.late_mean - self.early_mean


def bound(index):
    """``(I - 1) / (I + 1)``; exact for ints and Fractions, float otherwise."""
    if not isinstance(index, Real) or not index >= 0:
        raise ValueError(f"index must be a non-negative number, got {index!r}")
    if isinstance(index, int):
        index = Fraction(index)
    return (index - 1) / (index + 1)


def _country(inst: str, *networks: Network) -> str:
    found = {c for c in (net.country_of(inst) for net in networks) if c}
    if not found:
        raise DataError(f"no country known for {inst}")
    if len(found) > 1:
        raise ConflictingCountryError(f"{inst} attributed to {sorted(found)}")
    return found.pop()


def _inflow_by_country(network: Network) -> Counter[str]:
    totals: Counter[str] = Counter()
    for key, w in network.weights.items():
        totals[network.country_of(key.dst)] += w
    return totals


def compute_index(
    institution: str,
    year: int,
    sn_network: Network,
    full_network: Network,
) -> InclusivenessScore:
    """Inclusiveness of ``institution`` in ``year``.

    ``full_network`` must hold all incoming students of the same year,
    special-needs students included. Counts are weighted in-strengths.
    """
    for net in (sn_network, full_network):
        if net.year != year:
            raise ValueError(f"network for {net.year} passed for year {year}")
    country = _country(institution, sn_network, full_network)
    i_sn_u = sn_network.in_strength(institution)
    i_sn_c = _inflow_by_country(sn_network)[country]
    i_u = full_network.in_strength(institution)
    i_c = _inflow_by_country(full_network)[country]
    return _score(institution, year, country, i_sn_u, i_sn_c, i_u, i_c)


def _score(institution, year, country, i_sn_u, i_sn_c, i_u, i_c) -> InclusivenessScore:
    if i_sn_c == 0:
        raise CountryNoIncomingSN(f"{year}: {country} has no incoming special-needs students ({institution})")
    if i_u == 0:
        raise UniversityNoIncoming(f"{year}: {institution} has no incoming students")
    if not (i_sn_u <= i_sn_c and i_u <= i_c and i_sn_u <= i_u):
        raise DataError(
            f"{year}: inconsistent counts for {institution}: "
            f"i_sn_u={i_sn_u} i_sn_c={i_sn_c} i_u={i_u} i_c={i_c}"
        )
    raw = Fraction(i_sn_u, i_sn_c) * Fraction(i_c, i_u)
    return InclusivenessScore(institution, year, country, i_sn_u, i_sn_c, i_u, i_c, raw, bound(raw))


def persistent_receivers(sn_networks: Mapping[int, Network], window: Iterable[int]) -> frozenset[str]:
    """Institutions with at least one incoming special-needs student in every window year."""
    window = list(window)
    if not window:
        raise ValueError("empty window")
    result = None
    for year in window:
        if year not in sn_networks:
            raise MissingYearError(f"no network for {year}")
        receivers = {v for v, s in sn_networks[year].in_strengths().items() if s >= 1}
        result = receivers if result is None else result & receivers
    return frozenset(result)


def period_average(
    scores: Mapping[int, InclusivenessScore] | Iterable[InclusivenessScore], window: Sequence[int]
) -> PeriodAverage:
    """Mean of the yearly bounded index over ``window``."""
    if not isinstance(scores, Mapping):
        scores = {s.year: s for s in scores}
    window = tuple(window)
    if not window:
        raise ValueError("empty window")
    missing = [y for y in window if y not in scores]
    if missing:
        raise MissingYearError(f"no score for year(s) {', '.join(map(str, missing))}")
    insts = {scores[y].institution for y in window}
    if len(insts) != 1:
        raise ValueError(f"scores from several institutions: {sorted(insts)}")
    mean = sum((scores[y].bounded_index for y in window), Fraction(0)) / len(window)
    return PeriodAverage(insts.pop(), window, mean)


def slopegraph_table(
    scores: Mapping[str, Mapping[int, InclusivenessScore]],
    early: Sequence[int],
    late: Sequence[int],
) -> list[SlopegraphRow]:
    """Early and late window means per institution, best late mean first."""
    rows = [
        SlopegraphRow(
            inst,
            period_average(by_year, early).mean_bounded_index,
            period_average(by_year, late).mean_bounded_index,
        )
        for inst, by_year in scores.items()
    ]
    rows.sort(key=lambda r: (-r.late_mean, r.institution))
    return rows


def yearly_scores(
    institutions: Iterable[str],
    sn_networks: Mapping[int, Network],
    full_networks: Mapping[int, Network],
    years: Iterable[int],
) -> dict[str, dict[int, InclusivenessScore]]:
    years = list(years)
    for y in years:
        for nets in (sn_networks, full_networks):
            if y not in nets:
                raise MissingYearError(f"no network for {y}")
    return {
        inst: {y: compute_index(inst, y, sn_networks[y], full_networks[y]) for y in years}
        for inst in sorted(institutions)
    }


def inclusiveness_slopegraph(
    sn_networks: Mapping[int, Network],
    full_networks: Mapping[int, Network],
    early: Sequence[int],
    late: Sequence[int],
) -> list[SlopegraphRow]:
    """Slopegraph rows for the institutions receiving in every year of both windows."""
    window = sorted(set(early) | set(late))
    receivers = persistent_receivers(sn_networks, window)
    scores = yearly_scores(receivers, sn_networks, full_networks, window)
    return slopegraph_table(scores, early, late)
