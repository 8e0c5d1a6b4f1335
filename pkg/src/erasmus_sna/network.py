"""Yearly directed weighted networks of institutions.

A :class:`Network` is built over an explicit node universe so that isolates
are part of the graph and per-year isolate counts are comparable. Weights
are student counts keyed by ``(src, dst, gender, stem, field)``; the arc
set is the support of the weights.
"""

from __future__ import annotations

import csv
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .errors import ConflictingCountryError, DataError, GeoTableError, UnknownInstitutionError
from .ingest import Gender, MobilityRecord, StemClass, normalize_code


class UniversePolicy(str, Enum):
    SPECIAL_NEEDS = "sn"
    ALL = "all"


class SplitPolicy(str, Enum):
    """Granularity of the field dimension in weight keys."""

    BINARY = "binary"  # STEM / non-STEM
    FIELD = "field"  # full ISCED-F broad field


class NodeRole(str, Enum):
    SENDER = "sender"
    RECEIVER = "receiver"
    BOTH = "both"
    INACTIVE = "inactive"


class FlowKey(NamedTuple):
    src: str
    dst: str
    gender: Gender
    stem: StemClass
    field: str | None = None


@dataclass(frozen=True)
class NodeAttrs:
    country: str | None = None
    city: str | None = None
    lat: float | None = None
    lon: float | None = None

    @property
    def has_coords(self) -> bool:
        return self.lat is not None and self.lon is not None


@dataclass(frozen=True)
class CohortSlice:
    gender: Gender | None = None
    stem: StemClass | None = None

    def matches(self, key: FlowKey) -> bool:
        return (self.gender is None or key.gender == self.gender) and (
            self.stem is None or key.stem == self.stem
        )

    def __and__(self, other: "CohortSlice") -> "CohortSlice":
        merged = {}
        for axis in ("gender", "stem"):
            a, b = getattr(self, axis), getattr(other, axis)
            if a is not None and b is not None and a != b:
                raise ValueError(f"contradictory {axis} slices: {a} and {b}")
            merged[axis] = a if a is not None else b
        return CohortSlice(**merged)

    @property
    def label(self) -> str:
        parts = [self.gender.value if self.gender else "all"]
        if self.stem:
            parts.append(self.stem.value)
        return "/".join(parts)


ALL = CohortSlice()


@dataclass(frozen=True, eq=False)
class Network:
    year: int
    nodes: frozenset[str]
    weights: Mapping[FlowKey, int]
    node_attrs: Mapping[str, NodeAttrs] = field(default_factory=dict)
    slice: CohortSlice = ALL

    def __post_init__(self):
        weights = MappingProxyType(dict(self.weights))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "node_attrs", MappingProxyType(dict(self.node_attrs)))
        out_n: dict[str, set[str]] = defaultdict(set)
        in_n: dict[str, set[str]] = defaultdict(set)
        for key, w in weights.items():
            if not isinstance(w, int) or w <= 0:
                raise ValueError(f"non-positive weight {w!r} for {key}")
            if key.src == key.dst:
                raise ValueError(f"self-loop at {key.src}")
            for end in (key.src, key.dst):
                if end not in self.nodes:
                    raise UnknownInstitutionError(f"{end} is not in the node universe")
            out_n[key.src].add(key.dst)
            in_n[key.dst].add(key.src)
        arcs = frozenset((s, d) for s, ds in out_n.items() for d in ds)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "_out", {k: frozenset(v) for k, v in out_n.items()})
        object.__setattr__(self, "_in", {k: frozenset(v) for k, v in in_n.items()})

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.year == other.year
            and self.nodes == other.nodes
            and dict(self.weights) == dict(other.weights)
            and dict(self.node_attrs) == dict(other.node_attrs)
            and self.slice == other.slice
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def successors(self, node: str) -> frozenset[str]:
        return self._out.get(node, frozenset())

    def predecessors(self, node: str) -> frozenset[str]:
        return self._in.get(node, frozenset())

    def out_degree(self, node: str) -> int:
        return len(self.successors(node))

    def in_degree(self, node: str) -> int:
        return len(self.predecessors(node))

    def in_strength(self, node: str) -> int:
        return sum(w for k, w in self.weights.items() if k.dst == node)

    def in_strengths(self) -> dict[str, int]:
        out: Counter[str] = Counter()
        for k, w in self.weights.items():
            out[k.dst] += w
        return dict(out)

    def active_nodes(self) -> set[str]:
        return set(self._out) | set(self._in)

    def isolates(self) -> set[str]:
        return set(self.nodes) - self.active_nodes()

    @property
    def partnerships(self) -> int:
        return len(self.arcs)

    @property
    def active_connections(self) -> int:
        return len(self.weights)

    def country_of(self, node: str) -> str | None:
        attrs = self.node_attrs.get(node)
        return attrs.country if attrs else None


def build_universe(
    records: Iterable[MobilityRecord], policy: UniversePolicy | str = UniversePolicy.SPECIAL_NEEDS
) -> frozenset[str]:
    """Union of institutions over all years.

    With the special-needs policy only records carrying a positive grant
    contribute; with ``all`` every record does.
    """
    policy = UniversePolicy(policy)
    records = list(records)
    if not records:
        raise DataError("cannot build a node universe from no records")
    nodes = set()
    for r in records:
        if policy is UniversePolicy.SPECIAL_NEEDS and not r.special_needs_grant > 0:
            continue
        nodes.add(r.home_institution.normalized)
        nodes.add(r.host_institution.normalized)
    if not nodes:
        raise DataError("no records qualify for the node universe")
    return frozenset(nodes)


def _attribute_countries(records: Iterable[MobilityRecord]) -> dict[str, str]:
    seen: dict[str, str] = {}
    for r in records:
        for inst, country in ((r.home_institution, r.home_country), (r.host_institution, r.host_country)):
            prev = seen.setdefault(inst.normalized, country)
            if prev != country:
                raise ConflictingCountryError(f"{inst.normalized} attributed to both {prev} and {country}")
    return seen


def build_network(
    records: Iterable[MobilityRecord],
    universe: Iterable[str],
    year: int | None = None,
    geo_table: Mapping[str, NodeAttrs] | None = None,
    split: SplitPolicy | str = SplitPolicy.BINARY,
) -> Network:
    """Aggregate one year's records into a network over ``universe``."""
    records = list(records)
    split = SplitPolicy(split)
    years = {r.year for r in records}
    if year is None:
        if len(years) != 1:
            raise ValueError(f"records span years {sorted(years)}; pass year explicitly")
        year = years.pop()
    elif years - {year}:
        raise ValueError(f"records from {sorted(years - {year})} passed for year {year}")
    nodes = frozenset(universe)
    weights: Counter[FlowKey] = Counter()
    for r in records:
        src, dst = r.home_institution.normalized, r.host_institution.normalized
        for end in (src, dst):
            if end not in nodes:
                raise UnknownInstitutionError(f"{end} is not in the node universe")
        fos = r.field_of_study if split is SplitPolicy.FIELD else None
        weights[FlowKey(src, dst, r.gender, r.stem, fos)] += 1

    countries = _attribute_countries(records)
    geo = geo_table or {}
    attrs = {}
    for node in nodes:
        g = geo.get(node)
        country = countries.get(node) or (g.country if g else None)
        if g is None and country is None:
            continue
        attrs[node] = NodeAttrs(country, *(g.city, g.lat, g.lon) if g else (None, None, None))
    return Network(year, nodes, dict(weights), attrs)


def subnetwork(network: Network, slice: CohortSlice) -> Network:
    """Restrict weights to ``slice``; the node universe is unchanged."""
    combined = network.slice & slice
    weights = {k: w for k, w in network.weights.items() if slice.matches(k)}
    return Network(network.year, network.nodes, weights, network.node_attrs, combined)


def node_roles(network: Network) -> dict[str, NodeRole]:
    roles = {}
    for node in network.sorted_nodes():
        out_d, in_d = network.out_degree(node), network.in_degree(node)
        if out_d and in_d:
            roles[node] = NodeRole.BOTH
        elif out_d:
            roles[node] = NodeRole.SENDER
        elif in_d:
            roles[node] = NodeRole.RECEIVER
        else:
            roles[node] = NodeRole.INACTIVE
    return roles


GEO_COLUMNS = ("institution_code", "city", "country", "lat", "lon")


def load_geo_table(path: str | os.PathLike, delimiter: str = ",") -> dict[str, NodeAttrs]:
    """Read ``institution_code, city, country, lat, lon``; blank coordinates are allowed."""
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise GeoTableError(f"cannot read geo table {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines(), delimiter=delimiter)
    missing = [c for c in GEO_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise GeoTableError(f"{path}: missing columns {', '.join(missing)}")
    table: dict[str, NodeAttrs] = {}
    for row in reader:
        line = reader.line_num
        code = normalize_code(row["institution_code"] or "")
        if not code:
            raise GeoTableError(f"{path}:{line}: empty institution code")
        if code in table:
            raise GeoTableError(f"{path}:{line}: duplicate institution {code}")
        lat_s, lon_s = (row["lat"] or "").strip(), (row["lon"] or "").strip()
        lat = lon = None
        if lat_s or lon_s:
            try:
                lat, lon = float(lat_s), float(lon_s)
            except ValueError:
                raise GeoTableError(f"{path}:{line}: bad coordinates {lat_s!r}, {lon_s!r}") from None
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise GeoTableError(f"{path}:{line}: coordinates out of range")
        country = (row["country"] or "").strip().upper() or None
        table[code] = NodeAttrs(country, (row["city"] or "").strip() or None, lat, lon)
    return table
