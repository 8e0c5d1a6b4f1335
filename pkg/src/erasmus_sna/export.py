"""File exporters. Every writer here is byte-deterministic for equal input."""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import IO, Iterable, Mapping, Sequence

from .inclusiveness import SlopegraphRow
from .metrics import MetricsReport, RankingEntry
from .network import Network, NodeRole, node_roles
from .shares import ShareReport, ShareRow

RATIO_PLACES = 4


def fmt_ratio(value, places: int = RATIO_PLACES, undefined: str = "Undefined") -> str:
    """Fixed-point rendering, half away from zero; ``None`` becomes ``undefined``."""
    if value is None:
        return undefined
    with localcontext() as ctx:
        ctx.prec = 60
        if isinstance(value, Fraction):
            d = Decimal(value.numerator) / Decimal(value.denominator)
        elif isinstance(value, int):
            d = Decimal(value)
        else:
            d = Decimal(repr(float(value)))
        q = d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    if q == 0:
        q = abs(q)
    return f"{q:f}"


# --- metrics tables ------------------------------------------------------------

# (label, indent, getter, kind)
_TABLE_ROWS = [
    ("Active Universities", 0, lambda r: r.active, "count"),
    ("sending", 1, lambda r: r.sending, "count"),
    ("receiving", 1, lambda r: r.receiving, "count"),
    ("University partnerships", 0, lambda r: r.partnerships, "count"),
    ("Active connections", 0, lambda r: r.active_connections, "count"),
    ("Isolates", 0, lambda r: r.isolates, "count"),
    ("Density", 0, lambda r: r.density, "ratio"),
    ("Degree", 0, lambda r: r.degree_centralization["all"], "ratio"),
    ("out", 1, lambda r: r.degree_centralization["out"], "ratio"),
    ("in", 1, lambda r: r.degree_centralization["in"], "ratio"),
    ("Closeness", 0, lambda r: r.closeness_centralization["all"], "ratio"),
    ("out", 1, lambda r: r.closeness_centralization["out"], "ratio"),
    ("in", 1, lambda r: r.closeness_centralization["in"], "ratio"),
    ("Assortativity", 0, lambda r: r.assortativity, "ratio"),
    ("Strength", 0, lambda r: r.strength.total, "count"),
    ("STEM", 1, lambda r: r.strength.stem, "count"),
    ("non-STEM", 1, lambda r: r.strength.non_stem, "count"),
]

_CSV_ROWS = [
    ("universe", lambda r: r.universe, "count"),
    ("active", lambda r: r.active, "count"),
    ("sending", lambda r: r.sending, "count"),
    ("receiving", lambda r: r.receiving, "count"),
    ("partnerships", lambda r: r.partnerships, "count"),
    ("active_connections", lambda r: r.active_connections, "count"),
    ("isolates", lambda r: r.isolates, "count"),
    ("density", lambda r: r.density, "ratio"),
    ("degree_centralization_all", lambda r: r.degree_centralization["all"], "ratio"),
    ("degree_centralization_out", lambda r: r.degree_centralization["out"], "ratio"),
    ("degree_centralization_in", lambda r: r.degree_centralization["in"], "ratio"),
    ("closeness_centralization_all", lambda r: r.closeness_centralization["all"], "ratio"),
    ("closeness_centralization_out", lambda r: r.closeness_centralization["out"], "ratio"),
    ("closeness_centralization_in", lambda r: r.closeness_centralization["in"], "ratio"),
    ("assortativity", lambda r: r.assortativity, "ratio"),
    ("reciprocity", lambda r: r.reciprocity, "ratio"),
    ("strength", lambda r: r.strength.total, "count"),
    ("strength_stem", lambda r: r.strength.stem, "count"),
    ("strength_non_stem", lambda r: r.strength.non_stem, "count"),
]


def _cell(value, kind: str, places: int) -> str:
    return str(value) if kind == "count" else fmt_ratio(value, places)


def write_metrics_csv(reports: Sequence[MetricsReport], stream: IO[str], places: int = RATIO_PLACES) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["metric"] + [r.slice.label for r in reports])
    for name, get, kind in _CSV_ROWS:
        w.writerow([name] + [_cell(get(r), kind, places) for r in reports])


def metrics_table(reports: Sequence[MetricsReport], places: int = RATIO_PLACES) -> str:
    """Aligned plain-text table, one column per slice."""
    header = [""] + [r.slice.label for r in reports]
    body = [
        ["  " * indent + label] + [_cell(get(r), kind, places) for r in reports]
        for label, indent, get, kind in _TABLE_ROWS
    ]
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = []
    years = sorted({r.year for r in reports})
    lines.append(f"Summary statistics - {', '.join(map(str, years))}")
    for row in [header] + body:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def write_ranking_csv(entries: Iterable[RankingEntry], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["rank", "institution", "degree"])
    for i, e in enumerate(entries, 1):
        w.writerow([i, e.institution, e.degree])


def write_slopegraph_csv(rows: Iterable[SlopegraphRow], stream: IO[str], places: int = RATIO_PLACES) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["institution", "early_mean", "late_mean", "delta"])
    for r in rows:
        w.writerow([r.institution, fmt_ratio(r.early_mean, places), fmt_ratio(r.late_mean, places), fmt_ratio(r.delta, places)])


def write_share_csv(report: ShareReport, stream: IO[str], places: int = RATIO_PLACES) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["Country", "M %", "F %", "overall %"])
    for r in report.rows:
        w.writerow([r.country] + [fmt_ratio(v, places, "NA") for v in (r.male_pct, r.female_pct, r.overall_pct)])


def write_share_counts_csv(report: ShareReport, stream: IO[str], places: int = RATIO_PLACES) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["country", "sn_outgoing", "sn_F", "sn_M", "total_outgoing", "sn_over_total_pct", "total_over_population_pct"])
    by_country = {r.country: r for r in report.rows}
    for c, k in report.counts.items():
        row = by_country.get(c)
        sn_pct = fmt_ratio(Fraction(100 * k.sn_outgoing, k.total_outgoing), places, "NA") if k.total_outgoing else "NA"
        pop_pct = fmt_ratio(row.total_over_population_pct, places, "NA") if row else "NA"
        w.writerow([c, k.sn_outgoing, k.sn_female, k.sn_male, k.total_outgoing, sn_pct, pop_pct])


def write_timeseries_csv(rows: Iterable[ShareRow], stream: IO[str], places: int = RATIO_PLACES) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["year", "sn", "total", "F", "M", "sn_pct", "fm_ratio"])
    for r in rows:
        w.writerow([r.year, r.sn, r.total, r.female, r.male, fmt_ratio(r.pct, places), fmt_ratio(r.fm_ratio, places, "NA")])


# --- geographic and graph exports ------------------------------------------------


def network_geojson(
    network: Network, roles: Mapping[str, NodeRole] | None = None
) -> tuple[dict, list[str]]:
    """FeatureCollection of node Points and flow LineStrings.

    Coordinates are ``[lon, lat]``. Nodes without coordinates get a null
    geometry, as do flows touching them; their codes are returned as the
    second element.
    """
    roles = roles if roles is not None else node_roles(network)
    attrs = network.node_attrs
    features = []
    missing = []
    for node in network.sorted_nodes():
        a = attrs.get(node)
        geom = None
        if a is not None and a.has_coords:
            geom = {"type": "Point", "coordinates": [a.lon, a.lat]}
        else:
            missing.append(node)
        features.append(
            {
                "type": "Feature",
                "geometry": geom,
                "properties": {
                    "institution": node,
                    "country": a.country if a else None,
                    "role": roles[node].value,
                },
            }
        )
    keys = sorted(network.weights, key=lambda k: (k.src, k.dst, k.gender.value, k.stem.value, k.field or ""))
    for key in keys:
        s, d = attrs.get(key.src), attrs.get(key.dst)
        geom = None
        if s is not None and d is not None and s.has_coords and d.has_coords:
            geom = {"type": "LineString", "coordinates": [[s.lon, s.lat], [d.lon, d.lat]]}
        props = {
            "src": key.src,
            "dst": key.dst,
            "gender": key.gender.value,
            "stem": key.stem.value,
            "weight": network.weights[key],
        }
        if key.field is not None:
            props["field"] = key.field
        features.append({"type": "Feature", "geometry": geom, "properties": props})
    return {"type": "FeatureCollection", "features": features}, missing


def dumps_geojson(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def network_dot(network: Network) -> str:
    """Graphviz digraph; flows are summed per arc and shown as edge labels."""
    arc_w: dict[tuple[str, str], int] = {}
    for k, w in network.weights.items():
        arc_w[(k.src, k.dst)] = arc_w.get((k.src, k.dst), 0) + w
    out = io.StringIO()
    out.write(f"digraph {_dot_id(f'erasmus {network.year} {network.slice.label}')} {{\n")
    for node in network.sorted_nodes():
        out.write(f"  {_dot_id(node)};\n")
    for (s, d), w in sorted(arc_w.items()):
        out.write(f"  {_dot_id(s)} -> {_dot_id(d)} [label=\"{w}\", weight={w}];\n")
    out.write("}\n")
    return out.getvalue()
