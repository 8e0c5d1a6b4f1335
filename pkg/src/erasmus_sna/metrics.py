"""Descriptive statistics of a yearly network.

All structural metrics work on the binary directed graph over the full node
universe, isolates included. Counts are integers and ratios are exact
``Fraction`` values; rounding happens only when a report is rendered.

Centralizations follow Freeman: the sum of differences to the most central
node, divided by the largest value that sum can take on ``n`` nodes.

==========  ========================  ==============================
measure     direction                 theoretical maximum of the sum
==========  ========================  ==============================
degree      in / out                  (n-1)^2
degree      all (in + out)            2 (n-1)(n-2)
closeness   in / out                  n-1   (out-star, in-star)
closeness   all (undirected paths)    (n-2)/2   (star)
==========  ========================  ==============================

Node closeness is harmonic (sum of reciprocal distances, unreachable
nodes contribute 0) divided by ``n - 1``, so it is defined on graphs with
isolates.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .errors import MetricDomainError
from .ingest import StemClass
from .network import ALL, CohortSlice, Network, NodeRole, node_roles, subnetwork


class Direction(str, Enum):
    IN = "in"
    OUT = "out"
    ALL = "all"


# (source degree, target degree) used by assortativity
PAIRINGS = {
    "out-in": ("out", "in"),
    "out-out": ("out", "out"),
    "in-in": ("in", "in"),
    "in-out": ("in", "out"),
}


def _degree_fn(network: Network, kind: str) -> Callable[[str], int]:
    if kind == "in":
        return network.in_degree
    if kind == "out":
        return network.out_degree
    return lambda v: network.in_degree(v) + network.out_degree(v)


def density(network: Network) -> Fraction:
    n = network.n
    if n < 2:
        raise MetricDomainError(f"density needs at least 2 nodes, got {n}")
    return Fraction(len(network.arcs), n * (n - 1))


def degree_centralization(network: Network, direction: Direction | str = Direction.ALL) -> Fraction:
    direction = Direction(direction)
    n = network.n
    if n < 3:
        raise MetricDomainError(f"centralization needs at least 3 nodes, got {n}")
    deg = _degree_fn(network, direction.value)
    cs = [deg(v) for v in network.nodes]
    top = max(cs)
    denom = 2 * (n - 1) * (n - 2) if direction is Direction.ALL else (n - 1) ** 2
    return Fraction(sum(top - c for c in cs), denom)


def _neighbours(network: Network, direction: Direction) -> Callable[[str], Iterable[str]]:
    if direction is Direction.OUT:
        return network.successors
    if direction is Direction.IN:
        return network.predecessors
    return lambda v: network.successors(v) | network.predecessors(v)


def harmonic_closeness(network: Network, direction: Direction | str = Direction.OUT) -> dict[str, Fraction]:
    """Harmonic closeness of every node, normalized by ``n - 1``.

    ``in`` measures how easily a node is reached, ``out`` how easily it
    reaches others, ``all`` ignores arc direction.
    """
    direction = Direction(direction)
    n = network.n
    nbrs = _neighbours(network, direction)
    active = network.active_nodes()
    scores = {}
    for source in network.nodes:
        if source not in active:
            scores[source] = Fraction(0)
            continue
        dist = {source: 0}
        queue = deque([source])
        total = Fraction(0)
        while queue:
            u = queue.popleft()
            for v in nbrs(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    total += Fraction(1, dist[v])
                    queue.append(v)
        scores[source] = total / (n - 1)
    return scores


def closeness_centralization(network: Network, direction: Direction | str = Direction.ALL) -> Fraction:
    direction = Direction(direction)
    n = network.n
    if n < 3:
        raise MetricDomainError(f"centralization needs at least 3 nodes, got {n}")
    cs = list(harmonic_closeness(network, direction).values())
    top = max(cs)
    spread = sum(top - c for c in cs)
    bound = Fraction(n - 2, 2) if direction is Direction.ALL else Fraction(n - 1)
    return spread / bound


def assortativity(network: Network, pairing: str = "out-in") -> float | None:
    """Pearson correlation of endpoint degrees over arcs.

    Returns ``None`` when either degree sequence is constant.
    """
    src_kind, dst_kind = PAIRINGS[pairing]
    arcs = sorted(network.arcs)
    if len(arcs) < 2:
        raise MetricDomainError(f"assortativity needs at least 2 arcs, got {len(arcs)}")
    sdeg, ddeg = _degree_fn(network, src_kind), _degree_fn(network, dst_kind)
    xs = [sdeg(s) for s, _ in arcs]
    ys = [ddeg(d) for _, d in arcs]
    m = len(arcs)
    mx, my = Fraction(sum(xs), m), Fraction(sum(ys), m)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    r = float(sxy) / math.sqrt(float(sxx) * float(syy))
    return max(-1.0, min(1.0, r))


def reciprocity(network: Network) -> Fraction:
    arcs = network.arcs
    if not arcs:
        raise MetricDomainError("reciprocity needs at least 1 arc")
    mutual = sum(1 for s, d in arcs if (d, s) in arcs)
    return Fraction(mutual, len(arcs))


@dataclass(frozen=True)
class RankingEntry:
    institution: str
    degree: int
    direction: Direction


def degree_ranking(network: Network, direction: Direction | str) -> list[RankingEntry]:
    """All nodes with positive degree, highest first, ties by code."""
    direction = Direction(direction)
    if direction is Direction.ALL:
        raise ValueError("rankings are by in- or out-degree")
    deg = _degree_fn(network, direction.value)
    entries = [RankingEntry(v, deg(v), direction) for v in network.nodes if deg(v) > 0]
    entries.sort(key=lambda e: (-e.degree, e.institution))
    return entries


def top_k(network: Network, direction: Direction | str, k: int) -> list[RankingEntry]:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return degree_ranking(network, direction)[:k]


@dataclass(frozen=True)
class HitsResult:
    hubs: dict[str, float]
    authorities: dict[str, float]
    converged: bool
    iterations: int


def adjacency_matrix(network: Network) -> tuple[list[str], np.ndarray]:
    nodes = network.sorted_nodes()
    index = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)))
    for s, d in network.arcs:
        a[index[s], index[d]] = 1.0
    return nodes, a


def hits(network: Network, tolerance: float = 1e-12, max_iterations: int = 10_000) -> HitsResult:
    """Hub and authority scores by power iteration on the binary adjacency.

    Both vectors are L2-normalized after every step and iteration stops
    when neither moves by ``tolerance`` or more in max-norm. When the
    iteration budget runs out the last iterate is returned with
    ``converged=False``.
    """
    if not network.arcs:
        raise MetricDomainError("hits needs at least 1 arc")
    nodes, a = adjacency_matrix(network)
    h = np.ones(len(nodes)) / math.sqrt(len(nodes))
    auth = np.zeros(len(nodes))
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        new_auth = a.T @ h
        new_auth /= np.linalg.norm(new_auth)
        new_h = a @ new_auth
        new_h /= np.linalg.norm(new_h)
        delta = max(np.abs(new_h - h).max(), np.abs(new_auth - auth).max())
        h, auth = new_h, new_auth
        if delta < tolerance:
            converged = True
            break
    return HitsResult(
        dict(zip(nodes, h.tolist())),
        dict(zip(nodes, auth.tolist())),
        converged,
        it,
    )


@dataclass(frozen=True)
class StrengthCounts:
    total: int
    stem: int
    non_stem: int


def strength(network: Network, slice: CohortSlice = ALL) -> StrengthCounts:
    stem = non_stem = 0
    for key, w in network.weights.items():
        if not slice.matches(key):
            continue
        if key.stem is StemClass.STEM:
            stem += w
        else:
            non_stem += w
    return StrengthCounts(stem + non_stem, stem, non_stem)


@dataclass(frozen=True)
class MetricsReport:
    """Summary statistics of one (year, slice) network.

    Ratios that are undefined for the slice (too few nodes or arcs, or a
    constant degree sequence) are ``None``.
    """

    year: int
    slice: CohortSlice
    universe: int
    active: int
    sending: int
    receiving: int
    partnerships: int
    active_connections: int
    isolates: int
    density: Fraction | None
    degree_centralization: dict[str, Fraction | None]
    closeness_centralization: dict[str, Fraction | None]
    assortativity: float | None
    reciprocity: Fraction | None
    strength: StrengthCounts


def _or_none(fn, *args):
    try:
        return fn(*args)
    except MetricDomainError:
        return None


def metrics_report(network: Network, pairing: str = "out-in") -> MetricsReport:
    roles = node_roles(network)
    sending = sum(1 for r in roles.values() if r in (NodeRole.SENDER, NodeRole.BOTH))
    receiving = sum(1 for r in roles.values() if r in (NodeRole.RECEIVER, NodeRole.BOTH))
    active = sum(1 for r in roles.values() if r is not NodeRole.INACTIVE)
    dirs = (Direction.ALL, Direction.OUT, Direction.IN)
    return MetricsReport(
        year=network.year,
        slice=network.slice,
        universe=network.n,
        active=active,
        sending=sending,
        receiving=receiving,
        partnerships=network.partnerships,
        active_connections=network.active_connections,
        isolates=network.n - active,
        density=_or_none(density, network),
        degree_centralization={d.value: _or_none(degree_centralization, network, d) for d in dirs},
        closeness_centralization={d.value: _or_none(closeness_centralization, network, d) for d in dirs},
        assortativity=_or_none(assortativity, network, pairing),
        reciprocity=_or_none(reciprocity, network),
        strength=strength(network),
    )


def slice_reports(network: Network, slices: Iterable[CohortSlice], pairing: str = "out-in") -> list[MetricsReport]:
    return [metrics_report(subnetwork(network, s), pairing) for s in slices]
