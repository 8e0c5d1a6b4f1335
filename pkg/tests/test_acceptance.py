"""Acceptance suite. Each test carries its criterion number; the terminal
summary prints one PASS/FAIL/SKIP line per criterion."""

import io
import logging
import os
import random
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

import oracles
from conftest import DATA, digraph, rec
from erasmus_sna.config import load_config
from erasmus_sna.export import fmt_ratio, write_slopegraph_csv
from erasmus_sna.inclusiveness import bound, inclusiveness_slopegraph, persistent_receivers, yearly_scores
from erasmus_sna.ingest import Gender, StemClass, load_schema_file, parse_records, write_rejects
from erasmus_sna.metrics import (
    PAIRINGS,
    assortativity,
    closeness_centralization,
    degree_centralization,
    density,
    hits,
    metrics_report,
    reciprocity,
    top_k,
)
from erasmus_sna.network import CohortSlice, FlowKey, Network, build_network, subnetwork
from erasmus_sna.pipeline import Study
from erasmus_sna.reference import REFERENCE_COUNTS, REFERENCE_UNIVERSE, compare_to_reference
from erasmus_sna.shares import PopulationRow, PopulationTable, country_shares, sn_share_timeseries


def _universe(n):
    return frozenset(f"U{i:04d}" for i in range(n))


def _arcs_network(nodes, m):
    names = sorted(nodes)
    arcs = [(names[i], names[i + 1]) for i in range(m)]
    return Network(2008, nodes, {FlowKey(s, d, Gender.F, StemClass.NON_STEM): 1 for s, d in arcs})


# --- 1 ---------------------------------------------------------------------------------


@pytest.mark.criterion(1, "density 901 nodes: 202 -> 0.0002, 328 -> 0.0004, exact, < 1 ms")
@pytest.mark.parametrize("m,exact,shown", [(202, Fraction(202, 810900), "0.0002"), (328, Fraction(328, 810900), "0.0004")])
def test_c1_density(m, exact, shown):
    net = _arcs_network(_universe(901), m)
    t0 = time.perf_counter()
    d = density(net)
    elapsed = time.perf_counter() - t0
    assert d == exact
    # 328 / 810900 = 0.00040449..; the six-place figure 0.000405 quoted for it
    # comes from rounding twice, so the correctly rounded value is checked
    assert f"{float(d):.6f}" == {202: "0.000249", 328: "0.000404"}[m]
    assert fmt_ratio(d) == shown
    assert elapsed < 1e-3


# --- 2 ---------------------------------------------------------------------------------


@pytest.mark.criterion(2, "partition identities: active + isolates = universe, strength = STEM + non-STEM")
def test_c2_partitions():
    t0 = time.perf_counter()
    for year, slices in REFERENCE_COUNTS.items():
        ref = slices["all"]
        assert ref["active"] + ref["isolates"] == REFERENCE_UNIVERSE
        assert ref["strength"] == ref["strength_stem"] + ref["strength_non_stem"]
    study = Study(load_config(DATA / "fixture" / "config.yaml"))
    reports = []
    for y in study.years:
        net = study.sn_network(y)
        reports += [metrics_report(subnetwork(net, CohortSlice(g))) for g in (None, Gender.F, Gender.M, Gender.UNKNOWN)]
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(3, 12)
        arcs = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < 0.2]
        reports.append(metrics_report(digraph(n, arcs)))
    for r in reports:
        assert r.active + r.isolates == r.universe
        assert r.strength.total == r.strength.stem + r.strength.non_stem
    assert time.perf_counter() - t0 < 1.0


# --- 3 ---------------------------------------------------------------------------------


def _connections_fixture(female, male, year):
    recs = []
    for i in range(female):
        recs.append(rec(f"F SRC{i:03d}", "F DST001", "F", year=year, home_country="FF", host_country="FF"))
    for i in range(male):
        recs.append(rec(f"M SRC{i:03d}", "M DST001", "M", year=year, home_country="MM", host_country="MM"))
    # a repeated pair adds strength but not connections
    recs.append(recs[0])
    return build_network(recs, {r.home_institution.normalized for r in recs} | {"F DST001", "M DST001"})


@pytest.mark.criterion(3, "F/M active-connection ratio 122/80 = 1.525 and 203/125 = 1.624")
@pytest.mark.parametrize("female,male,year,ratio", [(122, 80, 2008, "1.525"), (203, 125, 2013, "1.624")])
def test_c3_gender_ratio(female, male, year, ratio):
    net = _connections_fixture(female, male, year)
    f = subnetwork(net, CohortSlice(Gender.F)).active_connections
    m = subnetwork(net, CohortSlice(Gender.M)).active_connections
    assert (f, m) == (female, male)
    assert net.active_connections == f + m
    assert fmt_ratio(Fraction(f, m), 3) == ratio


# --- 4 ---------------------------------------------------------------------------------


@pytest.mark.criterion(4, "bounded index: 0 -> -1, 1 -> 0, 3 -> 0.5, monotone, antisymmetric")
def test_c4_bound():
    assert (bound(0), bound(1), bound(3)) == (-1, 0, Fraction(1, 2))
    grid = [i / 100 for i in range(1000)]
    values = [bound(x) for x in grid]
    assert all(a < b for a, b in zip(values, values[1:]))
    for k in range(1, 101):
        x = k / 10
        assert abs(bound(1 / x) + bound(x)) <= 1e-12


# --- 5 ---------------------------------------------------------------------------------


@pytest.mark.criterion(5, "oracle equivalence on 200 random digraphs n <= 8, HITS within 1e-9, < 30 s")
def test_c5_oracles():
    rng = random.Random(5)
    t0 = time.perf_counter()
    for _ in range(200):
        n = rng.randint(3, 8)
        p = rng.random()
        arcs = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
        net, a = digraph(n, arcs), oracles.matrix(n, arcs)
        names = net.sorted_nodes()
        assert density(net) == oracles.density(a)
        for d in ("in", "out", "all"):
            assert degree_centralization(net, d) == oracles.degree_centralization(a, d)
            assert closeness_centralization(net, d) == oracles.closeness_centralization(a, d)
        if len(arcs) >= 2:
            for pairing, (sk, dk) in PAIRINGS.items():
                got, want = assortativity(net, pairing), oracles.assortativity(a, sk, dk)
                assert (got is None) == (want is None)
                assert got is None or abs(got - want) <= 1e-9
        if not arcs:
            continue
        assert reciprocity(net) == oracles.reciprocity(a)
        for d in ("in", "out"):
            want = oracles.ranking(a, d, names)
            for k in (1, 3, n):
                assert [(e.institution, e.degree) for e in top_k(net, d, k)] == want[:k]
        res = hits(net, tolerance=1e-12)
        assert res.converged
        hubs, auth = oracles.hits(a)
        assert np.abs(np.array([res.hubs[v] for v in names]) - hubs).max() <= 1e-9
        assert np.abs(np.array([res.authorities[v] for v in names]) - auth).max() <= 1e-9
    assert time.perf_counter() - t0 < 30


# --- 6 ---------------------------------------------------------------------------------


@pytest.mark.criterion(6, "inclusiveness on the six-year fixture: receivers, scores, means, golden CSV")
def test_c6_inclusiveness():
    incl6 = DATA / "incl6"
    study = Study(load_config(incl6 / "config.yaml"))
    sn = {y: study.sn_network(y) for y in study.years}
    full = {y: study.full_network(y) for y in study.years}
    early, late = (2008, 2009, 2010), (2011, 2012, 2013)
    assert persistent_receivers(sn, early + late) == {"E GRANADA01", "N OSLO01"}
    F = Fraction
    hand = {
        "E GRANADA01": [F(0), F(1, 7), F(1, 3), F(-1, 5), F(-1, 5), F(0)],
        "N OSLO01": [F(1, 7), F(-1, 7), F(0), F(1, 5), F(1, 3), F(1, 7)],
    }
    scores = yearly_scores(hand, sn, full, early + late)
    for inst, expected in hand.items():
        assert [scores[inst][y].bounded_index for y in early + late] == expected
    rows = {r.institution: r for r in inclusiveness_slopegraph(sn, full, early, late)}
    assert (rows["E GRANADA01"].early_mean, rows["E GRANADA01"].late_mean) == (F(10, 63), F(-2, 15))
    assert (rows["N OSLO01"].early_mean, rows["N OSLO01"].late_mean) == (F(0), F(71, 315))
    buf = io.StringIO()
    write_slopegraph_csv(inclusiveness_slopegraph(sn, full, early, late), buf)
    assert buf.getvalue().encode() == (incl6 / "slopegraph.golden.csv").read_bytes()


# --- 7 ---------------------------------------------------------------------------------


@pytest.mark.criterion(7, "shares: 0.12% and F/M 1.54; Hungary 0.0487 / 0.0841 / 0.0684")
def test_c7_shares():
    sn = [rec("A X01", "B X01", "F")] * 77 + [rec("A X01", "B X01", "M")] * 50
    [row] = sn_share_timeseries(sn + [rec("A X01", "B X01", grant=0)] * (105000 - 127))
    assert (fmt_ratio(row.pct, 2), fmt_ratio(row.fm_ratio, 2)) == ("0.12", "1.54")

    table = PopulationTable(
        {
            ("HU", "F"): PopulationRow(309160, Fraction(1, 10)),
            ("HU", "M"): PopulationRow(246410, Fraction(1, 10)),
            ("HU", "All"): PopulationRow(555570, Fraction(1, 10)),
        }
    )

    def hu(g, grant=1.0):
        return rec("HU BUDAPES01", "E GRANADA01", g, year=2013, grant=grant, home_country="HU", host_country="ES")

    report = country_shares([hu("F")] * 26 + [hu("M")] * 12 + [hu("F", 0)] * 900, table)
    [hu_row] = report.rows
    assert [fmt_ratio(v) for v in (hu_row.male_pct, hu_row.female_pct, hu_row.overall_pct)] == ["0.0487", "0.0841", "0.0684"]


# --- 8 ---------------------------------------------------------------------------------


@pytest.mark.criterion(8, "two schema vintages parse to the same record multiset; rejects match golden")
def test_c8_vintages():
    vintages = DATA / "vintages"
    parsed = {}
    for name in ("boolean", "amount"):
        [schema] = load_schema_file(vintages / f"{name}.yaml")
        parsed[name] = parse_records(vintages / schema.filename, schema)
    a, b = parsed["boolean"][0], parsed["amount"][0]
    assert a and Counter(r.key() for r in a) == Counter(r.key() for r in b)
    buf = io.StringIO()
    write_rejects(parsed["boolean"][1] + parsed["amount"][1], buf)
    assert buf.getvalue() == (vintages / "rejects.golden.csv").read_text()


# --- 9 ---------------------------------------------------------------------------------

FULL_CONFIG = os.environ.get("ERASMUS_FULL_CONFIG")


@pytest.mark.criterion(9, "full-data comparison with published 2008/2013 counts (non-gating)")
@pytest.mark.skipif(not FULL_CONFIG, reason="set ERASMUS_FULL_CONFIG to a run config over the downloaded source files")
def test_c9_full_data(caplog):
    study = Study(load_config(FULL_CONFIG))
    log = logging.getLogger("erasmus_sna.acceptance")
    rows = []
    for year in (2008, 2013):
        net = study.sn_network(year)
        reports = [metrics_report(subnetwork(net, CohortSlice(g))) for g in (None, Gender.M, Gender.F)]
        rows += compare_to_reference(reports)
    for c in rows:
        if c.deviation:
            log.warning("%d %s %s: computed %d, published %d", c.year, c.slice, c.metric, c.computed, c.reference)
    # exact replication is not required; the comparison must cover every published count
    assert len(rows) == sum(v is not None for s in REFERENCE_COUNTS.values() for d in s.values() for v in d.values())
