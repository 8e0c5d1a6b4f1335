import io
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from erasmus_sna.config import load_config
from erasmus_sna.errors import CountryNoIncomingSN, MissingYearError, UniversityNoIncoming
from erasmus_sna.export import write_slopegraph_csv
from erasmus_sna.inclusiveness import (
    InclusivenessScore,
    _score,
    bound,
    compute_index,
    inclusiveness_slopegraph,
    period_average,
    persistent_receivers,
    slopegraph_table,
    yearly_scores,
)
from erasmus_sna.network import build_network
from erasmus_sna.pipeline import Study

from conftest import DATA, rec

INCL6 = DATA / "incl6"
EARLY, LATE = (2008, 2009, 2010), (2011, 2012, 2013)
F = Fraction


def score(year, b, inst="U"):
    return InclusivenessScore(inst, year, "XX", 0, 1, 1, 1, F(0), b)


# --- index ---------------------------------------------------------------------


def test_index_worked_example():
    # 10 of 20 national SN arrivals; 100 of 1000 arrivals overall -> I = 5
    s = _score("U", 2008, "ES", 10, 20, 100, 1000)
    assert s.raw_index == 5
    assert s.bounded_index == F(2, 3)


def test_index_from_networks():
    uni = {"A X01", "B X01", "G X01", "V X01"}
    sn = [rec("A X01", "G X01", host_country="ES"), rec("B X01", "V X01", host_country="ES")]
    non = [rec("A X01", "V X01", host_country="ES", grant=0) for _ in range(2)]
    s = compute_index("G X01", 2008, build_network(sn, uni), build_network(sn + non, uni))
    # G: 1 of 2 SN arrivals but 1 of 4 arrivals overall
    assert (s.i_sn_u, s.i_sn_c, s.i_u, s.i_c) == (1, 2, 1, 4)
    assert s.raw_index == 2 and s.bounded_index == F(1, 3)


def test_index_errors():
    with pytest.raises(CountryNoIncomingSN):
        _score("U", 2008, "ES", 0, 0, 5, 10)
    with pytest.raises(UniversityNoIncoming):
        _score("U", 2008, "ES", 0, 3, 0, 10)


@pytest.mark.parametrize("i,b", [(0, -1), (1, 0), (3, F(1, 2)), (5, F(2, 3))])
def test_bound_values(i, b):
    assert bound(i) == b


def test_bound_rejects_negative():
    with pytest.raises(ValueError):
        bound(-0.5)


@given(st.fractions(min_value=0, max_value=10**6), st.fractions(min_value=0, max_value=10**6))
def test_bound_monotone_and_bounded(x, y):
    assert -1 <= bound(x) < 1
    if x < y:
        assert bound(x) < bound(y)


@given(st.fractions(min_value=F(1, 10**6), max_value=10**6))
def test_bound_antisymmetric(x):
    assert bound(1 / x) == -bound(x)


# --- averaging and persistence ------------------------------------------------------


def test_period_average_example():
    scores = [score(2008, F(2, 3)), score(2009, F(0)), score(2010, F(-1))]
    assert period_average(scores, EARLY).mean_bounded_index == F(-1, 9)


def test_period_average_missing_year():
    with pytest.raises(MissingYearError):
        period_average([score(2008, F(0))], EARLY)


@given(st.lists(st.fractions(min_value=-1, max_value=F(999, 1000)), min_size=1, max_size=6))
def test_period_average_within_range(values):
    scores = {2000 + i: score(2000 + i, v) for i, v in enumerate(values)}
    mean = period_average(scores, sorted(scores)).mean_bounded_index
    assert min(values) <= mean <= max(values)


def test_slopegraph_ordering():
    scores = {
        "B": {2008: score(2008, F(0), "B"), 2009: score(2009, F(1, 2), "B")},
        "A": {2008: score(2008, F(0), "A"), 2009: score(2009, F(1, 2), "A")},
        "C": {2008: score(2008, F(1, 3), "C"), 2009: score(2009, F(-1, 3), "C")},
    }
    rows = slopegraph_table(scores, [2008], [2009])
    assert [r.institution for r in rows] == ["A", "B", "C"]
    assert rows[2].delta == F(-2, 3)


# --- six-year fixture ------------------------------------------------------------------


@pytest.fixture(scope="module")
def incl6():
    study = Study(load_config(INCL6 / "config.yaml"))
    years = study.years
    return {y: study.sn_network(y) for y in years}, {y: study.full_network(y) for y in years}


def test_fixture_persistent_receivers(incl6):
    sn, _ = incl6
    assert persistent_receivers(sn, EARLY + LATE) == {"E GRANADA01", "N OSLO01"}
    with pytest.raises(MissingYearError):
        persistent_receivers(sn, [2007])


HAND_BOUNDED = {
    "E GRANADA01": [F(0), F(1, 7), F(1, 3), F(-1, 5), F(-1, 5), F(0)],
    "N OSLO01": [F(1, 7), F(-1, 7), F(0), F(1, 5), F(1, 3), F(1, 7)],
}


def test_fixture_yearly_scores(incl6):
    sn, full = incl6
    scores = yearly_scores(HAND_BOUNDED, sn, full, EARLY + LATE)
    for inst, expected in HAND_BOUNDED.items():
        assert [scores[inst][y].bounded_index for y in EARLY + LATE] == expected


def test_fixture_window_means(incl6):
    rows = {r.institution: r for r in inclusiveness_slopegraph(*incl6, EARLY, LATE)}
    assert (rows["E GRANADA01"].early_mean, rows["E GRANADA01"].late_mean) == (F(10, 63), F(-2, 15))
    assert rows["E GRANADA01"].delta == F(-92, 315)
    assert (rows["N OSLO01"].early_mean, rows["N OSLO01"].late_mean) == (0, F(71, 315))


def test_fixture_slopegraph_golden(incl6):
    buf = io.StringIO()
    write_slopegraph_csv(inclusiveness_slopegraph(*incl6, EARLY, LATE), buf)
    assert buf.getvalue() == (INCL6 / "slopegraph.golden.csv").read_text()
