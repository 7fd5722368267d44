from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incppm.event_log import (ABSENT, Case, CsvSchemaConfig, Event, EventLog, LogFormatError,
                              canonical_order, csv_config_for, parse_csv, parse_timestamp,
                              parse_xes, read_log, split_log, write_csv)

from .conftest import make_case, make_log

FIXTURES = Path(__file__).parent / "fixtures"


def test_csv_grouping():
    log = parse_csv("case_id,activity\nc1,A\nc1,B\nc2,A\n")
    assert [c.case_id for c in log.cases] == ["c1", "c2"]
    assert log.activity_alphabet == ("A", "B")
    assert log.case("c1").activities == ["A", "B"]


def test_csv_header_only():
    assert len(parse_csv("case_id,activity,timestamp\n").cases) == 0


def test_csv_resorts_by_timestamp():
    rows = [("c1", "C", 30), ("c1", "A", 10), ("c2", "X", 5), ("c1", "B", 20), ("c1", "D", 20)]
    text = "case_id,activity,timestamp\n" + "".join(f"{c},{a},{t}\n" for c, a, t in rows)
    log = parse_csv(text)
    expected = [a for _, a, _ in sorted((r for r in rows if r[0] == "c1"), key=lambda r: r[2])]
    assert log.case("c1").activities == expected  # stable on the B/D tie


def test_csv_static_lifting_and_kinds():
    text = ("case_id,activity,timestamp,age,vip,cost\n"
            "c1,A,2020-01-01T00:00:00Z,50,true,1.5\n"
            "c1,B,2020-01-01T01:00:00Z,50,true,\n"
            "c2,A,2020-01-02T00:00:00Z,31,false,2\n")
    log = parse_csv(text)
    assert log.static_schema == {"age": "int", "vip": "boolean"}
    assert log.dynamic_schema == {"cost": "float"}
    c1 = log.case("c1")
    assert c1.static_attrs == {"age": 50, "vip": True}
    assert c1.events[1].dynamic_attrs["cost"] is ABSENT
    assert c1.events[1].timestamp - c1.events[0].timestamp == 3_600_000


def test_csv_quoting():
    text = 'case_id,activity,note\nc1,"Check, then ""approve""","line1\nline2"\n'
    log = parse_csv(text, CsvSchemaConfig(timestamp=None, dynamic=["note"]))
    ev = log.cases[0].events[0]
    assert ev.activity == 'Check, then "approve"'
    assert ev.dynamic_attrs["note"] == "line1\nline2"


@pytest.mark.parametrize("text, msg", [
    ("case_id,timestamp\nc1,1\n", "activity"),
    ("activity\nA\n", "case_id"),
    ("case_id,activity,timestamp\nc1,A,yesterday\n", "timestamp"),
])
def test_csv_errors(text, msg):
    with pytest.raises(LogFormatError, match=msg):
        parse_csv(text)


def test_csv_static_column_varying_within_case():
    with pytest.raises(LogFormatError, match="varies"):
        parse_csv("case_id,activity,age\nc1,A,1\nc1,B,2\n", CsvSchemaConfig(timestamp=None, static=["age"]))


def test_timestamp_forms():
    assert parse_timestamp("1000") == 1000
    assert parse_timestamp("1970-01-01T00:00:01Z") == 1000
    assert parse_timestamp("1970-01-01T01:00:01+01:00") == 1000


def test_case_invariants():
    with pytest.raises(ValueError):
        Event("")
    with pytest.raises(ValueError):
        Event("A", 0, {"activity": 1})
    with pytest.raises(ValueError):
        Case("c", (Event("A", 10), Event("B", 5)), {})
    with pytest.raises(ValueError):
        EventLog((make_case("c", ["A"]), make_case("c", ["B"])), {}, {})


def test_absent_is_singleton_and_falsy():
    import pickle
    assert pickle.loads(pickle.dumps(ABSENT)) is ABSENT
    assert not ABSENT and ABSENT != ""


# ------------------------------------------------------------------ round trip

_name = st.text(st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")), min_size=1, max_size=6)
_label = _name.map(str.strip).filter(bool)
_value = {
    "string": st.one_of(st.just(ABSENT), _name.filter(lambda s: s != "")),
    "int": st.one_of(st.just(ABSENT), st.integers(-10**9, 10**9)),
    "float": st.one_of(st.just(ABSENT), st.floats(allow_nan=False, allow_infinity=False)),
    "boolean": st.one_of(st.just(ABSENT), st.booleans()),
}


@st.composite
def event_logs(draw):
    static = {f"s{i}": k for i, k in enumerate(draw(st.lists(st.sampled_from(list(_value)), max_size=3)))}
    dynamic = {f"d{i}": k for i, k in enumerate(draw(st.lists(st.sampled_from(list(_value)), max_size=3)))}
    cases = []
    for ci in range(draw(st.integers(0, 5))):
        n = draw(st.integers(1, 5))
        times = sorted(draw(st.lists(st.integers(0, 10**12), min_size=n, max_size=n)))
        events = tuple(Event(draw(_label), t, {a: draw(_value[k]) for a, k in dynamic.items()})
                       for t in times)
        cases.append(Case(f"case {ci}, \"q\"", events, {a: draw(_value[k]) for a, k in static.items()}))
    return EventLog(tuple(cases), static, dynamic)


@settings(max_examples=150, deadline=None)
@given(event_logs())
def test_csv_round_trip(log):
    again = parse_csv(write_csv(log), csv_config_for(log))
    assert again == log


# ------------------------------------------------------------------ XES


def test_xes_minimal():
    xml = ('<log><trace><string key="concept:name" value="t"/><int key="age" value="50"/>'
           '<event><string key="concept:name" value="A"/></event>'
           '<event><string key="concept:name" value="B"/></event></trace></log>')
    log = parse_xes(xml)
    assert len(log.cases) == 1 and log.cases[0].activities == ["A", "B"]
    assert log.cases[0].static_attrs == {"age": 50}


def test_xes_fixture_schema():
    log = read_log(FIXTURES / "mixed.xes", "xes")
    assert len(log.cases) == 3 and log.n_events == 6
    assert log.static_schema == {"age": "int", "amount": "float", "vip": "boolean"}
    assert log.dynamic_schema == {"org:resource": "string", "cost": "int"}
    t3 = log.case("t3")
    assert t3.activities == ["C", "A", "B"]
    assert t3.static_attrs == {"age": 77, "amount": 0.5, "vip": False}
    assert t3.events[0].timestamp == parse_timestamp("2020-01-03T09:00:00+00:00")


@pytest.mark.parametrize("xml", [
    "<log><trace>",
    '<log><trace><event><int key="x" value="1"/></event></trace></log>',
])
def test_xes_errors(xml):
    with pytest.raises(LogFormatError):
        parse_xes(xml)


# ------------------------------------------------------------------ splitting


@pytest.mark.parametrize("n, fractions, sizes", [
    (10, [80, 20], [8, 2]),
    (10, [40, 20, 20, 20], [4, 2, 2, 2]),
    (7, [50, 50], [3, 4]),
])
def test_split_sizes(n, fractions, sizes):
    log = make_log([make_case(f"c{i}", ["A"]) for i in range(n)])
    assert [len(s) for s in split_log(log, fractions)] == sizes


@given(st.integers(1, 60), st.lists(st.integers(0, 100), min_size=1, max_size=5))
def test_split_is_ordered_partition(n, raw):
    total = sum(raw) or 1
    fractions = [100 * r / total for r in raw] if sum(raw) else [100.0] + [0.0] * (len(raw) - 1)
    log = make_log([make_case(f"c{i}", ["A"]) for i in range(n)])
    parts = split_log(log, fractions)
    assert [c for p in parts for c in p.cases] == list(log.cases)


@pytest.mark.parametrize("fractions", [[50, 40], [110, -10]])
def test_split_errors(fractions):
    log = make_log([make_case("c", ["A"])])
    with pytest.raises(ValueError):
        split_log(log, fractions)
    with pytest.raises(ValueError):
        split_log(make_log([]), [100])


def test_canonical_order():
    log = make_log([make_case("b", ["A"], t0=5), make_case("a", ["A"], t0=5), make_case("c", ["A"], t0=1)])
    assert [c.case_id for c in canonical_order(log).cases] == ["c", "a", "b"]
    untimed = make_log([Case("z", (Event("A"),), {}), Case("y", (Event("A"),), {})])
    assert canonical_order(untimed) is untimed
