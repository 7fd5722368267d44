"""Event log model and ingestion (CSV and a small XES subset)."""
from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence, Union

RESERVED = ("case_id", "activity", "timestamp")
KINDS = ("string", "int", "float", "boolean", "date")
NUMERIC_KINDS = ("int", "float", "date")


class _Absent:
    """Marker for a missing attribute value (distinct from the empty string)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSENT"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()

Value = Union[str, int, float, bool, _Absent]


class LogFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: int | None = None
    dynamic_attrs: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise ValueError("event activity must be non-empty")
        clash = set(self.dynamic_attrs) & set(RESERVED)
        if clash:
            raise ValueError(f"dynamic attribute uses reserved name(s): {sorted(clash)}")


@dataclass(frozen=True)
class Case:
    case_id: str
    events: tuple[Event, ...]
    static_attrs: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        last = None
        for ev in self.events:
            if ev.timestamp is None:
                continue
            if last is not None and ev.timestamp < last:
                raise ValueError(f"case {self.case_id}: timestamps decrease")
            last = ev.timestamp

    def __len__(self):
        return len(self.events)

    @property
    def activities(self) -> list[str]:
        return [ev.activity for ev in self.events]


@dataclass(frozen=True)
class EventLog:
    """Ordered collection of cases.

    ``static_schema`` and ``dynamic_schema`` map attribute names to one of
    ``KINDS``; their insertion order is the order encoders use.
    """

    cases: tuple[Case, ...]
    static_schema: Mapping[str, str] = field(default_factory=dict)
    dynamic_schema: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        seen = set()
        for c in self.cases:
            if c.case_id in seen:
                raise ValueError(f"duplicate case id {c.case_id!r}")
            seen.add(c.case_id)
        for name, kind in {**self.static_schema, **self.dynamic_schema}.items():
            if kind not in KINDS:
                raise ValueError(f"attribute {name!r}: unknown kind {kind!r}")

    def __len__(self):
        return len(self.cases)

    @property
    def activity_alphabet(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for c in self.cases:
            for ev in c.events:
                seen.setdefault(ev.activity, None)
        return tuple(seen)

    @property
    def attr_schema(self) -> dict[str, str]:
        return {**self.static_schema, **self.dynamic_schema}

    @property
    def n_events(self) -> int:
        return sum(len(c) for c in self.cases)

    def with_cases(self, cases: Iterable[Case]) -> "EventLog":
        return EventLog(tuple(cases), self.static_schema, self.dynamic_schema)

    def case(self, case_id: str) -> Case:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise KeyError(case_id)


def canonical_order(log: EventLog) -> EventLog:
    """Sort cases by first-event timestamp, then case id.

    Logs without timestamps keep file order.
    """
    if any(c.events and c.events[0].timestamp is None for c in log.cases):
        return log
    ordered = sorted(log.cases, key=lambda c: (c.events[0].timestamp, c.case_id))
    return log.with_cases(ordered)


def split_log(log: EventLog, fractions: Sequence[float]) -> list[EventLog]:
    if not log.cases:
        raise ValueError("cannot split an empty log")
    if any(f < 0 for f in fractions) or not math.isclose(sum(fractions), 100.0):
        raise ValueError(f"fractions must be non-negative and sum to 100, got {list(fractions)}")
    n = len(log.cases)
    sizes = [int(n * f // 100) for f in fractions[:-1]]
    sizes.append(n - sum(sizes))
    out, start = [], 0
    for size in sizes:
        out.append(log.with_cases(log.cases[start:start + size]))
        start += size
    return out


# --------------------------------------------------------------------------- values

def parse_timestamp(text: str) -> int:
    """Milliseconds since epoch from an integer string or ISO-8601 text."""
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    iso = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        dt = datetime.fromisoformat(iso)
    except ValueError as exc:
        raise LogFormatError(f"unparseable timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


def format_timestamp(ms: int) -> str:
    return str(ms)


def _coerce(text: str, kind: str) -> Value:
    if text == "":
        return ABSENT
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "boolean":
        low = text.strip().lower()
        if low not in ("true", "false"):
            raise LogFormatError(f"not a boolean: {text!r}")
        return low == "true"
    if kind == "date":
        return parse_timestamp(text)
    return text


def _infer_kind(values: Iterable[str]) -> str:
    vals = [v for v in values if v != ""]
    if not vals:
        return "string"

    def all_ok(fn):
        try:
            for v in vals:
                fn(v)
        except (ValueError, LogFormatError):
            return False
        return True

    if all_ok(int):
        return "int"
    if all_ok(float):
        return "float"
    if all(v.strip().lower() in ("true", "false") for v in vals):
        return "boolean"
    return "string"


def _format_value(value: Value) -> str:
    if value is ABSENT:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# --------------------------------------------------------------------------- CSV

@dataclass
class CsvSchemaConfig:
    """Column roles for :func:`parse_csv`.

    ``static`` / ``dynamic`` of ``None`` mean "everything else": if both are
    ``None``, columns constant within every case are treated as static.
    ``kinds`` pins attribute kinds; unlisted columns are inferred.
    """

    case_id: str = "case_id"
    activity: str = "activity"
    timestamp: str | None = "timestamp"
    static: Sequence[str] | None = None
    dynamic: Sequence[str] | None = None
    kinds: Mapping[str, str] = field(default_factory=dict)


def parse_csv(data: bytes | str, config: CsvSchemaConfig | None = None) -> EventLog:
    config = config or CsvSchemaConfig()
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise LogFormatError("missing header row") from None
    index = {name: i for i, name in enumerate(header)}
    for col in (config.case_id, config.activity):
        if col not in index:
            raise LogFormatError(f"missing mandatory column {col!r}")
    ts_col = config.timestamp if config.timestamp in index else None
    if config.timestamp and ts_col is None and config.timestamp != "timestamp":
        raise LogFormatError(f"missing timestamp column {config.timestamp!r}")

    roles = {config.case_id, config.activity, ts_col}
    attr_cols = [h for h in header if h not in roles]
    for col in list(config.static or []) + list(config.dynamic or []):
        if col not in index:
            raise LogFormatError(f"missing attribute column {col!r}")

    rows = [r for r in reader if r]
    for r in rows:
        if len(r) != len(header):
            raise LogFormatError(f"row has {len(r)} fields, header has {len(header)}")

    groups: dict[str, list[list[str]]] = {}
    for r in rows:
        groups.setdefault(r[index[config.case_id]], []).append(r)

    def constant_per_case(col):
        i = index[col]
        return all(len({r[i] for r in g}) == 1 for g in groups.values())

    if config.static is None and config.dynamic is None:
        static_cols = [c for c in attr_cols if constant_per_case(c)]
    elif config.static is None:
        static_cols = [c for c in attr_cols if c not in set(config.dynamic)]
    else:
        static_cols = list(config.static)
    dynamic_cols = [c for c in attr_cols if c not in set(static_cols)]
    if config.dynamic is not None:
        dynamic_cols = [c for c in dynamic_cols if c in set(config.dynamic)]

    for col in static_cols:
        if not constant_per_case(col):
            raise LogFormatError(f"static column {col!r} varies within a case")
    for col in dynamic_cols:
        if col in RESERVED:
            raise LogFormatError(f"dynamic attribute uses reserved name {col!r}")

    kinds = {c: config.kinds.get(c) or _infer_kind(r[index[c]] for r in rows)
             for c in static_cols + dynamic_cols}

    cases = []
    for cid, group in groups.items():
        first = group[0]
        static = {c: _coerce(first[index[c]], kinds[c]) for c in static_cols}
        events = []
        for r in group:
            ts = parse_timestamp(r[index[ts_col]]) if ts_col and r[index[ts_col]] != "" else None
            dyn = {c: _coerce(r[index[c]], kinds[c]) for c in dynamic_cols}
            events.append(Event(r[index[config.activity]].strip(), ts, dyn))
        if ts_col and all(ev.timestamp is not None for ev in events):
            events.sort(key=lambda ev: ev.timestamp)  # stable on ties
        cases.append(Case(cid, tuple(events), static))
    return EventLog(tuple(cases),
                    {c: kinds[c] for c in static_cols},
                    {c: kinds[c] for c in dynamic_cols})


def write_csv(log: EventLog) -> bytes:
    """Serialize ``log`` in the format :func:`parse_csv` reads back."""
    statics = list(log.static_schema)
    dynamics = list(log.dynamic_schema)
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case_id", "activity", "timestamp", *statics, *dynamics])
    for c in log.cases:
        for ev in c.events:
            ts = "" if ev.timestamp is None else format_timestamp(ev.timestamp)
            w.writerow([c.case_id, ev.activity, ts,
                        *(_format_value(c.static_attrs.get(s, ABSENT)) for s in statics),
                        *(_format_value(ev.dynamic_attrs.get(d, ABSENT)) for d in dynamics)])
    return buf.getvalue().encode("utf-8")


def csv_config_for(log: EventLog) -> CsvSchemaConfig:
    """Config that reads :func:`write_csv` output back losslessly."""
    return CsvSchemaConfig(static=list(log.static_schema), dynamic=list(log.dynamic_schema),
                           kinds=dict(log.attr_schema))


# --------------------------------------------------------------------------- XES

_XES_TYPES = {"string": "string", "int": "int", "float": "float",
              "boolean": "boolean", "date": "date", "id": "string"}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_attrs(elem) -> dict[str, tuple[str, Value]]:
    out = {}
    for child in elem:
        kind = _XES_TYPES.get(_local(child.tag))
        if kind is None:
            continue
        key = child.get("key")
        raw = child.get("value")
        if key is None or raw is None:
            continue
        try:
            out[key] = (kind, _coerce(raw, kind) if raw != "" else ABSENT)
        except (ValueError, LogFormatError) as exc:
            raise LogFormatError(f"attribute {key!r}: bad {kind} value {raw!r}") from exc
    return out


def parse_xes(data: bytes | str) -> EventLog:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise LogFormatError(f"malformed XML: {exc}") from exc
    if _local(root.tag) != "log":
        raise LogFormatError(f"root element is <{_local(root.tag)}>, expected <log>")

    static_schema: dict[str, str] = {}
    dynamic_schema: dict[str, str] = {}
    raw_cases = []
    for t_idx, trace in enumerate(e for e in root if _local(e.tag) == "trace"):
        tattrs = _xes_attrs(trace)
        cid_entry = tattrs.pop("concept:name", None)
        cid = str(cid_entry[1]) if cid_entry else f"trace_{t_idx}"
        for k, (kind, _) in tattrs.items():
            static_schema.setdefault(k, kind)
        events = []
        for ev in (e for e in trace if _local(e.tag) == "event"):
            eattrs = _xes_attrs(ev)
            name = eattrs.pop("concept:name", None)
            if name is None or name[1] is ABSENT:
                raise LogFormatError(f"trace {cid!r}: event without concept:name")
            ts = eattrs.pop("time:timestamp", None)
            for k in eattrs:
                if k in RESERVED:
                    raise LogFormatError(f"event attribute uses reserved name {k!r}")
                dynamic_schema.setdefault(k, eattrs[k][0])
            events.append((str(name[1]).strip(), ts[1] if ts and ts[1] is not ABSENT else None,
                           {k: v for k, (_, v) in eattrs.items()}))
        raw_cases.append((cid, {k: v for k, (_, v) in tattrs.items()}, events))

    cases = []
    for cid, static, events in raw_cases:
        evs = [Event(a, ts, {k: d.get(k, ABSENT) for k in dynamic_schema}) for a, ts, d in events]
        if all(ev.timestamp is not None for ev in evs):
            evs.sort(key=lambda ev: ev.timestamp)
        cases.append(Case(cid, tuple(evs), {k: static.get(k, ABSENT) for k in static_schema}))
    return EventLog(tuple(cases), static_schema, dynamic_schema)


def read_log(path, fmt: str | None = None, config: CsvSchemaConfig | None = None) -> EventLog:
    from pathlib import Path

    path = Path(path)
    fmt = fmt or ("xes" if path.suffix.lower() == ".xes" else "csv")
    data = path.read_bytes()
    if fmt == "xes":
        return parse_xes(data)
    if fmt == "csv":
        return parse_csv(data, config)
    raise ValueError(f"unknown log format {fmt!r}")
