"""Case prefixes and the frequency / index-based encodings."""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .event_log import ABSENT, NUMERIC_KINDS, Case, Event, EventLog, Value

UNKNOWN_ACTIVITY = "<unknown>"
NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Prefix:
    case_id: str
    length: int
    events: tuple[Event, ...]
    static_attrs: Mapping[str, Value] = field(default_factory=dict)
    label: bool | None = None

    @property
    def activities(self) -> list[str]:
        return [ev.activity for ev in self.events]


def extract_prefixes(case: Case, min_len: int = 1, max_len: int = 20,
                     label: bool | None = None) -> list[Prefix]:
    if not 1 <= min_len <= max_len:
        raise ValueError(f"need 1 <= min_len <= max_len, got [{min_len}, {max_len}]")
    top = min(max_len, len(case.events))
    return [Prefix(case.case_id, k, case.events[:k], case.static_attrs, label)
            for k in range(min_len, top + 1)]


def count_prefixes(log: EventLog, min_len: int = 1, max_len: int = 20) -> int:
    return sum(max(0, min(max_len, len(c)) - min_len + 1) for c in log.cases)


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names and kinds; ``schema_id`` is a content hash."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.kinds):
            raise ValueError("names and kinds differ in length")
        for k in self.kinds:
            if k not in (NUMERIC, CATEGORICAL):
                raise ValueError(f"unknown feature kind {k!r}")

    @cached_property
    def schema_id(self) -> str:
        blob = json.dumps([self.names, self.kinds]).encode()
        return hashlib.sha1(blob).hexdigest()[:16]

    def __len__(self):
        return len(self.names)


@dataclass(frozen=True)
class FeatureVector:
    values: tuple
    schema_id: str

    def __len__(self):
        return len(self.values)


def feature_kind(attr_kind: str) -> str:
    return NUMERIC if attr_kind in NUMERIC_KINDS else CATEGORICAL


@dataclass(frozen=True)
class EncodingSchema:
    """Fixed layout for one encoding.

    ``kind == "frequency"``: one count per alphabet label.
    ``kind == "index"``: static attributes, then ``m`` activity labels, then
    each dynamic attribute at positions 1..m.
    """

    kind: str
    activity_alphabet: tuple[str, ...]
    static_attrs: tuple[tuple[str, str], ...] = ()
    dynamic_attrs: tuple[tuple[str, str], ...] = ()
    m: int | None = None

    def __post_init__(self):
        if self.kind not in ("frequency", "index"):
            raise ValueError(f"unknown encoding kind {self.kind!r}")
        if self.kind == "index" and (self.m is None or self.m < 1):
            raise ValueError("index encoding needs a prefix length m >= 1")

    @classmethod
    def frequency(cls, log_or_alphabet: EventLog | Sequence[str]) -> "EncodingSchema":
        alphabet = (log_or_alphabet.activity_alphabet if isinstance(log_or_alphabet, EventLog)
                    else tuple(log_or_alphabet))
        return cls("frequency", tuple(alphabet))

    @classmethod
    def index(cls, log: EventLog, m: int) -> "EncodingSchema":
        return cls("index", log.activity_alphabet, tuple(log.static_schema.items()),
                   tuple(log.dynamic_schema.items()), m)

    @property
    def static_attr_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.static_attrs)

    @property
    def dynamic_attr_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.dynamic_attrs)

    @cached_property
    def features(self) -> FeatureSchema:
        if self.kind == "frequency":
            return FeatureSchema(tuple(f"count[{a}]" for a in self.activity_alphabet),
                                 (NUMERIC,) * len(self.activity_alphabet))
        names = [f"static[{n}]" for n, _ in self.static_attrs]
        kinds = [feature_kind(k) for _, k in self.static_attrs]
        names += [f"event_{j}" for j in range(1, self.m + 1)]
        kinds += [CATEGORICAL] * self.m
        for n, k in self.dynamic_attrs:
            names += [f"{n}_{j}" for j in range(1, self.m + 1)]
            kinds += [feature_kind(k)] * self.m
        return FeatureSchema(tuple(names), tuple(kinds))

    @cached_property
    def schema_id(self) -> str:
        return self.features.schema_id

    @cached_property
    def positions(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.activity_alphabet)}


def encode_frequency(prefix: Prefix, schema: EncodingSchema) -> FeatureVector:
    if schema.kind != "frequency":
        raise ValueError("schema is not a frequency schema")
    pos = schema.positions
    counts = [0] * len(pos)
    for ev in prefix.events:
        i = pos.get(ev.activity)
        if i is not None:
            counts[i] += 1
    return FeatureVector(tuple(counts), schema.schema_id)


def encode_index(prefix: Prefix, schema: EncodingSchema) -> FeatureVector:
    if schema.kind != "index":
        raise ValueError("schema is not an index schema")
    if prefix.length != schema.m or len(prefix.events) != schema.m:
        raise ValueError(f"prefix length {prefix.length} != schema m={schema.m}")
    known = schema.positions
    values: list = [prefix.static_attrs.get(n, ABSENT) for n, _ in schema.static_attrs]
    values += [ev.activity if ev.activity in known else UNKNOWN_ACTIVITY for ev in prefix.events]
    for n, _ in schema.dynamic_attrs:
        values += [ev.dynamic_attrs.get(n, ABSENT) for ev in prefix.events]
    return FeatureVector(tuple(values), schema.schema_id)


@dataclass(frozen=True)
class PayloadSchema:
    """Static attributes plus the dynamic attributes of the prefix's last event."""

    static_attrs: tuple[tuple[str, str], ...]
    dynamic_attrs: tuple[tuple[str, str], ...]

    @classmethod
    def from_log(cls, log: EventLog) -> "PayloadSchema":
        return cls(tuple(log.static_schema.items()), tuple(log.dynamic_schema.items()))

    @cached_property
    def features(self) -> FeatureSchema:
        names = [f"static[{n}]" for n, _ in self.static_attrs]
        names += [f"last[{n}]" for n, _ in self.dynamic_attrs]
        kinds = [feature_kind(k) for _, k in self.static_attrs + self.dynamic_attrs]
        return FeatureSchema(tuple(names), tuple(kinds))

    @cached_property
    def schema_id(self) -> str:
        return self.features.schema_id


def encode_payload(prefix: Prefix, schema: PayloadSchema) -> FeatureVector:
    last = prefix.events[-1]
    values = [prefix.static_attrs.get(n, ABSENT) for n, _ in schema.static_attrs]
    values += [last.dynamic_attrs.get(n, ABSENT) for n, _ in schema.dynamic_attrs]
    return FeatureVector(tuple(values), schema.schema_id)


def export_encoded(path, vectors: Iterable[FeatureVector], labels: Iterable[bool | None],
                   features: FeatureSchema) -> tuple[Path, Path]:
    """Write ``path`` (CSV, one row per vector plus ``label``) and a JSON sidecar."""
    path = Path(path)
    sidecar = path.with_suffix(path.suffix + ".schema.json")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*features.names, "label"])
        for vec, lab in zip(vectors, labels):
            if vec.schema_id != features.schema_id:
                raise ValueError("vector does not belong to the given schema")
            w.writerow([*("" if v is ABSENT else v for v in vec.values),
                        "" if lab is None else str(bool(lab)).lower()])
    sidecar.write_text(json.dumps({
        "schema_id": features.schema_id,
        "features": [{"name": n, "kind": k} for n, k in zip(features.names, features.kinds)],
        "label": "label",
    }, indent=2))
    return path, sidecar
