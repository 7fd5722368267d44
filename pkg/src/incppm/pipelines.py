"""Incremental clustering-based and index-based outcome predictors.

Both pipelines are trained from a log of completed cases and then kept up to
date one completed case at a time (``update``). Random-forest backed
pipelines can only be rebuilt from scratch.
"""
from __future__ import annotations

import logging
import pickle
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import canopy as canopy_mod
from .classifiers import RandomForest, make_incremental
from .encoding import (EncodingSchema, PayloadSchema, Prefix, encode_frequency,
                       encode_index, encode_payload, extract_prefixes)
from .event_log import Case, EventLog
from .ltl import Formula, evaluate, label_log

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


class RediscoveryRequired(RuntimeError):
    """Raised when an offline (random forest) pipeline is asked to update."""


@dataclass
class PipelineConfig:
    approach: str = "clustering"  # or "index"
    classifier: str = "ht"  # ht | aht | rf
    prefix_min: int = 1
    prefix_max: int = 20
    t1: float | None = None
    t2: float | None = None
    delta: float = 1e-7
    tau: float = 0.05
    grace: int = 200
    adwin_delta: float = 0.002
    alt_min_samples: int = 300
    alt_delta: float = 0.05
    monitors: bool = True
    n_trees: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.approach not in ("clustering", "index"):
            raise ValueError(f"unknown approach {self.approach!r}")
        if self.classifier not in ("ht", "aht", "rf"):
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if not 1 <= self.prefix_min <= self.prefix_max:
            raise ValueError("need 1 <= prefix_min <= prefix_max")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Prediction:
    case_id: str
    prefix_length: int
    label: bool
    score: float
    fallback: bool = False

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


@dataclass
class UpdateStats:
    learn_calls: int = 0
    touched: set = field(default_factory=set)
    created: set = field(default_factory=set)


def _majority(labels) -> bool:
    labels = list(labels)
    return sum(labels) * 2 > len(labels)


class _Base:
    def __init__(self, formula: Formula, cfg: PipelineConfig):
        self.formula = formula
        self.cfg = cfg
        self.majority = False
        self.trained = False

    @property
    def incremental(self) -> bool:
        return self.cfg.classifier != "rf"

    def _labelled_prefixes(self, case: Case, label: bool) -> list[Prefix]:
        return extract_prefixes(case, self.cfg.prefix_min, self.cfg.prefix_max, label)

    def _fallback(self, prefix: Prefix) -> Prediction:
        return Prediction(prefix.case_id, prefix.length, self.majority, 0.5, fallback=True)

    def _fit_rf(self, features, data):
        return RandomForest(features, self.cfg.n_trees, self.cfg.seed).fit(data)

    def update_many(self, cases) -> UpdateStats:
        total = UpdateStats()
        for case in cases:
            st = self.update(case)
            total.learn_calls += st.learn_calls
            total.touched |= st.touched
            total.created |= st.created
        return total

    def save(self, path):
        Path(path).write_bytes(pickle.dumps(
            {"format": f"incppm-{type(self).__name__}", "version": FORMAT_VERSION, "model": self}))

    @classmethod
    def load(cls, path):
        blob = pickle.loads(Path(path).read_bytes())
        if blob.get("format") != f"incppm-{cls.__name__}" or blob.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path} is not a version-{FORMAT_VERSION} {cls.__name__}")
        return blob["model"]


class ClusteringPipeline(_Base):
    """Canopies over frequency-encoded prefixes, one classifier per canopy.

    Classifiers see the prefix payload: static attributes plus the dynamic
    attributes of the prefix's last event.
    """

    def __init__(self, formula: Formula, cfg: PipelineConfig):
        super().__init__(formula, cfg)
        self.freq_schema: EncodingSchema | None = None
        self.payload_schema: PayloadSchema | None = None
        self.canopies: canopy_mod.CanopyModel | None = None
        self.classifiers: dict[int, object] = {}

    @classmethod
    def train(cls, log_: EventLog, formula: Formula, cfg: PipelineConfig) -> "ClusteringPipeline":
        if not log_.cases:
            raise ValueError("cannot train on an empty log")
        p = cls(formula, cfg)
        labels = label_log(log_, formula)
        if len(set(labels.values())) < 2:
            log.warning("training log has a single outcome class")
        p.freq_schema = EncodingSchema.frequency(log_)
        p.payload_schema = PayloadSchema.from_log(log_)
        prefixes = [pre for c in log_.cases for pre in p._labelled_prefixes(c, labels[c.case_id])]
        p.majority = _majority(pre.label for pre in prefixes)
        freq = [encode_frequency(pre, p.freq_schema) for pre in prefixes]
        t1, t2 = cfg.t1, cfg.t2
        if t1 is None or t2 is None:
            d1, d2 = canopy_mod.default_thresholds(freq, seed=cfg.seed)
            t1 = d1 if t1 is None else t1
            t2 = d2 if t2 is None else t2
        p.canopies = canopy_mod.build(freq, t1, t2)
        payloads = [encode_payload(pre, p.payload_schema) for pre in prefixes]
        features = p.payload_schema.features
        for k, members in enumerate(p.canopies.members):
            if not members:
                continue
            if cfg.classifier == "rf":
                p.classifiers[k] = p._fit_rf(features, [(payloads[j], prefixes[j].label) for j in members])
            else:
                clf = make_incremental(cfg.classifier, features, cfg)
                for j in members:
                    clf.learn_one(payloads[j], prefixes[j].label)
                p.classifiers[k] = clf
        p.trained = True
        return p

    def predict(self, prefix: Prefix) -> Prediction:
        if not self.trained:
            raise RuntimeError("pipeline is not trained")
        k = self.canopies.assign(encode_frequency(prefix, self.freq_schema))
        clf = self.classifiers.get(k)
        if clf is None:
            return self._fallback(prefix)
        label, score = clf.predict_one(encode_payload(prefix, self.payload_schema))
        return Prediction(prefix.case_id, prefix.length, bool(label), float(score))

    def update(self, case: Case) -> UpdateStats:
        """Insert the completed case's prefixes into the canopies, then train
        every canopy classifier they landed in."""
        if not self.incremental:
            raise RediscoveryRequired("random-forest pipelines must be retrained from scratch")
        label = evaluate(self.formula, case.activities)
        stats = UpdateStats()
        features = self.payload_schema.features
        for pre in self._labelled_prefixes(case, label):
            payload = encode_payload(pre, self.payload_schema)
            for k in self.canopies.insert(encode_frequency(pre, self.freq_schema)):
                clf = self.classifiers.get(k)
                if clf is None:
                    clf = self.classifiers[k] = make_incremental(self.cfg.classifier, features, self.cfg)
                    stats.created.add(k)
                clf.learn_one(payload, label)
                stats.learn_calls += 1
                stats.touched.add(k)
        return stats


class IndexPipeline(_Base):
    """One classifier per prefix length over index-based encodings."""

    def __init__(self, formula: Formula, cfg: PipelineConfig):
        super().__init__(formula, cfg)
        self.schemas: dict[int, EncodingSchema] = {}
        self.classifiers: dict[int, object | None] = {}

    @classmethod
    def train(cls, log_: EventLog, formula: Formula, cfg: PipelineConfig) -> "IndexPipeline":
        if not log_.cases:
            raise ValueError("cannot train on an empty log")
        p = cls(formula, cfg)
        labels = label_log(log_, formula)
        if len(set(labels.values())) < 2:
            log.warning("training log has a single outcome class")
        lengths = range(cfg.prefix_min, cfg.prefix_max + 1)
        p.schemas = {m: EncodingSchema.index(log_, m) for m in lengths}
        groups: dict[int, list] = {m: [] for m in lengths}
        all_labels = []
        for c in log_.cases:
            for pre in p._labelled_prefixes(c, labels[c.case_id]):
                groups[pre.length].append((encode_index(pre, p.schemas[pre.length]), pre.label))
                all_labels.append(pre.label)
        p.majority = _majority(all_labels)
        for m in lengths:
            data = groups[m]
            if not data:
                p.classifiers[m] = None
            elif cfg.classifier == "rf":
                p.classifiers[m] = p._fit_rf(p.schemas[m].features, data)
            else:
                clf = make_incremental(cfg.classifier, p.schemas[m].features, cfg)
                for x, y in data:
                    clf.learn_one(x, y)
                p.classifiers[m] = clf
        p.trained = True
        return p

    def predict(self, prefix: Prefix) -> Prediction:
        if not self.trained:
            raise RuntimeError("pipeline is not trained")
        m = prefix.length
        if m not in self.schemas:
            raise ValueError(f"prefix length {m} outside [{self.cfg.prefix_min}, {self.cfg.prefix_max}]")
        clf = self.classifiers[m]
        if clf is None:
            return self._fallback(prefix)
        label, score = clf.predict_one(encode_index(prefix, self.schemas[m]))
        return Prediction(prefix.case_id, m, bool(label), float(score))

    def update(self, case: Case) -> UpdateStats:
        if not self.incremental:
            raise RediscoveryRequired("random-forest pipelines must be retrained from scratch")
        label = evaluate(self.formula, case.activities)
        stats = UpdateStats()
        for pre in self._labelled_prefixes(case, label):
            m = pre.length
            clf = self.classifiers.get(m)
            if clf is None:
                clf = self.classifiers[m] = make_incremental(
                    self.cfg.classifier, self.schemas[m].features, self.cfg)
                stats.created.add(m)
            clf.learn_one(encode_index(pre, self.schemas[m]), label)
            stats.learn_calls += 1
            stats.touched.add(m)
        return stats


def train_pipeline(log_: EventLog, formula: Formula, cfg: PipelineConfig):
    cls = ClusteringPipeline if cfg.approach == "clustering" else IndexPipeline
    return cls.train(log_, formula, cfg)
