"""Metrics and the three replay scenarios.

Scenario 1: train on the first 80%, replay the last 20% (incremental models
are updated after each test case is scored) and compare against a random
forest trained once.
Scenario 2: 40/20/20/20 split; the forest is retrained from scratch on 60%
and 80% while incremental models are updated with each new segment; both
are scored on the final 20% at the 60% and 80% checkpoints.
Scenario 3: train HT and AHT pipelines on the first 40% of a drifting log and
replay the remaining 60% predict-then-update.

Timings cover model construction and updates only.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .encoding import extract_prefixes
from .event_log import EventLog, split_log
from .ltl import Formula, label_log
from .pipelines import PipelineConfig, train_pipeline


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def add(self, predicted: bool, actual: bool):
        if predicted and actual:
            self.tp += 1
        elif predicted:
            self.fp += 1
        elif actual:
            self.fn += 1
        else:
            self.tn += 1

    def swapped(self) -> "ConfusionCounts":
        """Counts with the negative class treated as positive."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def f_measure(c: ConfusionCounts) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / denom if denom else 0.0


def avg_f_measure(c: ConfusionCounts) -> float:
    return (f_measure(c) + f_measure(c.swapped())) / 2


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise ValueError("accuracy of an empty confusion table")
    return (c.tp + c.tn) / c.total


def summarize(c: ConfusionCounts) -> dict:
    return {"accuracy": accuracy(c) if c.total else 0.0, "avg_f_measure": avg_f_measure(c),
            "f_measure": f_measure(c), "n_predictions": c.total, "counts": c.as_dict()}


def delta(a: dict, b: dict, name_a: str, name_b: str, step: str | None = None,
          with_time: bool = True) -> dict:
    """Absolute (``a - b``) and relative (``(a - b) / b``) differences."""
    out = {"a": name_a, "b": name_b}
    if step is not None:
        out["step"] = step
    keys = [("fm", "avg_f_measure"), ("acc", "accuracy")] + ([("time", "time")] if with_time else [])
    for short, key in keys:
        va, vb = a[key], b[key]
        out[short] = va - vb
        out[f"{short}_rel"] = (va - vb) / vb if vb else None
    return out


@dataclass
class ScenarioReport:
    scenario: int
    metadata: dict
    results: dict = field(default_factory=dict)  # config name -> metrics (per step for scenario 2)
    timings: dict = field(default_factory=dict)  # config name -> seconds (per step for scenario 2)
    deltas: list = field(default_factory=list)
    series: dict = field(default_factory=dict)

    def metrics_dict(self) -> dict:
        """Everything except wall-clock timings (deterministic under a seed)."""
        return {"scenario": self.scenario, "metadata": self.metadata, "results": self.results,
                "deltas": [{k: v for k, v in d.items() if not k.startswith("time")} for d in self.deltas],
                "series": self.series}

    def to_dict(self) -> dict:
        return {"metrics": self.metrics_dict(), "timings": self.timings,
                "deltas_with_time": self.deltas}

    def to_text(self) -> str:
        lines = [f"Scenario {self.scenario}", ""]
        meta = self.metadata
        lines.append(f"formula: {meta.get('formula')}   seed: {meta.get('seed')}")
        lines.append(f"splits: {meta.get('split_sizes')}")
        lines.append("")
        lines.append(f"{'configuration':<28}{'step':>6}{'avg Fm':>10}{'acc':>10}{'time[s]':>10}{'n':>8}")
        for name, res in self.results.items():
            steps = res if "accuracy" not in res else {"": res}
            for step, r in steps.items():
                t = self.timings.get(name)
                t = t.get(step) if isinstance(t, dict) else t
                tt = f"{t:10.3f}" if isinstance(t, (int, float)) else f"{'-':>10}"
                lines.append(f"{name:<28}{step:>6}{r['avg_f_measure']:10.4f}{r['accuracy']:10.4f}{tt}"
                             f"{r['n_predictions']:8d}")
        lines.append("")
        lines.append(f"{'delta (a - b)':<44}{'step':>6}{'Fm':>9}{'acc':>9}{'time':>9}{'Fm%':>9}{'acc%':>9}{'time%':>9}")

        def fmt(v, pct=False):
            if v is None:
                return f"{'n/a':>9}"
            return f"{100 * v:+8.1f}%" if pct else f"{v:+9.4f}"

        for d in self.deltas:
            label = f"{d['a']} vs {d['b']}"
            lines.append(f"{label:<44}{d.get('step', ''):>6}{fmt(d['fm'])}{fmt(d['acc'])}"
                         f"{fmt(d.get('time'))}{fmt(d['fm_rel'], True)}{fmt(d['acc_rel'], True)}"
                         f"{fmt(d.get('time_rel'), True)}")
        lines.append("")
        lines.append("hyperparameters: " + json.dumps(meta.get("config", {}), sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))
        (out / "report.txt").write_text(self.to_text())
        return out


# --------------------------------------------------------------------------- replay helpers

def _prefixes(case, cfg, label):
    return extract_prefixes(case, cfg.prefix_min, cfg.prefix_max, label)


def score(pipeline, cases, labels, cfg) -> tuple[ConfusionCounts, int]:
    """Score every prefix of ``cases`` without updating; returns (counts, fallbacks)."""
    counts, fallbacks = ConfusionCounts(), 0
    for case in cases:
        for pre in _prefixes(case, cfg, labels[case.case_id]):
            pred = pipeline.predict(pre)
            counts.add(pred.label, pre.label)
            fallbacks += pred.fallback
    return counts, fallbacks


@dataclass
class ReplayTrace:
    counts: ConfusionCounts
    per_case: list  # (case_id, ConfusionCounts) in replay order
    update_time: float
    learn_calls: int
    fallbacks: int

    def counts_for(self, case_ids) -> ConfusionCounts:
        out = ConfusionCounts()
        for cid, c in self.per_case:
            if cid in case_ids:
                out.tp += c.tp
                out.fp += c.fp
                out.tn += c.tn
                out.fn += c.fn
        return out

    def running_accuracy(self) -> list:
        """[case_id, correct, predictions, cumulative accuracy] per replayed case."""
        rows, hit, tot = [], 0, 0
        for cid, c in self.per_case:
            hit += c.tp + c.tn
            tot += c.total
            rows.append([cid, c.tp + c.tn, c.total, hit / tot if tot else 0.0])
        return rows


def replay(pipeline, cases, labels, cfg, update: bool) -> ReplayTrace:
    """Predict every prefix of each case, then (optionally) learn the case."""
    counts, per_case = ConfusionCounts(), []
    update_time, calls, fallbacks = 0.0, 0, 0
    for case in cases:
        mine = ConfusionCounts()
        for pre in _prefixes(case, cfg, labels[case.case_id]):
            pred = pipeline.predict(pre)
            counts.add(pred.label, pre.label)
            mine.add(pred.label, pre.label)
            fallbacks += pred.fallback
        per_case.append((case.case_id, mine))
        if update:
            t0 = time.perf_counter()
            calls += pipeline.update(case).learn_calls
            update_time += time.perf_counter() - t0
    return ReplayTrace(counts, per_case, update_time, calls, fallbacks)


def _timed_train(log_, formula, cfg):
    t0 = time.perf_counter()
    p = train_pipeline(log_, formula, cfg)
    return p, time.perf_counter() - t0


def _name(cfg: PipelineConfig) -> str:
    return f"{cfg.approach}/{cfg.classifier}"


def _metadata(scenario, formula, cfg, splits, extra=None) -> dict:
    meta = {"scenario": scenario, "formula": str(formula), "seed": cfg.seed,
            "config": {k: v for k, v in cfg.to_dict().items() if k not in ("approach", "classifier")},
            "split_sizes": [len(s) for s in splits]}
    meta.update(extra or {})
    return meta


# --------------------------------------------------------------------------- scenarios

def run_scenario1(log_: EventLog, formula: Formula, base: PipelineConfig,
                  approaches=("clustering", "index"), classifiers=("ht", "aht")) -> ScenarioReport:
    labels = label_log(log_, formula)
    train, test = split_log(log_, [80, 20])
    if len(train) == 0 or len(test) == 0:
        raise ValueError("log too small for an 80/20 split")
    report = ScenarioReport(1, _metadata(1, formula, base, [train, test]))
    for approach in approaches:
        names = {}
        for clf in ("rf", *[c for c in classifiers if c != "rf"]):
            cfg = replace(base, approach=approach, classifier=clf)
            p, t_train = _timed_train(train, formula, cfg)
            trace = replay(p, test.cases, labels, cfg, update=(clf != "rf"))
            name = _name(cfg)
            names[clf] = name
            report.results[name] = {**summarize(trace.counts), "fallbacks": trace.fallbacks,
                                    "learn_calls": trace.learn_calls}
            report.timings[name] = t_train + trace.update_time
        rf = names["rf"]
        for clf, name in names.items():
            if clf != "rf":
                report.deltas.append(delta({**report.results[name], "time": report.timings[name]},
                                           {**report.results[rf], "time": report.timings[rf]}, name, rf))
    return report


def run_scenario2(log_: EventLog, formula: Formula, base: PipelineConfig,
                  approaches=("clustering", "index"), classifiers=("ht", "aht")) -> ScenarioReport:
    labels = label_log(log_, formula)
    segs = split_log(log_, [40, 20, 20, 20])
    if any(len(s) == 0 for s in segs):
        raise ValueError("every 40/20/20/20 segment needs at least one case")
    test = segs[3]
    upto = {"60%": log_.with_cases(segs[0].cases + segs[1].cases),
            "80%": log_.with_cases(segs[0].cases + segs[1].cases + segs[2].cases)}
    report = ScenarioReport(2, _metadata(2, formula, base, segs))
    for approach in approaches:
        cfg = replace(base, approach=approach, classifier="rf")
        rf = _name(cfg)
        _, t40 = _timed_train(segs[0], formula, cfg)
        elapsed = t40
        report.results[rf], report.timings[rf] = {}, {"40%": t40}
        for step, data in upto.items():
            p, t = _timed_train(data, formula, cfg)
            elapsed += t
            counts, fb = score(p, test.cases, labels, cfg)
            report.results[rf][step] = {**summarize(counts), "fallbacks": fb}
            report.timings[rf][step] = elapsed
        for clf in (c for c in classifiers if c != "rf"):
            cfg = replace(base, approach=approach, classifier=clf)
            name = _name(cfg)
            p, elapsed = _timed_train(segs[0], formula, cfg)
            report.results[name], report.timings[name] = {}, {"40%": elapsed}
            calls = 0
            for step, seg in (("60%", segs[1]), ("80%", segs[2])):
                t0 = time.perf_counter()
                calls += p.update_many(seg.cases).learn_calls
                elapsed += time.perf_counter() - t0
                counts, fb = score(p, test.cases, labels, cfg)
                report.results[name][step] = {**summarize(counts), "fallbacks": fb,
                                              "learn_calls": calls}
                report.timings[name][step] = elapsed
            for step in upto:
                report.deltas.append(delta({**report.results[name][step], "time": report.timings[name][step]},
                                           {**report.results[rf][step], "time": report.timings[rf][step]},
                                           name, rf, step))
    return report


def run_scenario3(log_: EventLog, formula: Formula, base: PipelineConfig,
                  drift_index: int | None = None,
                  approaches=("clustering", "index")) -> ScenarioReport:
    labels = label_log(log_, formula)
    n = len(log_)
    drift_index = n // 2 if drift_index is None else drift_index
    train, test = split_log(log_, [40, 60])
    if not len(train) <= drift_index < n:
        raise ValueError(f"drift index {drift_index} is outside the test region [{len(train)}, {n})")
    report = ScenarioReport(3, _metadata(3, formula, base, [train, test],
                                         {"drift_index": drift_index}))
    post = test.cases[drift_index - len(train):]
    for approach in approaches:
        names = {}
        for clf in ("ht", "aht"):
            cfg = replace(base, approach=approach, classifier=clf)
            p, t_train = _timed_train(train, formula, cfg)
            trace = replay(p, test.cases, labels, cfg, update=True)
            name = _name(cfg)
            names[clf] = name
            post_counts = trace.counts_for({c.case_id for c in post})
            report.results[name] = {**summarize(trace.counts), "fallbacks": trace.fallbacks,
                                    "post_drift": summarize(post_counts)}
            report.timings[name] = t_train + trace.update_time
            report.series[name] = trace.running_accuracy()
        aht, ht = names["aht"], names["ht"]
        report.deltas.append(delta(report.results[aht], report.results[ht], aht, ht, "test", with_time=False))
        report.deltas.append(delta(report.results[aht]["post_drift"], report.results[ht]["post_drift"],
                                   aht, ht, "post", with_time=False))
    return report
