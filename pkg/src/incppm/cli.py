"""Command line entry point: ``incppm {evaluate,generate-drift,label,encode,train}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import drift_gen
from .encoding import (EncodingSchema, PayloadSchema, encode_frequency, encode_index,
                       encode_payload, export_encoded, extract_prefixes)
from .evaluation import run_scenario1, run_scenario2, run_scenario3
from .event_log import CsvSchemaConfig, canonical_order, read_log, write_csv
from .ltl import label_log, labels_to_csv, parse_formula
from .pipelines import PipelineConfig, train_pipeline

log = logging.getLogger("incppm")


def _add_log_args(p):
    p.add_argument("--log", required=True, type=Path, help="event log (CSV or XES)")
    p.add_argument("--format", choices=("csv", "xes"), default=None,
                   help="log format (default: from the file extension)")
    p.add_argument("--case-col", default="case_id")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--timestamp-col", default="timestamp")
    p.add_argument("--static", default=None, help="comma-separated static (case) attribute columns")
    p.add_argument("--dynamic", default=None, help="comma-separated dynamic (event) attribute columns")


def _add_model_args(p):
    p.add_argument("--outcome", required=True, help="LTL formula, e.g. 'F(\"Accept Claim\")'")
    p.add_argument("--t1", type=float, default=None)
    p.add_argument("--t2", type=float, default=None)
    p.add_argument("--delta", type=float, default=1e-7, help="Hoeffding split confidence")
    p.add_argument("--tau", type=float, default=0.05, help="Hoeffding tie threshold")
    p.add_argument("--grace", type=int, default=200, help="instances between split attempts")
    p.add_argument("--adwin-delta", type=float, default=0.002)
    p.add_argument("--prefix-min", type=int, default=1)
    p.add_argument("--prefix-max", type=int, default=20)
    p.add_argument("--n-trees", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)


def _split(text):
    return None if text is None else [c for c in text.split(",") if c]


def _load(args):
    cfg = CsvSchemaConfig(case_id=args.case_col, activity=args.activity_col,
                          timestamp=args.timestamp_col or None,
                          static=_split(args.static), dynamic=_split(args.dynamic))
    return canonical_order(read_log(args.log, args.format, cfg))


def _config(args, **extra) -> PipelineConfig:
    return PipelineConfig(prefix_min=args.prefix_min, prefix_max=args.prefix_max,
                          t1=args.t1, t2=args.t2, delta=args.delta, tau=args.tau,
                          grace=args.grace, adwin_delta=args.adwin_delta,
                          n_trees=args.n_trees, seed=args.seed, **extra)


def cmd_evaluate(args) -> int:
    event_log = _load(args)
    formula = parse_formula(args.outcome)
    base = _config(args)
    approaches = (args.approach,) if args.approach else ("clustering", "index")
    if args.scenario == 3:
        report = run_scenario3(event_log, formula, base, args.drift_index, approaches)
    else:
        if args.classifier in (None, "rf"):
            classifiers = ("ht", "aht")
        else:
            classifiers = (args.classifier,)
        run = run_scenario1 if args.scenario == 1 else run_scenario2
        report = run(event_log, formula, base, approaches, classifiers)
    out = report.write(args.out)
    sys.stdout.write(report.to_text())
    log.info("report written to %s", out)
    return 0


def cmd_generate(args) -> int:
    n_base = args.cases // 2
    cfg = drift_gen.ClaimProcessConfig(n_cases_baseline=n_base, n_cases_drift=args.cases - n_base,
                                       seed=args.seed)
    data = write_csv(drift_gen.generate(args.variant, cfg).log)
    if args.out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        args.out.write_bytes(data)
    return 0


def cmd_label(args) -> int:
    data = labels_to_csv(label_log(_load(args), parse_formula(args.outcome)))
    if args.out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        args.out.write_bytes(data)
    return 0


def cmd_encode(args) -> int:
    event_log = _load(args)
    labels = label_log(event_log, parse_formula(args.outcome)) if args.outcome else {}
    prefixes = [pre for c in event_log.cases
                for pre in extract_prefixes(c, args.prefix_min, args.prefix_max, labels.get(c.case_id))]
    if args.encoding == "frequency":
        schema = EncodingSchema.frequency(event_log)
        vectors = [encode_frequency(p, schema) for p in prefixes]
    elif args.encoding == "payload":
        schema = PayloadSchema.from_log(event_log)
        vectors = [encode_payload(p, schema) for p in prefixes]
    else:
        if args.length is None:
            raise ValueError("--encoding index needs --length")
        schema = EncodingSchema.index(event_log, args.length)
        prefixes = [p for p in prefixes if p.length == args.length]
        vectors = [encode_index(p, schema) for p in prefixes]
    csv_path, sidecar = export_encoded(args.out, vectors, [p.label for p in prefixes], schema.features)
    log.info("wrote %s and %s (%d rows)", csv_path, sidecar, len(vectors))
    return 0


def cmd_train(args) -> int:
    cfg = _config(args, approach=args.approach or "clustering", classifier=args.classifier or "ht")
    pipeline = train_pipeline(_load(args), parse_formula(args.outcome), cfg)
    pipeline.save(args.out)
    log.info("saved %s pipeline to %s", type(pipeline).__name__, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incppm", description="Incremental outcome prediction for event logs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="run an evaluation scenario and write a report directory")
    _add_log_args(p)
    _add_model_args(p)
    p.add_argument("--scenario", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--approach", choices=("clustering", "index"), default=None,
                   help="restrict to one approach (default: both)")
    p.add_argument("--classifier", choices=("ht", "aht", "rf"), default=None,
                   help="incremental classifier compared against the forest (default: ht and aht); "
                        "scenario 3 always compares ht with aht")
    p.add_argument("--drift-index", type=int, default=None,
                   help="scenario 3: index of the first post-drift case (default: half the log)")
    p.add_argument("--out", type=Path, default=Path("report"))
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate-drift", parents=[common], help="write a synthetic claim-handling log as CSV")
    p.add_argument("--variant", choices=drift_gen.VARIANTS, required=True)
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", parents=[common], help="export case_id,label for an outcome formula")
    _add_log_args(p)
    p.add_argument("--outcome", required=True)
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("encode", parents=[common], help="export encoded prefixes as CSV plus a schema sidecar")
    _add_log_args(p)
    p.add_argument("--encoding", choices=("frequency", "index", "payload"), default="frequency")
    p.add_argument("--length", type=int, default=None, help="prefix length for index encoding")
    p.add_argument("--outcome", default=None, help="optional formula for the label column")
    p.add_argument("--prefix-min", type=int, default=1)
    p.add_argument("--prefix-max", type=int, default=20)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("train", parents=[common], help="train a pipeline and save it")
    _add_log_args(p)
    _add_model_args(p)
    p.add_argument("--approach", choices=("clustering", "index"), default="clustering")
    p.add_argument("--classifier", choices=("ht", "aht", "rf"), default="ht")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_train)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # any failure must surface as a nonzero exit
        log.debug("failure", exc_info=True)
        print(f"incppm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
