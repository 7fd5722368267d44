"""Incremental predictive process monitoring.

Outcome labels come from finite-trace LTL formulas; prefixes are encoded
(frequency, index or last-event payload) and fed to Hoeffding trees, ADWIN
monitored adaptive Hoeffding trees, or an offline random forest.
"""
from .event_log import ABSENT, Case, Event, EventLog, read_log
from .ltl import evaluate, label_log, parse_formula
from .pipelines import ClusteringPipeline, IndexPipeline, PipelineConfig, train_pipeline

__version__ = "0.1.0"

__all__ = ["ABSENT", "Case", "Event", "EventLog", "read_log", "evaluate", "label_log",
           "parse_formula", "ClusteringPipeline", "IndexPipeline", "PipelineConfig",
           "train_pipeline"]
