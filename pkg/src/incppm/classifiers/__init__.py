"""Incremental (Hoeffding-family) and offline (random forest) classifiers."""
from .adwin import Adwin, cut_threshold
from .forest import CART, RandomForest
from .hoeffding import AdaptiveHoeffdingTree, HoeffdingTree, hoeffding_bound

INCREMENTAL = ("ht", "aht")
KINDS = ("ht", "aht", "rf")


def make_incremental(kind, features, params):
    """Fresh HT or AHT over ``features``; ``params`` is a PipelineConfig-like object."""
    common = dict(delta=params.delta, tau=params.tau, grace_period=params.grace)
    if kind == "ht":
        return HoeffdingTree(features, **common)
    if kind == "aht":
        return AdaptiveHoeffdingTree(features, **common, adwin_delta=params.adwin_delta,
                                     alt_min_samples=params.alt_min_samples,
                                     alt_delta=params.alt_delta,
                                     monitors=params.monitors)
    raise ValueError(f"{kind!r} is not an incremental classifier")


__all__ = ["Adwin", "cut_threshold", "CART", "RandomForest", "HoeffdingTree",
           "AdaptiveHoeffdingTree", "hoeffding_bound", "make_incremental",
           "INCREMENTAL", "KINDS"]
