"""Offline baseline: CART trees (Gini) and a bagged random forest.

Numeric features split on ``x <= t`` (missing values go right); categorical
features split one-vs-rest on ``x == level``. Categorical levels are coded
against the training data; unseen levels never match a level test.
"""
from __future__ import annotations

import math

import numpy as np

from ..encoding import CATEGORICAL, FeatureSchema, FeatureVector
from ..event_log import ABSENT


class Encoder:
    """Maps FeatureVectors to a float matrix (NaN = missing numeric)."""

    def __init__(self, features: FeatureSchema):
        self.features = features
        self.categorical = np.array([k == CATEGORICAL for k in features.kinds], dtype=bool)
        self.levels: list[dict] = [{} for _ in features.kinds]

    def fit(self, xs: list[FeatureVector]):
        for x in xs:
            for i, v in enumerate(x.values):
                if self.categorical[i]:
                    self.levels[i].setdefault(v, len(self.levels[i]))
        return self

    def transform(self, xs: list[FeatureVector]) -> np.ndarray:
        out = np.empty((len(xs), len(self.features)), dtype=float)
        for r, x in enumerate(xs):
            if x.schema_id != self.features.schema_id:
                raise ValueError("feature vector schema does not match the model")
            for i, v in enumerate(x.values):
                if self.categorical[i]:
                    out[r, i] = self.levels[i].get(v, -1)
                else:
                    out[r, i] = np.nan if v is ABSENT else float(v)
        return out


def gini_counts(n0, n1):
    n = n0 + n1
    return 1.0 - ((n0 / n) ** 2 + (n1 / n) ** 2)


def _best_numeric(col, y, parent_pos, n):
    """Best ``x <= t`` split of one column; returns (impurity, threshold) or None."""
    ok = ~np.isnan(col)
    vals, ys = col[ok], y[ok]
    if vals.size < 1:
        return None
    order = np.argsort(vals, kind="stable")
    vals, ys = vals[order], ys[order]
    cum_pos = np.cumsum(ys)
    idx = np.flatnonzero(vals[1:] != vals[:-1])  # last index of each left block
    if idx.size == 0:
        if vals.size == n:
            return None
        idx = np.array([vals.size - 1])  # everything present left, missing right
    nl = idx + 1.0
    pl = cum_pos[idx].astype(float)
    nr = n - nl
    pr = parent_pos - pl
    with np.errstate(divide="ignore", invalid="ignore"):
        gl = 1.0 - ((pl / nl) ** 2 + ((nl - pl) / nl) ** 2)
        gr = np.where(nr > 0, 1.0 - ((pr / nr) ** 2 + ((nr - pr) / nr) ** 2), 0.0)
    imp = (nl * gl + nr * gr) / n
    imp[nr == 0] = np.inf
    j = int(np.argmin(imp))
    if not np.isfinite(imp[j]):
        return None
    k = idx[j]
    upper = vals[k + 1] if k + 1 < vals.size else vals[k]
    return float(imp[j]), float((vals[k] + upper) / 2.0)


def _best_categorical(col, y, parent_pos, n):
    present = np.unique(col[col >= 0]).astype(np.int64)
    if present.size < 2:
        return None
    ci = col.astype(np.int64)
    best = None
    for level in present:
        mask = ci == level
        nl = int(mask.sum())
        nr = n - nl
        if nl == 0 or nr == 0:
            continue
        pl = int(y[mask].sum())
        imp = (nl * gini_counts(nl - pl, pl) + nr * gini_counts(nr - (parent_pos - pl), parent_pos - pl)) / n
        if best is None or imp < best[0]:
            best = (imp, float(level))
    return best


class CART:
    """Binary-label CART grown until pure or fewer than ``min_samples_split`` rows."""

    def __init__(self, max_features: int | None = None, min_samples_split: int = 2,
                 rng: np.random.Generator | None = None):
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.rng = rng or np.random.default_rng(0)
        # flat arrays: feature, threshold, is_categorical, left, right, value (P(y=1))
        self.nodes: list[list] = []

    def fit(self, X: np.ndarray, y: np.ndarray, categorical: np.ndarray):
        self.nodes = []
        self.categorical = categorical
        stack = [(np.arange(len(y)), None, None)]
        while stack:
            rows, parent, side = stack.pop()
            node_id = len(self.nodes)
            if parent is not None:
                self.nodes[parent][3 if side == "L" else 4] = node_id
            yy = y[rows]
            n, pos = len(rows), int(yy.sum())
            self.nodes.append([-1, 0.0, False, -1, -1, pos / n])
            if pos == 0 or pos == n or n < self.min_samples_split:
                continue
            split = self._choose(X[rows], yy, pos, n, categorical)
            if split is None:
                continue
            f, thr = split
            col = X[rows, f]
            go_left = (col == thr) if categorical[f] else (col <= thr)
            self.nodes[node_id][:3] = [f, thr, bool(categorical[f])]
            stack.append((rows[~go_left], node_id, "R"))
            stack.append((rows[go_left], node_id, "L"))
        return self

    def _choose(self, Xn, y, pos, n, categorical):
        p = Xn.shape[1]
        k = p if self.max_features is None else min(p, self.max_features)
        feats = self.rng.choice(p, size=k, replace=False) if k < p else np.arange(p)
        best = None
        for f in feats:
            fn = _best_categorical if categorical[f] else _best_numeric
            res = fn(Xn[:, f], y, pos, n)
            if res is not None and (best is None or res[0] < best[0]):
                best = (res[0], int(f), res[1])
        if best is None:
            return None
        return best[1], best[2]

    def predict_proba_row(self, row: np.ndarray) -> float:
        i = 0
        while True:
            f, thr, cat, left, right, value = self.nodes[i]
            if f < 0:
                return value
            v = row[f]
            i = left if ((v == thr) if cat else (v <= thr)) else right

    def predict_row(self, row: np.ndarray) -> bool:
        return self.predict_proba_row(row) > 0.5

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


class RandomForest:
    """Bagged CART ensemble; prediction is a majority vote of the trees.

    The score is the fraction of trees voting positive; ties vote negative.
    """

    def __init__(self, features: FeatureSchema, n_trees: int = 10, seed: int = 0,
                 min_samples_split: int = 2):
        self.features = features
        self.schema_id = features.schema_id
        self.n_trees = n_trees
        self.seed = seed
        self.min_samples_split = min_samples_split
        self.trees: list[CART] = []
        self.encoder = Encoder(features)

    def fit(self, data: list[tuple[FeatureVector, bool]]) -> "RandomForest":
        if not data:
            raise ValueError("cannot fit a random forest on empty data")
        xs = [x for x, _ in data]
        self.encoder = Encoder(self.features).fit(xs)
        X = self.encoder.transform(xs)
        y = np.array([1 if lab else 0 for _, lab in data], dtype=np.int64)
        rng = np.random.default_rng(self.seed)
        max_features = max(1, math.ceil(math.sqrt(X.shape[1])))
        self.trees = []
        for _ in range(self.n_trees):
            tree_rng = np.random.default_rng(rng.integers(2**63))
            rows = tree_rng.integers(0, len(y), size=len(y))
            tree = CART(max_features, self.min_samples_split, tree_rng)
            tree.fit(X[rows], y[rows], self.encoder.categorical)
            self.trees.append(tree)
        return self

    def tree_votes(self, x: FeatureVector) -> list[bool]:
        row = self.encoder.transform([x])[0]
        return [t.predict_row(row) for t in self.trees]

    def predict_one(self, x: FeatureVector) -> tuple[bool, float]:
        if not self.trees:
            return False, 0.5
        votes = self.tree_votes(x)
        pos = sum(votes)
        return 2 * pos > len(votes), pos / len(votes)

    def structure(self) -> list[list[list]]:
        return [t.nodes for t in self.trees]

    def hyperparameters(self) -> dict:
        return {"n_trees": self.n_trees, "seed": self.seed,
                "min_samples_split": self.min_samples_split}
