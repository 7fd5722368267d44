"""Hoeffding tree (VFDT) and the ADWIN-monitored adaptive variant.

Binary labels only. Categorical features split multiway (one child per
value seen at split time; later values grow new leaves). Numeric features
keep a 10-bin equal-width histogram per class whose range follows the data;
they split binary on a bin edge with missing values sent right.
"""
from __future__ import annotations

import math

from ..encoding import CATEGORICAL, FeatureSchema, FeatureVector
from ..event_log import ABSENT
from .adwin import Adwin

N_BINS = 10


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


def entropy(n0: float, n1: float) -> float:
    n = n0 + n1
    if n <= 0:
        return 0.0
    h = 0.0
    for c in (n0, n1):
        if c > 0:
            p = c / n
            h -= p * math.log2(p)
    return h


def _laplace(dist) -> float:
    return (dist[1] + 1.0) / (dist[0] + dist[1] + 2.0)


class _Histogram:
    __slots__ = ("lo", "hi", "c0", "c1", "missing", "n")

    def __init__(self):
        self.lo = self.hi = 0.0
        self.c0 = [0] * N_BINS
        self.c1 = [0] * N_BINS
        self.missing = [0, 0]
        self.n = 0

    def _bin(self, v, lo, hi):
        if hi <= lo:
            return 0
        k = math.ceil((v - lo) / ((hi - lo) / N_BINS)) - 1
        return 0 if k < 0 else (N_BINS - 1 if k >= N_BINS else k)

    def add(self, v, y):
        if v is ABSENT:
            self.missing[y] += 1
            return
        v = float(v)
        if self.n == 0:
            self.lo = self.hi = v
        elif v < self.lo or v > self.hi:
            self._rebin(min(self.lo, v), max(self.hi, v))
        k = self._bin(v, self.lo, self.hi)
        (self.c1 if y else self.c0)[k] += 1
        self.n += 1

    def _rebin(self, lo, hi):
        width = (self.hi - self.lo) / N_BINS
        c0, c1 = [0] * N_BINS, [0] * N_BINS
        for b in range(N_BINS):
            if self.c0[b] or self.c1[b]:
                center = self.lo + (b + 0.5) * width if width > 0 else self.lo
                k = self._bin(center, lo, hi)
                c0[k] += self.c0[b]
                c1[k] += self.c1[b]
        self.lo, self.hi, self.c0, self.c1 = lo, hi, c0, c1

    def best_split(self, parent_h, n):
        """(gain, threshold) of the best bin-edge split, or None."""
        if self.hi <= self.lo:
            return None
        width = (self.hi - self.lo) / N_BINS
        t0, t1 = sum(self.c0), sum(self.c1)
        l0 = l1 = 0
        best = None
        for k in range(1, N_BINS):
            l0 += self.c0[k - 1]
            l1 += self.c1[k - 1]
            r0, r1 = t0 - l0 + self.missing[0], t1 - l1 + self.missing[1]
            nl, nr = l0 + l1, r0 + r1
            if nl == 0 or nr == 0:
                continue
            gain = parent_h - (nl * entropy(l0, l1) + nr * entropy(r0, r1)) / n
            if best is None or gain > best[0]:
                best = (gain, self.lo + k * width)
        return best


class _Leaf:
    __slots__ = ("counts", "prior", "cat", "num", "since_attempt")

    def __init__(self, schema_kinds, prior=(0.0, 0.0)):
        self.counts = [0, 0]
        self.prior = tuple(prior)
        self.cat = {i: {} for i, k in enumerate(schema_kinds) if k == CATEGORICAL}
        self.num = {i: _Histogram() for i, k in enumerate(schema_kinds) if k != CATEGORICAL}
        self.since_attempt = 0

    @property
    def dist(self):
        return (self.counts[0] + self.prior[0], self.counts[1] + self.prior[1])

    def update(self, xs, y):
        self.counts[y] += 1
        self.since_attempt += 1
        for i, table in self.cat.items():
            v = xs[i]
            entry = table.get(v)
            if entry is None:
                table[v] = entry = [0, 0]
            entry[y] += 1
        for i, hist in self.num.items():
            hist.add(xs[i], y)


class _Split:
    """Internal node. ``threshold is None`` marks a categorical multiway split."""

    __slots__ = ("feature", "threshold", "children", "dist", "monitor", "alt", "alt_monitor")

    def __init__(self, feature, threshold, children, dist):
        self.feature = feature
        self.threshold = threshold
        self.children = children
        self.dist = dist
        self.monitor = None
        self.alt = None
        self.alt_monitor = None

    def branch(self, v):
        if self.threshold is None:
            return v
        return 0 if (v is not ABSENT and v <= self.threshold) else 1


class HoeffdingTree:
    """Very Fast Decision Tree for binary labels.

    A leaf attempts a split every ``grace_period`` instances (unless pure).
    It splits on the feature with the highest information gain ``G1`` when
    ``G1 - G2 > eps`` or ``eps < tau``, where ``G2`` is the runner-up gain
    (or 0 for not splitting) and ``eps`` is the Hoeffding bound with R = 1.
    """

    def __init__(self, features: FeatureSchema, delta: float = 1e-7, tau: float = 0.05,
                 grace_period: int = 200, default_label: bool = False):
        self.features = features
        self.schema_id = features.schema_id
        self.kinds = features.kinds
        self.delta = delta
        self.tau = tau
        self.grace_period = grace_period
        self.default_label = default_label
        self.root = self._new_leaf()
        self.n_seen = 0
        self.n_splits = 0

    def _new_leaf(self, prior=(0.0, 0.0)) -> _Leaf:
        return _Leaf(self.kinds, prior)

    def _check(self, x: FeatureVector):
        if x.schema_id != self.schema_id:
            raise ValueError("feature vector schema does not match the tree")

    # ------------------------------------------------------------------ learning
    def learn_one(self, x: FeatureVector, y: bool):
        self._check(x)
        self.n_seen += 1
        self.root = self._learn(self.root, x.values, 1 if y else 0)

    def _learn(self, node, xs, y):
        """Learn at ``node``; return whatever should now occupy its slot."""
        if isinstance(node, _Leaf):
            return self._learn_leaf(node, xs, y)
        self._learn_children(node, xs, y)
        return node

    def _learn_children(self, node, xs, y):
        key = node.branch(xs[node.feature])
        child = node.children.get(key)
        if child is None:
            child = self._new_leaf()
        node.children[key] = self._learn(child, xs, y)

    def _learn_leaf(self, leaf, xs, y):
        leaf.update(xs, y)
        if leaf.since_attempt >= self.grace_period and leaf.counts[0] and leaf.counts[1]:
            leaf.since_attempt = 0
            split = self._attempt_split(leaf)
            if split is not None:
                self.n_splits += 1
                return split
        return leaf

    def split_candidates(self, leaf) -> list[tuple[float, int, float | None]]:
        """(gain, feature, threshold) for every feature with a usable split."""
        n0, n1 = leaf.counts
        n = n0 + n1
        parent_h = entropy(n0, n1)
        out = []
        for i in range(len(self.kinds)):
            if i in leaf.cat:
                table = leaf.cat[i]
                if len(table) < 2:
                    continue
                child_h = sum((a + b) * entropy(a, b) for a, b in table.values()) / n
                out.append((parent_h - child_h, i, None))
            else:
                best = leaf.num[i].best_split(parent_h, n)
                if best is not None:
                    out.append((best[0], i, best[1]))
        return out

    def _attempt_split(self, leaf):
        cands = self.split_candidates(leaf)
        if not cands:
            return None
        cands.sort(key=lambda c: (-c[0], c[1]))
        best = cands[0]
        second = max(cands[1][0], 0.0) if len(cands) > 1 else 0.0
        eps = hoeffding_bound(1.0, self.delta, leaf.counts[0] + leaf.counts[1])
        if best[0] <= 0 or not (best[0] - second > eps or eps < self.tau):
            return None
        return self._make_split(leaf, best[1], best[2])

    def _make_split(self, leaf, feature, threshold):
        if threshold is None:
            children = {v: self._new_leaf((a, b)) for v, (a, b) in leaf.cat[feature].items()}
        else:
            h = leaf.num[feature]
            width = (h.hi - h.lo) / N_BINS
            k = round((threshold - h.lo) / width)
            l0, l1 = sum(h.c0[:k]), sum(h.c1[:k])
            r0 = sum(h.c0[k:]) + h.missing[0]
            r1 = sum(h.c1[k:]) + h.missing[1]
            children = {0: self._new_leaf((l0, l1)), 1: self._new_leaf((r0, r1))}
        return self._new_split(feature, threshold, children, leaf.dist)

    def _new_split(self, feature, threshold, children, dist):
        return _Split(feature, threshold, children, dist)

    # ------------------------------------------------------------------ prediction
    def _leaf_dist(self, node, xs):
        while isinstance(node, _Split):
            child = node.children.get(node.branch(xs[node.feature]))
            if child is None:
                return node.dist
            node = child
        return node.dist

    def _decide(self, dist) -> tuple[bool, float]:
        if dist[1] > dist[0]:
            label = True
        elif dist[0] > dist[1]:
            label = False
        else:
            label = self.default_label
        return label, _laplace(dist)

    def predict_one(self, x: FeatureVector) -> tuple[bool, float]:
        """(majority label, Laplace-smoothed positive fraction) at x's leaf."""
        self._check(x)
        return self._decide(self._leaf_dist(self.root, x.values))

    # ------------------------------------------------------------------ introspection
    def walk(self):
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            if isinstance(node, _Split):
                stack.extend((c, depth + 1) for c in node.children.values())

    @property
    def n_leaves(self) -> int:
        return sum(isinstance(n, _Leaf) for n, _ in self.walk())

    @property
    def depth(self) -> int:
        return max(d for _, d in self.walk())

    def hyperparameters(self) -> dict:
        return {"delta": self.delta, "tau": self.tau, "grace_period": self.grace_period}


class AdaptiveHoeffdingTree(HoeffdingTree):
    """Hoeffding tree whose internal nodes carry ADWIN accuracy monitors.

    Every split node on an instance's path records whether its subtree
    predicted the instance correctly. When a node's monitor detects a drop in
    accuracy, an alternate subtree starts learning from the instances that
    reach the node. Once both windows hold more than ``alt_min_samples``
    outcomes, the alternate takes over if its accuracy beats the node's by
    more than::

        sqrt(2 e (1 - e) ln(2 / alt_delta) (1/n_alt + 1/n_node))

    (``e`` the node's error rate), and is discarded if it trails by that
    margin. With ``monitors=False`` this is exactly a :class:`HoeffdingTree`.
    """

    def __init__(self, features: FeatureSchema, delta: float = 1e-7, tau: float = 0.05,
                 grace_period: int = 200, default_label: bool = False,
                 adwin_delta: float = 0.002, alt_min_samples: int = 300,
                 alt_delta: float = 0.05, monitors: bool = True):
        super().__init__(features, delta, tau, grace_period, default_label)
        self.adwin_delta = adwin_delta
        self.alt_min_samples = alt_min_samples
        self.alt_delta = alt_delta
        self.monitors = monitors
        self.n_alternates = 0
        self.n_replacements = 0
        self.n_pruned = 0

    def _new_split(self, feature, threshold, children, dist):
        node = _Split(feature, threshold, children, dist)
        if self.monitors:
            node.monitor = Adwin(self.adwin_delta)
        return node

    def _correct(self, node, xs, y) -> int:
        label, _ = self._decide(self._leaf_dist(node, xs))
        return int(label == bool(y))

    def _learn(self, node, xs, y):
        if isinstance(node, _Leaf) or node.monitor is None:
            return super()._learn(node, xs, y)
        before = node.monitor.estimate
        if node.monitor.update(self._correct(node, xs, y)):
            if node.alt is None and node.monitor.estimate < before:
                node.alt = self._new_leaf()
                node.alt_monitor = Adwin(self.adwin_delta)
                self.n_alternates += 1
        if node.alt is not None:
            node.alt_monitor.update(self._correct(node.alt, xs, y))
            node.alt = self._learn(node.alt, xs, y)
        self._learn_children(node, xs, y)
        if (node.alt is not None and node.alt_monitor.width > self.alt_min_samples
                and node.monitor.width > self.alt_min_samples):
            n_alt, n_main = node.alt_monitor.width, node.monitor.width
            err = 1.0 - node.monitor.estimate
            margin = math.sqrt(2.0 * err * (1.0 - err) * math.log(2.0 / self.alt_delta)
                               * (1.0 / n_alt + 1.0 / n_main))
            gap = node.alt_monitor.estimate - node.monitor.estimate
            if gap > margin:
                self.n_replacements += 1
                return node.alt
            if -gap > margin:
                node.alt = node.alt_monitor = None
                self.n_pruned += 1
        return node

    def hyperparameters(self) -> dict:
        return {**super().hyperparameters(), "adwin_delta": self.adwin_delta,
                "alt_min_samples": self.alt_min_samples, "alt_delta": self.alt_delta,
                "monitors": self.monitors}
