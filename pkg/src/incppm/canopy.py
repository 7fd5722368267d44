"""Two-threshold canopy clustering over frequency vectors.

L1 is the cheap metric used for canopy membership; Euclidean distance is the
precise metric used to refine membership and to assign queries. Centers are
frozen once created.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .encoding import FeatureVector

FORMAT_VERSION = 1


def l1(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b).sum(axis=-1)


def sq_euclid(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a - b
    return (d * d).sum(axis=-1)


@dataclass
class CanopyModel:
    t1: float
    t2: float
    schema_id: str
    dim: int
    centers: list[np.ndarray] = field(default_factory=list)
    member_counts: list[int] = field(default_factory=list)
    members: list[list[int]] = field(default_factory=list)
    n_items: int = 0
    n_built: int = 0  # canopies created by build(); the rest came from insert()

    def __post_init__(self):
        if not 0 <= self.t2 < self.t1:
            raise ValueError(f"need 0 <= T2 < T1, got T1={self.t1}, T2={self.t2}")
        self._matrix = np.asarray(self.centers, dtype=float).reshape(len(self.centers), self.dim)

    def __len__(self):
        return len(self.centers)

    def _vec(self, item: FeatureVector) -> np.ndarray:
        if item.schema_id != self.schema_id:
            raise ValueError("feature vector schema does not match the canopy model")
        return np.asarray(item.values, dtype=float)

    def _new_canopy(self, x: np.ndarray) -> int:
        self.centers.append(x)
        self.member_counts.append(0)
        self.members.append([])
        self._matrix = np.vstack([self._matrix, x[None, :]])
        return len(self.centers) - 1

    def _add_member(self, k: int, item_id: int):
        self.member_counts[k] += 1
        self.members[k].append(item_id)

    def insert(self, item: FeatureVector) -> list[int]:
        """Add ``item`` to every canopy within T1; open a new canopy if none."""
        x = self._vec(item)
        item_id = self.n_items
        self.n_items += 1
        near = np.flatnonzero(l1(self._matrix, x) <= self.t1) if len(self) else np.array([], int)
        if near.size == 0:
            near = np.array([self._new_canopy(x)])
        for k in near:
            self._add_member(int(k), item_id)
        return [int(k) for k in near]

    def assign(self, item: FeatureVector) -> int:
        """Index of the canopy whose center is nearest (Euclidean); lowest index on ties."""
        if not len(self):
            raise ValueError("canopy model is empty")
        return int(np.argmin(sq_euclid(self._matrix, self._vec(item))))

    def to_dict(self) -> dict:
        return {
            "format": "incppm-canopy", "version": FORMAT_VERSION,
            "t1": self.t1, "t2": self.t2, "schema_id": self.schema_id, "dim": self.dim,
            "centers": [c.tolist() for c in self.centers],
            "member_counts": list(self.member_counts),
            "members": [list(m) for m in self.members],
            "n_items": self.n_items, "n_built": self.n_built,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanopyModel":
        if d.get("format") != "incppm-canopy" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 canopy model")
        return cls(d["t1"], d["t2"], d["schema_id"], d["dim"],
                   [np.asarray(c, dtype=float) for c in d["centers"]],
                   list(d["member_counts"]), [list(m) for m in d["members"]],
                   d["n_items"], d["n_built"])

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "CanopyModel":
        return cls.from_dict(json.loads(text))


def build(items: list[FeatureVector], t1: float, t2: float,
          seed: int | None = None) -> CanopyModel:
    """Classic canopy construction followed by a precise-metric refinement.

    Centers are picked from the remaining pool in input order, or in a
    seeded random order when ``seed`` is given. Each canopy takes every
    pooled item within L1 distance ``t1``; items within ``t2`` (and the
    center itself) leave the pool. Afterwards each item is also made a member
    of its Euclidean-nearest canopy, so training membership agrees with
    :meth:`CanopyModel.assign`.
    """
    if not items:
        raise ValueError("cannot build canopies from an empty item list")
    schema_id = items[0].schema_id
    if any(it.schema_id != schema_id for it in items):
        raise ValueError("items come from different schemas")
    X = np.asarray([it.values for it in items], dtype=float).reshape(len(items), -1)
    model = CanopyModel(t1, t2, schema_id, X.shape[1])

    order = np.arange(len(items))
    if seed is not None:
        order = np.random.default_rng(seed).permutation(len(items))
    in_pool = np.ones(len(items), dtype=bool)
    membership = [[] for _ in range(len(items))]
    for idx in order:
        if not in_pool[idx]:
            continue
        pool = np.flatnonzero(in_pool)
        d = l1(X[pool], X[idx])
        k = model._new_canopy(X[idx].copy())
        for j in pool[d <= t1]:
            membership[j].append(k)
        in_pool[pool[d <= t2]] = False
        in_pool[idx] = False

    C = model._matrix
    for j in range(len(items)):
        nearest = int(np.argmin(sq_euclid(C, X[j])))
        if nearest not in membership[j]:
            membership[j].append(nearest)
        for k in sorted(membership[j]):
            model._add_member(k, j)
    model.n_items = len(items)
    model.n_built = len(model)
    return model


def default_thresholds(items: list[FeatureVector], sample_size: int = 200,
                       seed: int = 0) -> tuple[float, float]:
    """(T1, T2) = (75th, 25th) percentile of pairwise L1 distances on a sample."""
    if not items:
        raise ValueError("no items to calibrate thresholds on")
    rng = np.random.default_rng(seed)
    idx = np.arange(len(items))
    if len(items) > sample_size:
        idx = np.sort(rng.choice(len(items), size=sample_size, replace=False))
    X = np.asarray([items[i].values for i in idx], dtype=float).reshape(len(idx), -1)
    if len(X) < 2:
        return 1.0, 0.0
    iu = np.triu_indices(len(X), k=1)
    d = np.abs(X[:, None, :] - X[None, :, :]).sum(-1)[iu]
    t1, t2 = float(np.percentile(d, 75)), float(np.percentile(d, 25))
    if t1 <= t2:
        t1 = t2 + 1.0
    return t1, t2
