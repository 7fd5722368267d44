"""ADWIN change detector over a stream of 0/1 outcomes.

The window is stored as an exponential histogram: row ``r`` holds bucket
sums over ``2**r`` consecutive outcomes, at most ``max_buckets`` per row.
Cut points are the bucket boundaries. A cut between an older sub-window of
size ``n0`` and a newer one of size ``n1`` fires when the difference of their
means exceeds::

    eps_cut = sqrt(1 / (2 m) * ln(4 W / delta)),   m = 1 / (1/n0 + 1/n1)

with ``W`` the number of cuts examined in that check. On a fire the oldest
bucket is dropped and the check repeats until no cut fires.
"""
from __future__ import annotations

import math


def cut_threshold(n0: int, n1: int, n_cuts: int, delta: float) -> float:
    m = 1.0 / (1.0 / n0 + 1.0 / n1)
    return math.sqrt(math.log(4.0 * n_cuts / delta) / (2.0 * m))


class Adwin:
    def __init__(self, delta: float = 0.002, max_buckets: int = 5, clock: int = 32,
                 min_window: int = 10, min_sub_window: int = 5):
        self.delta = delta
        self.max_buckets = max_buckets
        self.clock = clock
        self.min_window = min_window
        self.min_sub_window = min_sub_window
        self.rows: list[list[float]] = [[]]  # rows[r]: bucket sums, oldest first
        self.width = 0
        self.total = 0.0
        self.n_updates = 0
        self.n_detections = 0

    @property
    def estimate(self) -> float:
        return self.total / self.width if self.width else 0.0

    def window(self) -> list[tuple[float, int]]:
        """(sum, size) of every bucket, oldest first."""
        out = []
        for r in range(len(self.rows) - 1, -1, -1):
            out.extend((s, 1 << r) for s in self.rows[r])
        return out

    def update(self, value: float) -> bool:
        """Append ``value``; return True when a change was detected."""
        self.n_updates += 1
        self.width += 1
        self.total += value
        self.rows[0].append(float(value))
        r = 0
        while len(self.rows[r]) > self.max_buckets:
            merged = self.rows[r].pop(0) + self.rows[r].pop(0)
            if r + 1 == len(self.rows):
                self.rows.append([])
            self.rows[r + 1].append(merged)
            r += 1
        if self.n_updates % self.clock != 0 or self.width < self.min_window:
            return False
        detected = False
        while self._cut_fires():
            self._drop_oldest()
            detected = True
        if detected:
            self.n_detections += 1
        return detected

    def _cut_fires(self) -> bool:
        buckets = self.window()
        cuts = []
        n0, s0 = 0, 0.0
        for s, size in buckets[:-1]:
            n0 += size
            s0 += s
            n1 = self.width - n0
            if n0 >= self.min_sub_window and n1 >= self.min_sub_window:
                cuts.append((n0, s0))
        if not cuts:
            return False
        for n0, s0 in cuts:
            n1 = self.width - n0
            diff = abs(s0 / n0 - (self.total - s0) / n1)
            if diff > cut_threshold(n0, n1, len(cuts), self.delta):
                return True
        return False

    def _drop_oldest(self):
        r = len(self.rows) - 1
        while r > 0 and not self.rows[r]:
            r -= 1
        s = self.rows[r].pop(0)
        self.width -= 1 << r
        self.total -= s
        while len(self.rows) > 1 and not self.rows[-1]:
            self.rows.pop()
