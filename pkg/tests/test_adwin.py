import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incppm.classifiers import Adwin, cut_threshold

from . import oracles


def first_fire(stream, **kw):
    a = Adwin(**kw)
    for i, v in enumerate(stream):
        if a.update(v):
            return i
    return None


def test_step_change_agrees_with_brute_force():
    stream = [1] * 500 + [0] * 500
    brute = oracles.brute_adwin_first_fire(stream)
    got = first_fire(stream)
    assert 500 <= brute <= got < 1000
    assert got - brute < 32  # checks run every 32 updates


def test_constant_stream_never_fires():
    assert first_fire([1] * 3000) is None
    assert first_fire([0] * 3000) is None


def test_single_update():
    a = Adwin()
    assert a.update(1) is False
    assert a.width == 1 and a.estimate == 1.0


def test_drop_keeps_recent_outcomes():
    a = Adwin()
    for v in [1] * 1000 + [0] * 300:
        a.update(v)
    assert a.n_detections >= 1
    assert a.width < 400
    assert a.estimate < 0.2


def test_cut_threshold_formula():
    n0, n1, w, d = 100, 50, 7, 0.002
    m = 1 / (1 / n0 + 1 / n1)
    assert cut_threshold(n0, n1, w, d) == pytest.approx(math.sqrt(math.log(4 * w / d) / (2 * m)))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=2000))
def test_bucket_bookkeeping(stream):
    a = Adwin(clock=10**9)  # never check: window keeps everything
    for v in stream:
        a.update(v)
    buckets = a.window()
    assert sum(n for _, n in buckets) == a.width == len(stream)
    assert sum(s for s, _ in buckets) == pytest.approx(sum(stream))
    assert all(len(row) <= a.max_buckets for row in a.rows)
    # newest bucket holds the newest outcome
    assert buckets[-1] == (float(stream[-1]), 1)


def test_flip_detection_rate_small():
    hits = 0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        stream = np.r_[rng.random(2000) < 0.9, rng.random(2000) < 0.1].astype(int)
        i = first_fire(stream)
        hits += i is not None and 2000 <= i < 3000
    assert hits == 5
