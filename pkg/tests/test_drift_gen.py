import numpy as np
import pytest

from incppm import drift_gen
from incppm.drift_gen import (ACTIVITIES, ClaimProcessConfig, accepts_trace, acceptance_probability,
                              generate, generate_baseline, generate_drift1, generate_drift2)
from incppm.event_log import write_csv
from incppm.ltl import label_log, parse_formula

PHI41 = parse_formula('F("Accept Claim")')
PHI51 = parse_formula('F("Send Notification by Phone") & F("Send Notification by Post")')


@pytest.fixture(scope="module")
def logs():
    cfg = ClaimProcessConfig(n_cases_baseline=300, n_cases_drift=300, seed=2)
    return {v: generate(v, cfg) for v in drift_gen.VARIANTS}


def variant_of(g, i):
    return g.variant if i >= g.drift_index else "baseline"


def test_vocabulary():
    assert len(ACTIVITIES) == 17 == len(set(ACTIVITIES))


def test_config_validation():
    with pytest.raises(ValueError):
        ClaimProcessConfig(n_cases_baseline=0)
    with pytest.raises(ValueError):
        ClaimProcessConfig(accept_favored=1.2)
    with pytest.raises(ValueError):
        ClaimProcessConfig(status_probs=(0.5, 0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        generate("drift9", ClaimProcessConfig())


def test_drift_index(logs):
    assert logs["drift1"].drift_index == 300 == logs["drift2"].drift_index
    assert logs["baseline"].drift_index == 600


def test_every_trace_is_valid(logs):
    for g in logs.values():
        for i, case in enumerate(g.log.cases):
            assert accepts_trace(case.activities, variant_of(g, i)), case.activities
            assert set(case.activities) <= set(ACTIVITIES)


def test_acceptor_rejects_wrong_variant():
    base = ["Register Claim", "Check Policy", "Send Questionnaire", "Complex Check", "Contact Hospital",
            "Receive Questionnaire Response", "Assess Claim", "Reject Claim",
            "Send Notification by Post", "Archive Claim"]
    assert accepts_trace(base, "baseline")
    assert not accepts_trace(base, "drift2")
    assert not accepts_trace(base[:-1], "baseline")


def test_baseline_routing(logs):
    cfg = ClaimProcessConfig()
    for case in logs["baseline"].log.cases:
        acts = case.activities
        if case.static_attrs["claim_value"] < cfg.threshold:
            assert "Basic Check" in acts and "Complex Check" not in acts
        else:
            assert "Complex Check" in acts and "Contact Hospital" in acts


def test_drift1_routes_on_age(logs):
    g = logs["drift1"]
    post = g.log.cases[g.drift_index:]
    for case in post:
        assert ("Complex Check" in case.activities) == (case.static_attrs["age"] >= 50)
    assert any(c.static_attrs["age"] >= 60 and c.static_attrs["claim_value"] < ClaimProcessConfig().threshold
               and "Complex Check" in c.activities for c in post)


def test_drift1_favours_status():
    cfg = ClaimProcessConfig()
    vip = {"status": "VIP", "previous_cases": 3, "age": 40, "claim_value": 10.0}
    regular = {**vip, "status": "Regular"}
    assert acceptance_probability(vip, cfg, "drift1") > acceptance_probability(regular, cfg, "drift1")
    fresh = {**regular, "previous_cases": 0}
    assert acceptance_probability(fresh, cfg, "baseline") > acceptance_probability(regular, cfg, "baseline")


def test_drift2_drops_hospital_and_ages(logs):
    g = logs["drift2"]
    pre, post = g.log.cases[:g.drift_index], g.log.cases[g.drift_index:]
    assert all("Contact Hospital" not in c.activities for c in post)
    assert any("Complex Check" in c.activities for c in post)
    age = lambda cs: np.mean([c.static_attrs["age"] for c in cs])  # noqa: E731
    assert age(post) > age(pre)
    cx = lambda cs: np.mean(["Complex Check" in c.activities for c in cs])  # noqa: E731
    assert cx(post) > cx(pre)


def test_prefix_shared_across_variants(logs):
    n = logs["drift1"].drift_index
    assert logs["drift1"].log.cases[:n] == logs["baseline"].log.cases[:n] == logs["drift2"].log.cases[:n]


def test_determinism():
    cfg = ClaimProcessConfig(n_cases_baseline=20, n_cases_drift=20, seed=9)
    assert write_csv(generate_drift1(cfg).log) == write_csv(generate_drift1(cfg).log)
    assert write_csv(generate_baseline(cfg).log) != write_csv(
        generate_baseline(ClaimProcessConfig(20, 20, seed=10)).log)


def test_events_per_case_near_eleven():
    g = generate_drift1(ClaimProcessConfig(n_cases_baseline=4000, n_cases_drift=4000, seed=0))
    per_case = g.log.n_events / len(g.log.cases)
    assert abs(per_case - 88_000 / 8_000) <= 0.1 * 11


@pytest.mark.parametrize("variant", drift_gen.VARIANTS)
def test_outcome_rates_inside_bounds(logs, variant):
    for phi in (PHI41, PHI51):
        labels = label_log(logs[variant].log, phi)
        rate = sum(labels.values()) / len(labels)
        assert 0.05 < rate < 0.95


def test_timestamps_increase_across_cases(logs):
    firsts = [c.events[0].timestamp for c in logs["drift1"].log.cases]
    assert firsts == sorted(firsts)


def test_drift2_generator_function():
    cfg = ClaimProcessConfig(n_cases_baseline=5, n_cases_drift=5)
    assert generate_drift2(cfg).variant == "drift2"
