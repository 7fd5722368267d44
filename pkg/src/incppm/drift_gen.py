"""Synthetic insurance-claim logs with abrupt concept drift.

Process (baseline)::

    Register Claim -> Check Policy -> [Request Additional Documents]
      -> Basic Check | Complex Check (+ Contact Hospital)
      -> Assess Claim -> Accept Claim (+ Prepare Payment, Pay Claim) | Reject Claim
      -> Send Notification by Phone and/or by Post -> Archive Claim
    in parallel after registration:
      Send Questionnaire -> Receive Questionnaire Response | Questionnaire Deadline Expired

Baseline routing: complex check iff claim value >= threshold; acceptance
favours claimants with no previous cases.
Drift 1: complex check iff age >= 50; acceptance favours VIP/Gold status.
Drift 2: hospitals are no longer contacted; claimants are older and claims
larger, so complex checks become more frequent.

All branching probabilities and distributions below are choices of this
generator, not measured values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .event_log import Case, Event, EventLog

ACTIVITIES = (
    "Register Claim",
    "Check Policy",
    "Request Additional Documents",
    "Basic Check",
    "Complex Check",
    "Contact Hospital",
    "Assess Claim",
    "Accept Claim",
    "Reject Claim",
    "Prepare Payment",
    "Pay Claim",
    "Send Notification by Phone",
    "Send Notification by Post",
    "Send Questionnaire",
    "Receive Questionnaire Response",
    "Questionnaire Deadline Expired",
    "Archive Claim",
)
STATUSES = ("VIP", "Gold", "Silver", "Regular")
VARIANTS = ("baseline", "drift1", "drift2")

RESOURCES = {
    "Register Claim": ("clerk_1", "clerk_2", "clerk_3"),
    "Check Policy": ("clerk_1", "clerk_2", "clerk_3"),
    "Request Additional Documents": ("clerk_1", "clerk_2"),
    "Basic Check": ("assessor_1", "assessor_2"),
    "Complex Check": ("expert_1", "expert_2"),
    "Contact Hospital": ("expert_1", "expert_2"),
    "Assess Claim": ("manager_1", "manager_2"),
    "Accept Claim": ("manager_1", "manager_2"),
    "Reject Claim": ("manager_1", "manager_2"),
    "Prepare Payment": ("finance_1",),
    "Pay Claim": ("finance_1", "finance_2"),
    "Send Notification by Phone": ("call_center",),
    "Send Notification by Post": ("mail_room",),
    "Send Questionnaire": ("mail_room",),
    "Receive Questionnaire Response": ("mail_room",),
    "Questionnaire Deadline Expired": ("system",),
    "Archive Claim": ("system",),
}

HOUR = 3_600_000
DAY = 24 * HOUR
EPOCH_START = 1_577_836_800_000  # 2020-01-01T00:00:00Z


@dataclass
class ClaimProcessConfig:
    n_cases_baseline: int = 1000
    n_cases_drift: int = 1000
    seed: int = 0
    # population (baseline); drift 2 uses the *_drift2 parameters
    age_mean: float = 45.0
    age_sd: float = 14.0
    age_mean_drift2: float = 60.0
    claim_log_mean: float = math.log(1000.0)
    claim_log_sd: float = 0.8
    claim_log_mean_drift2: float = math.log(1800.0)
    status_probs: tuple[float, float, float, float] = (0.15, 0.25, 0.30, 0.30)
    previous_cases_rate: float = 0.8
    # routing and decisions
    claim_threshold: float | None = None  # None: median of the baseline claim distribution
    age_threshold: int = 50
    accept_favored: float = 0.8
    accept_unfavored: float = 0.4
    docs_prob: float = 0.3
    questionnaire_response: float = 0.7
    both_notifications_high: float = 0.7
    both_notifications_low: float = 0.15
    phone_prob: float = 0.5
    mean_interarrival_hours: float = 2.0

    def __post_init__(self):
        if self.n_cases_baseline < 1 or self.n_cases_drift < 1:
            raise ValueError("case counts must be positive")
        probs = [self.accept_favored, self.accept_unfavored, self.docs_prob,
                 self.questionnaire_response, self.both_notifications_high,
                 self.both_notifications_low, self.phone_prob, *self.status_probs]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if not math.isclose(sum(self.status_probs), 1.0):
            raise ValueError("status probabilities must sum to 1")

    @property
    def threshold(self) -> float:
        # the lognormal median is exp(mu)
        return self.claim_threshold if self.claim_threshold is not None else math.exp(self.claim_log_mean)


@dataclass(frozen=True)
class GeneratedLog:
    log: EventLog
    drift_index: int
    variant: str


def _case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _population(rng, cfg: ClaimProcessConfig, variant: str) -> dict:
    drift2 = variant == "drift2"
    age = int(np.clip(round(rng.normal(cfg.age_mean_drift2 if drift2 else cfg.age_mean, cfg.age_sd)), 18, 95))
    mu = cfg.claim_log_mean_drift2 if drift2 else cfg.claim_log_mean
    value = round(float(rng.lognormal(mu, cfg.claim_log_sd)), 2)
    status = STATUSES[int(rng.choice(len(STATUSES), p=cfg.status_probs))]
    previous = int(rng.poisson(cfg.previous_cases_rate))
    return {"age": age, "claim_value": value, "status": status, "previous_cases": previous}


def is_complex(attrs: dict, cfg: ClaimProcessConfig, variant: str) -> bool:
    if variant == "drift1":
        return attrs["age"] >= cfg.age_threshold
    return attrs["claim_value"] >= cfg.threshold


def is_favored(attrs: dict, variant: str) -> bool:
    if variant == "drift1":
        return attrs["status"] in ("VIP", "Gold")
    return attrs["previous_cases"] == 0


def acceptance_probability(attrs: dict, cfg: ClaimProcessConfig, variant: str) -> float:
    return cfg.accept_favored if is_favored(attrs, variant) else cfg.accept_unfavored


def _simulate(index: int, cfg: ClaimProcessConfig, variant: str, start: int) -> Case:
    rng = _case_rng(cfg.seed, index)
    attrs = _population(rng, cfg, variant)

    def step(t, mean_hours):
        return t + max(1, int(rng.exponential(mean_hours) * HOUR))

    main: list[tuple[int, str]] = [(start, "Register Claim")]
    t = step(start, 1)
    main.append((t, "Check Policy"))
    if rng.random() < cfg.docs_prob:
        t = step(t, 12)
        main.append((t, "Request Additional Documents"))
    if is_complex(attrs, cfg, variant):
        t = step(t, 8)
        main.append((t, "Complex Check"))
        if variant != "drift2":
            t = step(t, 24)
            main.append((t, "Contact Hospital"))
    else:
        t = step(t, 4)
        main.append((t, "Basic Check"))
    t = step(t, 6)
    main.append((t, "Assess Claim"))
    accepted = rng.random() < acceptance_probability(attrs, cfg, variant)
    t = step(t, 2)
    main.append((t, "Accept Claim" if accepted else "Reject Claim"))
    if accepted:
        t = step(t, 8)
        main.append((t, "Prepare Payment"))
        t = step(t, 24)
        main.append((t, "Pay Claim"))
    high = attrs["claim_value"] >= 2 * cfg.threshold
    both = rng.random() < (cfg.both_notifications_high if high else cfg.both_notifications_low)
    if both:
        channels = ["Send Notification by Phone", "Send Notification by Post"]
    else:
        channels = ["Send Notification by Phone" if rng.random() < cfg.phone_prob
                    else "Send Notification by Post"]
    for ch in channels:
        t = step(t, 3)
        main.append((t, ch))

    side: list[tuple[int, str]] = []
    q = step(start, 2)
    side.append((q, "Send Questionnaire"))
    deadline = q + 7 * DAY
    answer = q + max(1, int(rng.exponential(3 * DAY)))
    if rng.random() < cfg.questionnaire_response and answer < deadline:
        side.append((answer, "Receive Questionnaire Response"))
    else:
        side.append((deadline, "Questionnaire Deadline Expired"))

    end = max(main[-1][0], side[-1][0])
    trace = sorted(main + side, key=lambda e: e[0])  # stable: main before side on ties
    trace.append((end + max(1, int(rng.exponential(4) * HOUR)), "Archive Claim"))
    events = tuple(Event(a, ts, {"resource": str(rng.choice(RESOURCES[a]))}) for ts, a in trace)
    return Case(f"case_{index:06d}", events, attrs)


_STATIC_SCHEMA = {"age": "int", "claim_value": "float", "status": "string", "previous_cases": "int"}
_DYNAMIC_SCHEMA = {"resource": "string"}


def _generate(cfg: ClaimProcessConfig, variant: str) -> GeneratedLog:
    n = cfg.n_cases_baseline + cfg.n_cases_drift
    drift_index = n if variant == "baseline" else cfg.n_cases_baseline
    arrivals = np.random.default_rng([cfg.seed, 2**31 - 1]).exponential(
        cfg.mean_interarrival_hours * HOUR, size=n)
    starts = EPOCH_START + np.cumsum(np.maximum(1, arrivals.astype(np.int64)))
    cases = [_simulate(i, cfg, variant if i >= drift_index else "baseline", int(starts[i]))
             for i in range(n)]
    return GeneratedLog(EventLog(tuple(cases), _STATIC_SCHEMA, _DYNAMIC_SCHEMA), drift_index, variant)


def generate_baseline(cfg: ClaimProcessConfig) -> GeneratedLog:
    """Baseline behaviour for all ``n_cases_baseline + n_cases_drift`` cases."""
    return _generate(cfg, "baseline")


def generate_drift1(cfg: ClaimProcessConfig) -> GeneratedLog:
    return _generate(cfg, "drift1")


def generate_drift2(cfg: ClaimProcessConfig) -> GeneratedLog:
    return _generate(cfg, "drift2")


def generate(variant: str, cfg: ClaimProcessConfig) -> GeneratedLog:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    return _generate(cfg, variant)


def accepts_trace(activities: list[str], variant: str) -> bool:
    """Whether ``activities`` is a complete run of the given process variant."""
    acts = list(activities)
    if not acts or acts[0] != "Register Claim" or acts[-1] != "Archive Claim":
        return False
    body = acts[1:-1]
    side = [a for a in body if a in ("Send Questionnaire", "Receive Questionnaire Response",
                                     "Questionnaire Deadline Expired")]
    if len(side) != 2 or side[0] != "Send Questionnaire":
        return False
    main = [a for a in body if a not in side]
    i = 0

    def take(name):
        nonlocal i
        if i < len(main) and main[i] == name:
            i += 1
            return True
        return False

    if not take("Check Policy"):
        return False
    take("Request Additional Documents")
    if take("Complex Check"):
        hospital = take("Contact Hospital")
        if variant == "drift2" and hospital:
            return False
        if variant != "drift2" and not hospital:
            return False
    elif not take("Basic Check"):
        return False
    if not take("Assess Claim"):
        return False
    if take("Accept Claim"):
        if not (take("Prepare Payment") and take("Pay Claim")):
            return False
    elif not take("Reject Claim"):
        return False
    phone = take("Send Notification by Phone")
    post = take("Send Notification by Post")
    return (phone or post) and i == len(main)
