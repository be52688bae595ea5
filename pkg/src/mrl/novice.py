"""Simulated learners with latent reinforcer preferences, and session running.

A simulated novice makes mistakes at a hazard rate that shrinks as skill grows,
and rectifies a mistake with probability ``base_rectify + boost * preference *
n``, so a reinforcer the novice actually likes is measurably more effective.
Sessions follow a phase schedule: reinforced phases coach on every mistake,
unreinforced (transfer) phases only count them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .engine import (
    ConfigurationError,
    EngineConfig,
    InteractionRecord,
    Outcome,
    new_engine,
    preferred_reinforcer,
    record_outcome,
    select_reinforcer,
)

PHASE_LABELS = frozenset(
    {"GuidedResponseI", "GuidedResponseII", "Mechanism", "Adaptation", "GuidedResponse"}
)

# Reinforcement for one mistake is retried at most this many times; each retry
# counts as one interaction.
RETRY_CAP = 25


class Group(str, Enum):
    NONE = "none"
    RANDOM = "random"
    LEARNED = "learned"


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels. Insertion of new subjects or
    groups never shifts the seeds of existing ones."""
    data = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


@dataclass
class NoviceProfile:
    """Latent description of one simulated learner.

    ``preference`` is a probability simplex over reinforcers. A mistake occurs
    each step with probability ``mistake_hazard * (1 - skill)``; a rectified
    mistake raises ``skill`` by ``learn_rate`` (capped at 1).
    """

    preference: np.ndarray
    base_rectify: float = 0.2
    boost: float = 0.1
    skill: float = 0.0
    learn_rate: float = 0.02
    mistake_hazard: float = 0.5

    def __post_init__(self):
        self.preference = np.asarray(self.preference, dtype=float)
        if self.preference.ndim != 1 or self.preference.size < 2:
            raise ConfigurationError("preference must be a vector over >= 2 reinforcers")
        if np.any(self.preference < 0) or abs(float(self.preference.sum()) - 1.0) > 1e-9:
            raise ConfigurationError("preference must be a probability simplex")
        for name in ("base_rectify", "boost", "skill", "learn_rate", "mistake_hazard"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigurationError(f"{name} must be in [0, 1], got {v}")

    @property
    def n(self) -> int:
        return self.preference.size

    @property
    def true_preference(self) -> int:
        return int(np.argmax(self.preference))

    def to_dict(self) -> dict:
        return {
            "preference": [float(x) for x in self.preference],
            "base_rectify": self.base_rectify,
            "boost": self.boost,
            "skill": self.skill,
            "learn_rate": self.learn_rate,
            "mistake_hazard": self.mistake_hazard,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoviceProfile":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass(frozen=True)
class Phase:
    label: str
    steps: int
    reinforced: bool


@dataclass(frozen=True)
class PhaseSchedule:
    phases: tuple[Phase, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        seen_reinforced = False
        for p in self.phases:
            if p.label not in PHASE_LABELS:
                raise ConfigurationError(
                    f"unknown phase label {p.label!r}; allowed: {sorted(PHASE_LABELS)}"
                )
            if p.steps < 0:
                raise ConfigurationError(f"phase {p.label!r} has negative step count")
            if p.reinforced:
                seen_reinforced = True
            elif p.steps > 0 and not seen_reinforced:
                raise ConfigurationError(
                    "an unreinforced phase must be preceded by a reinforced phase"
                )

    @property
    def total_steps(self) -> int:
        return sum(p.steps for p in self.phases)

    def to_dict(self) -> dict:
        return {
            "phases": [
                {"label": p.label, "steps": p.steps, "reinforced": p.reinforced}
                for p in self.phases
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseSchedule":
        return cls(tuple(Phase(p["label"], p["steps"], p["reinforced"]) for p in d["phases"]))


def guided_transfer_schedule(reinforced_steps: int = 60, transfer_steps: int = 40) -> PhaseSchedule:
    """Two-phase schedule: one coached phase, then one transfer phase."""
    return PhaseSchedule(
        (
            Phase("GuidedResponse", reinforced_steps, True),
            Phase("Adaptation", transfer_steps, False),
        )
    )


def four_phase_schedule(
    guided1: int = 30, guided2: int = 30, mechanism: int = 20, adaptation: int = 20
) -> PhaseSchedule:
    """Four-phase schedule: two coached phases, then two transfer phases."""
    return PhaseSchedule(
        (
            Phase("GuidedResponseI", guided1, True),
            Phase("GuidedResponseII", guided2, True),
            Phase("Mechanism", mechanism, False),
            Phase("Adaptation", adaptation, False),
        )
    )


@dataclass(frozen=True)
class SessionLogSummary:
    mistakes_per_phase: dict
    records: tuple[InteractionRecord, ...]
    identified_preference: int | None
    true_preference: int | None

    @property
    def total_mistakes(self) -> int:
        return int(sum(self.mistakes_per_phase.values()))

    @property
    def total_regret(self) -> float:
        return float(sum(r.regret for r in self.records))

    def mistakes_in(self, labels) -> int:
        return int(sum(self.mistakes_per_phase.get(lbl, 0) for lbl in labels))

    def to_dict(self) -> dict:
        return {
            "mistakes_per_phase": dict(self.mistakes_per_phase),
            "records": [r.to_dict() for r in self.records],
            "identified_preference": self.identified_preference,
            "true_preference": self.true_preference,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionLogSummary":
        return cls(
            mistakes_per_phase=dict(d["mistakes_per_phase"]),
            records=tuple(InteractionRecord.from_dict(r) for r in d["records"]),
            identified_preference=d["identified_preference"],
            true_preference=d["true_preference"],
        )


def step_novice(profile: NoviceProfile, rng: np.random.Generator) -> bool:
    """One task step: True if the novice makes a mistake."""
    return bool(rng.random() < profile.mistake_hazard * (1.0 - profile.skill))


def _attempt_rectify(profile: NoviceProfile, probability: float, rng: np.random.Generator) -> bool:
    rectified = bool(rng.random() < probability)
    if rectified:
        profile.skill = min(1.0, profile.skill + profile.learn_rate)
    return rectified


def respond_to_reinforcer(
    profile: NoviceProfile, reinforcer: int, rng: np.random.Generator
) -> bool:
    """Rectification attempt after one dispatched reinforcer.

    Probability is base_rectify + boost * preference[reinforcer] * n, clamped to
    [0, 1]; the factor n makes a uniform-preference novice land at base + boost.
    Rectifying raises skill by learn_rate.
    """
    if not 0 <= reinforcer < profile.n:
        raise IndexError(f"reinforcer {reinforcer} out of range for n={profile.n}")
    p = profile.base_rectify + profile.boost * float(profile.preference[reinforcer]) * profile.n
    return _attempt_rectify(profile, min(max(p, 0.0), 1.0), rng)


def run_session(
    profile: NoviceProfile,
    schedule: PhaseSchedule,
    group: Group,
    config: EngineConfig,
    event_sink=None,
    session_id: str | None = None,
    catalog_name: str | None = None,
) -> SessionLogSummary:
    """Run one full session of the given group and return its summary.

    Reinforced phases handle each mistake according to the group: the none
    group gets a single unaided retry at base_rectify, the random group gets a
    single uniformly drawn reinforcer, and the learned group is coached through
    select/record interactions until the mistake is rectified (capped at
    RETRY_CAP dispatches). Unreinforced phases only count mistakes.

    The caller's profile is not mutated. Deterministic for a fixed config.seed.
    """
    if schedule.total_steps == 0:
        raise ConfigurationError("schedule has zero steps")
    group = Group(group)
    profile = replace(profile, preference=profile.preference.copy())

    novice_rng = np.random.default_rng(derive_seed(config.seed, "novice"))
    dispatch_rng = np.random.default_rng(derive_seed(config.seed, "dispatch"))
    engine = new_engine(config) if group is Group.LEARNED else None

    sink = _SinkAdapter(event_sink, session_id or f"sim-{config.seed:016x}")
    sink.session_started(config, group, catalog_name)

    mistakes_per_phase: dict[str, int] = {}
    records: list[InteractionRecord] = []

    for phase in schedule.phases:
        mistakes_per_phase.setdefault(phase.label, 0)
        for step in range(phase.steps):
            if not step_novice(profile, novice_rng):
                continue
            mistakes_per_phase[phase.label] += 1
            tag = f"{phase.label}:{step}"
            sink.mistake_observed(tag)
            if not phase.reinforced:
                continue
            if group is Group.NONE:
                _attempt_rectify(profile, profile.base_rectify, novice_rng)
            elif group is Group.RANDOM:
                rid = int(dispatch_rng.integers(config.n))
                sink.reinforcer_dispatched(rid)
                respond_to_reinforcer(profile, rid, novice_rng)
            else:
                for _ in range(RETRY_CAP):
                    rid = select_reinforcer(engine)
                    sink.reinforcer_dispatched(rid)
                    rectified = respond_to_reinforcer(profile, rid, novice_rng)
                    rec = record_outcome(engine, Outcome(rid, rectified), state_tag=tag)
                    records.append(rec)
                    sink.outcome_recorded(rec)
                    if rectified:
                        break

    summary = SessionLogSummary(
        mistakes_per_phase=mistakes_per_phase,
        records=tuple(records),
        identified_preference=preferred_reinforcer(engine) if engine is not None else None,
        true_preference=profile.true_preference,
    )
    sink.session_ended(summary)
    return summary


class _SinkAdapter:
    """No-op unless an event sink is attached; keeps run_session free of log code."""

    def __init__(self, sink, session_id: str):
        self.sink = sink
        self.session_id = session_id

    def _emit(self, payload: dict):
        if self.sink is None:
            return
        from . import store

        store.append_event(self.sink, store.make_envelope(self.session_id, payload))

    def session_started(self, config, group, catalog_name):
        self._emit(
            {
                "type": "SessionStarted",
                "config": config.to_dict(),
                "catalog": catalog_name,
                "group": group.value,
            }
        )

    def mistake_observed(self, state_tag):
        self._emit({"type": "MistakeObserved", "state_tag": state_tag})

    def reinforcer_dispatched(self, reinforcer_id):
        self._emit({"type": "ReinforcerDispatched", "id": reinforcer_id})

    def outcome_recorded(self, record):
        self._emit({"type": "OutcomeRecorded", "record": record.to_dict()})

    def session_ended(self, summary):
        self._emit({"type": "SessionEnded", "summary": summary.to_dict()})


def sharp_preference(n: int, arm: int, peak: float = 0.9) -> np.ndarray:
    """Preference simplex with most of the mass on one reinforcer."""
    pref = np.full(n, (1.0 - peak) / (n - 1))
    pref[arm] = peak
    return pref


def profile_sampler(
    n: int,
    *,
    concentration: float = 0.5,
    base_rectify: float = 0.2,
    boost_times_n: float = 0.6,
    skill: float = 0.0,
    learn_rate: float = 0.02,
    hazard_range: tuple[float, float] = (0.3, 0.8),
):
    """Sampler over heterogeneous novices: Dirichlet preferences (small
    concentration gives sharp individual tastes) and a per-subject hazard."""

    def sample(rng: np.random.Generator) -> NoviceProfile:
        return NoviceProfile(
            preference=rng.dirichlet(np.full(n, concentration)),
            base_rectify=base_rectify,
            boost=boost_times_n / n,
            skill=skill,
            learn_rate=learn_rate,
            mistake_hazard=float(rng.uniform(*hazard_range)),
        )

    return sample
