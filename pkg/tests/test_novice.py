import json

import numpy as np
import pytest

import mrl.novice
from mrl import (
    ConfigurationError,
    EngineConfig,
    Group,
    NoviceProfile,
    Phase,
    PhaseSchedule,
    derive_seed,
    guided_transfer_schedule,
    respond_to_reinforcer,
    run_session,
    step_novice,
)


def make_profile(**kw):
    defaults = dict(
        preference=np.array([0.25] * 4),
        base_rectify=0.3,
        boost=0.1,
        skill=0.5,
        learn_rate=0.02,
        mistake_hazard=0.4,
    )
    defaults.update(kw)
    return NoviceProfile(**defaults)


def make_config(seed=0, n=4):
    return EngineConfig(n=n, alpha=0.015, window_k=3, seed=seed)


class TestProfile:
    def test_preference_must_be_simplex(self):
        with pytest.raises(ConfigurationError):
            NoviceProfile(preference=np.array([0.5, 0.6]))

    def test_probability_fields_bounded(self):
        with pytest.raises(ConfigurationError):
            make_profile(base_rectify=1.5)

    def test_roundtrip(self):
        p = make_profile()
        assert NoviceProfile.from_dict(p.to_dict()).to_dict() == p.to_dict()


class TestSchedule:
    def test_unknown_label_rejected(self):
        with pytest.raises(ConfigurationError):
            PhaseSchedule((Phase("Origination", 10, True),))

    def test_unreinforced_first_rejected(self):
        with pytest.raises(ConfigurationError):
            PhaseSchedule((Phase("Adaptation", 10, False), Phase("GuidedResponse", 10, True)))

    def test_reinforced_only_is_fine(self):
        PhaseSchedule((Phase("GuidedResponse", 10, True),))


class TestStepNovice:
    def test_perfect_skill_never_mistakes(self):
        rng = np.random.default_rng(0)
        profile = make_profile(skill=1.0, mistake_hazard=1.0)
        assert not any(step_novice(profile, rng) for _ in range(1000))

    def test_unit_hazard_always_mistakes(self):
        rng = np.random.default_rng(0)
        profile = make_profile(skill=0.0, mistake_hazard=1.0)
        assert all(step_novice(profile, rng) for _ in range(1000))

    def test_hazard_frequency(self):
        # skill 0.5 and hazard 0.4 give mistakes at rate 0.20 +/- 0.01.
        rng = np.random.default_rng(42)
        profile = make_profile(skill=0.5, mistake_hazard=0.4)
        hits = sum(step_novice(profile, rng) for _ in range(100_000))
        assert abs(hits / 100_000 - 0.20) < 0.01


class TestRespond:
    def test_preference_blind_when_boost_zero(self):
        rng = np.random.default_rng(1)
        profile = make_profile(boost=0.0, base_rectify=0.3, learn_rate=0.0)
        hits = sum(respond_to_reinforcer(profile, 2, rng) for _ in range(100_000))
        assert abs(hits / 100_000 - 0.3) < 0.01

    def test_saturated_match_always_rectifies(self):
        rng = np.random.default_rng(2)
        profile = make_profile(
            preference=np.array([0.0, 0.0, 1.0, 0.0]),
            base_rectify=0.0,
            boost=0.25,
            learn_rate=0.0,
        )
        assert all(respond_to_reinforcer(profile, 2, rng) for _ in range(1000))

    def test_linear_boost_frequency(self):
        # p = 0.3 + 0.1 * 0.7 * 4 = 0.58
        rng = np.random.default_rng(3)
        pref = np.array([0.7, 0.1, 0.1, 0.1])
        profile = make_profile(preference=pref, base_rectify=0.3, boost=0.1, learn_rate=0.0)
        hits = sum(respond_to_reinforcer(profile, 0, rng) for _ in range(100_000))
        assert abs(hits / 100_000 - 0.58) < 0.01

    def test_rectifying_raises_skill(self):
        rng = np.random.default_rng(4)
        profile = make_profile(base_rectify=1.0, skill=0.0, learn_rate=0.25)
        for _ in range(10):
            respond_to_reinforcer(profile, 0, rng)
        assert profile.skill == 1.0


class TestRunSession:
    def test_zero_step_schedule_rejected(self):
        schedule = PhaseSchedule((Phase("GuidedResponse", 0, True),))
        with pytest.raises(ConfigurationError):
            run_session(make_profile(), schedule, Group.LEARNED, make_config())

    def test_perfect_novice_no_mistakes_uniform_weights(self):
        profile = make_profile(skill=1.0)
        s = run_session(profile, guided_transfer_schedule(30, 20), Group.LEARNED, make_config())
        assert s.total_mistakes == 0
        assert s.records == ()
        assert s.identified_preference == 0  # uniform weights tie-break

    def test_point_mass_preference_identified(self):
        # Only the preferred reinforcer can ever rectify, so every success the
        # engine sees points at it.
        profile = make_profile(
            preference=np.array([0.0, 0.0, 1.0, 0.0]),
            base_rectify=0.0,
            boost=0.25,
            skill=0.0,
            learn_rate=0.01,
            mistake_hazard=0.9,
        )
        schedule = PhaseSchedule((Phase("GuidedResponse", 50, True),))
        s = run_session(profile, schedule, Group.LEARNED, make_config(seed=5))
        assert s.identified_preference == 2
        assert s.true_preference == 2

    def test_byte_identical_reruns(self):
        profile = make_profile()
        schedule = guided_transfer_schedule(25, 15)
        a = run_session(profile, schedule, Group.LEARNED, make_config(seed=9))
        b = run_session(profile, schedule, Group.LEARNED, make_config(seed=9))
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_caller_profile_not_mutated(self):
        profile = make_profile(skill=0.1)
        run_session(profile, guided_transfer_schedule(30, 10), Group.LEARNED, make_config())
        assert profile.skill == 0.1

    def test_none_group_never_builds_an_engine(self, monkeypatch):
        def boom(config):
            raise AssertionError("engine constructed for a none-group session")

        monkeypatch.setattr(mrl.novice, "new_engine", boom)
        profile = make_profile(mistake_hazard=0.8, skill=0.0)
        s = run_session(profile, guided_transfer_schedule(20, 10), Group.NONE, make_config())
        assert s.records == ()
        assert s.identified_preference is None

    def test_random_group_never_records_outcomes(self, monkeypatch):
        def boom(*a, **kw):
            raise AssertionError("record_outcome called for a random-group session")

        monkeypatch.setattr(mrl.novice, "record_outcome", boom)
        profile = make_profile(mistake_hazard=0.8, skill=0.0)
        s = run_session(profile, guided_transfer_schedule(20, 10), Group.RANDOM, make_config())
        assert s.records == ()

    def test_learned_interaction_count_equals_dispatches(self):
        profile = make_profile(mistake_hazard=0.8, skill=0.0, base_rectify=0.3)
        sink = _CountingSink()
        s = run_session(
            profile,
            guided_transfer_schedule(30, 10),
            Group.LEARNED,
            make_config(seed=3),
            event_sink=sink,
        )
        assert len(s.records) == sink.counts.get("ReinforcerDispatched", 0)

    def test_unreinforced_phase_only_counts(self):
        profile = make_profile(mistake_hazard=0.8, skill=0.0)
        schedule = guided_transfer_schedule(1, 50)
        s = run_session(profile, schedule, Group.LEARNED, make_config(seed=2))
        # Nearly all mistakes fall in the unreinforced phase; none of those
        # produce interactions.
        reinforced_records = [r for r in s.records if r.state_tag.startswith("GuidedResponse")]
        assert len(reinforced_records) == len(s.records)


class _CountingSink:
    def __init__(self):
        self.counts = {}

    def append(self, envelope):
        kind = envelope.payload["type"]
        self.counts[kind] = self.counts.get(kind, 0) + 1
        return sum(self.counts.values()) - 1


class TestSeedIsolation:
    def test_subject_trajectories_independent_of_roster(self):
        # Same derived seed regardless of how many other subjects exist.
        s1 = derive_seed(7, "learned", 3)
        s2 = derive_seed(7, "learned", 3)
        assert s1 == s2
        assert derive_seed(7, "learned", 4) != s1
        assert derive_seed(7, "random", 3) != s1


class TestBlindNoviceEquilibrium:
    def test_no_spurious_preference_with_zero_boost(self):
        # Preference-blind novices: averaged over many seeds the final weight
        # vector stays uniform, so the engine invents no preference.
        schedule = PhaseSchedule((Phase("GuidedResponse", 40, True),))
        finals = []
        for seed in range(120):
            profile = make_profile(
                boost=0.0, base_rectify=0.35, skill=0.0, learn_rate=0.0, mistake_hazard=0.7
            )
            s = run_session(profile, schedule, Group.LEARNED, make_config(seed=seed))
            if s.records:
                finals.append(s.records[-1].weights_after)
        mean = np.mean(finals, axis=0)
        assert np.max(np.abs(mean - 0.25)) < 0.02
