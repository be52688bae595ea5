"""Three-group experiment harness: no reinforcement vs random vs learned."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .engine import EngineConfig
from .novice import Group, PhaseSchedule, SessionLogSummary, derive_seed, run_session
from .stats import DegenerateDataError, pearson, welch_t_test

DEFAULT_GROUPS = (Group.NONE, Group.RANDOM, Group.LEARNED)


@dataclass(frozen=True)
class ExperimentStats:
    """Aggregate results of one group experiment.

    Mistake means and sample standard deviations are reported per phase and for
    the before/after transfer split (before = reinforced phases, after =
    unreinforced). Pairwise Welch tests compare post-transfer mistake counts.
    """

    groups: tuple[str, ...]
    phase_labels: tuple[str, ...]
    per_phase: dict
    before_after: dict
    pairwise_after: dict
    regret_mistake_r: float | None
    preference_accuracy: float | None
    before_counts: dict
    after_counts: dict

    def report(self) -> str:
        """Plain-text table: phases as rows, per-group mean and SD as columns."""
        lines = []
        header = ["Phase".ljust(18)]
        for g in self.groups:
            header.append(f"{g:>9}.M {g:>7}.SD")
        lines.append(" ".join(header))
        for phase in self.phase_labels:
            row = [phase.ljust(18)]
            for g in self.groups:
                mean, sd = self.per_phase[phase][g]
                row.append(f"{mean:11.2f} {sd:10.2f}")
            lines.append(" ".join(row))
        lines.append("")
        for split in ("before", "after"):
            row = [f"{split} transfer".ljust(18)]
            for g in self.groups:
                mean, sd = self.before_after[g][split]
                row.append(f"{mean:11.2f} {sd:10.2f}")
            lines.append(" ".join(row))
        lines.append("")
        lines.append("Pairwise Welch t-tests on post-transfer mistakes:")
        for (g1, g2), (t, p) in self.pairwise_after.items():
            lines.append(f"  {g1} vs {g2}: t = {t:+.4f}, p = {p:.4g}")
        if self.regret_mistake_r is not None:
            lines.append(f"Regret-mistake correlation (learned group): r = {self.regret_mistake_r:.4f}")
        if self.preference_accuracy is not None:
            lines.append(f"Preference identification accuracy: {self.preference_accuracy:.2f}")
        return "\n".join(lines) + "\n"


def split_mistakes(summary: SessionLogSummary, schedule: PhaseSchedule) -> tuple[int, int]:
    """Mistakes before transfer (reinforced phases) and after (unreinforced)."""
    before = [p.label for p in schedule.phases if p.reinforced]
    after = [p.label for p in schedule.phases if not p.reinforced]
    return summary.mistakes_in(before), summary.mistakes_in(after)


def run_group_experiment(
    n_subjects: int,
    profile_sampler,
    schedule: PhaseSchedule,
    config: EngineConfig,
    groups=DEFAULT_GROUPS,
    session_sink_factory=None,
) -> ExperimentStats:
    """Run ``n_subjects`` independent sessions per group and aggregate.

    Every subject gets a seed derived from (config.seed, group, index), so
    adding or dropping subjects never perturbs the others. The profile sampler
    is called with a per-subject generator; subjects across groups with the
    same index share a profile, which keeps the comparison paired.
    """
    if n_subjects < 2:
        raise ValueError(f"need at least 2 subjects per group, got {n_subjects}")
    groups = tuple(Group(g) for g in groups)

    summaries: dict[Group, list[SessionLogSummary]] = {g: [] for g in groups}
    for group in groups:
        for j in range(n_subjects):
            subject_seed = derive_seed(config.seed, group.value, j)
            profile = profile_sampler(np.random.default_rng(derive_seed(config.seed, "profile", j)))
            cfg = replace(config, seed=subject_seed)
            sink = session_sink_factory(group, j) if session_sink_factory else None
            summaries[group].append(
                run_session(
                    profile,
                    schedule,
                    group,
                    cfg,
                    event_sink=sink,
                    session_id=f"{group.value}-{j:03d}",
                )
            )

    phase_labels = tuple(p.label for p in schedule.phases)
    per_phase = {
        phase: {
            g.value: _mean_sd([s.mistakes_per_phase.get(phase, 0) for s in summaries[g]])
            for g in groups
        }
        for phase in phase_labels
    }
    before_counts = {}
    after_counts = {}
    before_after = {}
    for g in groups:
        pairs = [split_mistakes(s, schedule) for s in summaries[g]]
        before_counts[g.value] = tuple(b for b, _ in pairs)
        after_counts[g.value] = tuple(a for _, a in pairs)
        before_after[g.value] = {
            "before": _mean_sd(before_counts[g.value]),
            "after": _mean_sd(after_counts[g.value]),
        }

    pairwise_after = {
        (g1.value, g2.value): welch_t_test(after_counts[g1.value], after_counts[g2.value])
        for g1, g2 in combinations(groups, 2)
    }

    regret_r = None
    accuracy = None
    if Group.LEARNED in groups:
        learned = summaries[Group.LEARNED]
        try:
            mistakes = [s.total_mistakes for s in learned]
            regrets = [s.total_regret for s in learned]
            regret_r = pearson(mistakes, regrets)
        except DegenerateDataError:
            regret_r = None
        identified = [s for s in learned if s.identified_preference is not None]
        if identified:
            accuracy = sum(
                1 for s in identified if s.identified_preference == s.true_preference
            ) / len(identified)

    return ExperimentStats(
        groups=tuple(g.value for g in groups),
        phase_labels=phase_labels,
        per_phase=per_phase,
        before_after=before_after,
        pairwise_after=pairwise_after,
        regret_mistake_r=regret_r,
        preference_accuracy=accuracy,
        before_counts=before_counts,
        after_counts=after_counts,
    )


def _mean_sd(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd
