// Two-phase training session: a coached phase where every detected mistake is
// reported and answered with a reinforcer message, then a free-play transfer
// phase where only score per minute is recorded. Exactly one outcome is posted
// per dispatched reinforcer: a reinforcer is resolved by the next placement
// (rectified = that placement was clean) or closed as unrectified at session
// end. When the service drops out, play continues and queued mistakes are
// flushed with their known outcomes on reconnect.

import { BoardState } from "./board.js";
import {
  CatalogEntry,
  ServiceUnreachableError,
  TrainerClient,
} from "./client.js";
import { defaultRules, detectMistake, MistakeKind, MistakeRule } from "./mistakes.js";

export interface SessionPhase {
  label: string;
  reinforced: boolean;
  durationMs: number;
}

export function defaultPhases(
  coachedMs = 15 * 60_000,
  transferMs = 5 * 60_000
): SessionPhase[] {
  return [
    { label: "GuidedResponse", reinforced: true, durationMs: coachedMs },
    { label: "Adaptation", reinforced: false, durationMs: transferMs },
  ];
}

export interface PlacementFeedback {
  phaseLabel: string;
  mistake: MistakeKind | null;
  outcomePosted: { reinforcerId: number; rectified: boolean } | null;
  dispatched: { reinforcerId: number; message: string } | null;
  offline: boolean;
}

export interface PhaseStats {
  label: string;
  reinforced: boolean;
  score: number;
  placements: number;
  mistakes: number;
  minutes: number;
  scorePerMinute: number;
}

export interface SessionSummary {
  phases: PhaseStats[];
  preferredReinforcer: CatalogEntry | null;
  interactionCount: number;
  totalRegret: number;
  prompt: string;
}

type QueuedMistake = { stateTag: string; rectified: boolean | null };
type QueuedOutcome = { reinforcerId: number; rectified: boolean };

export class TrainingSession {
  private sessionId = "";
  private catalog: CatalogEntry[] = [];
  private pending: { reinforcerId: number } | null = null;
  private queuedMistakes: QueuedMistake[] = [];
  private queuedOutcomes: QueuedOutcome[] = [];
  private startedAt = 0;
  private stats: PhaseStats[] = [];
  private dispatchCount = 0;
  private outcomeCount = 0;
  offline = false;

  constructor(
    private client: TrainerClient,
    private group: string,
    private catalogName: string,
    private phases: SessionPhase[] = defaultPhases(),
    private rules: MistakeRule[] = defaultRules(),
    private clock: () => number = () => Date.now(),
    private seed?: number
  ) {
    if (phases.length === 0) throw new Error("session needs at least one phase");
  }

  get id(): string {
    return this.sessionId;
  }

  get catalogEntries(): CatalogEntry[] {
    return this.catalog;
  }

  get dispatched(): number {
    return this.dispatchCount;
  }

  get outcomesPosted(): number {
    return this.outcomeCount;
  }

  async start(): Promise<void> {
    const created = await this.client.createSession(this.group, this.catalogName, this.seed);
    this.sessionId = created.session_id;
    this.catalog = created.catalog;
    this.startedAt = this.clock();
    this.stats = this.phases.map((p) => ({
      label: p.label,
      reinforced: p.reinforced,
      score: 0,
      placements: 0,
      mistakes: 0,
      minutes: p.durationMs / 60_000,
      scorePerMinute: 0,
    }));
  }

  phaseIndexAt(now: number): number {
    let elapsed = now - this.startedAt;
    for (let i = 0; i < this.phases.length; i++) {
      if (elapsed < this.phases[i].durationMs) return i;
      elapsed -= this.phases[i].durationMs;
    }
    return this.phases.length; // past the end
  }

  currentPhase(): SessionPhase | null {
    const i = this.phaseIndexAt(this.clock());
    return i < this.phases.length ? this.phases[i] : null;
  }

  finished(): boolean {
    return this.currentPhase() === null;
  }

  /** Feed one committed placement through mistake detection and the service. */
  async onPlacement(before: BoardState, after: BoardState): Promise<PlacementFeedback> {
    const phaseIndex = Math.min(this.phaseIndexAt(this.clock()), this.phases.length - 1);
    const phase = this.phases[phaseIndex];
    const stat = this.stats[phaseIndex];
    const mistake = detectMistake(before, after, this.rules);

    stat.placements += 1;
    stat.score += after.score - before.score;
    if (mistake) stat.mistakes += 1;

    const feedback: PlacementFeedback = {
      phaseLabel: phase.label,
      mistake,
      outcomePosted: null,
      dispatched: null,
      offline: false,
    };

    const clean = mistake === null;

    // The previous reinforcer (live or queued) is judged by this placement.
    if (this.pending) {
      const { reinforcerId } = this.pending;
      this.pending = null;
      try {
        await this.client.reportOutcome(this.sessionId, reinforcerId, clean);
        this.outcomeCount += 1;
        feedback.outcomePosted = { reinforcerId, rectified: clean };
      } catch (err) {
        if (!(err instanceof ServiceUnreachableError)) throw err;
        this.queuedOutcomes.push({ reinforcerId, rectified: clean });
        feedback.offline = true;
      }
    }
    const unresolved = this.queuedMistakes.find((q) => q.rectified === null);
    if (unresolved) unresolved.rectified = clean;

    await this.flushQueues();

    if (mistake && phase.reinforced) {
      const stateTag = `${phase.label}:${stat.placements - 1}`;
      if (this.offline) {
        this.queuedMistakes.push({ stateTag, rectified: null });
        feedback.offline = true;
      } else {
        try {
          const resp = await this.client.reportMistake(this.sessionId, stateTag);
          if (resp.reinforcer_id !== null) {
            this.pending = { reinforcerId: resp.reinforcer_id };
            this.dispatchCount += 1;
            feedback.dispatched = {
              reinforcerId: resp.reinforcer_id,
              message: resp.message ?? "",
            };
          }
        } catch (err) {
          if (!(err instanceof ServiceUnreachableError)) throw err;
          this.offline = true;
          this.queuedMistakes.push({ stateTag, rectified: null });
          feedback.offline = true;
        }
      }
    }
    return feedback;
  }

  /** Replay queued offline traffic in order; stops quietly if still offline. */
  private async flushQueues(): Promise<void> {
    if (this.queuedOutcomes.length === 0 && this.queuedMistakes.length === 0) return;
    try {
      while (this.queuedOutcomes.length > 0) {
        const q = this.queuedOutcomes[0];
        await this.client.reportOutcome(this.sessionId, q.reinforcerId, q.rectified);
        this.outcomeCount += 1;
        this.queuedOutcomes.shift();
      }
      while (this.queuedMistakes.length > 0 && this.queuedMistakes[0].rectified !== null) {
        const q = this.queuedMistakes[0];
        const resp = await this.client.reportMistake(this.sessionId, q.stateTag);
        if (resp.reinforcer_id !== null) {
          this.dispatchCount += 1;
          await this.client.reportOutcome(this.sessionId, resp.reinforcer_id, q.rectified!);
          this.outcomeCount += 1;
        }
        this.queuedMistakes.shift();
      }
      this.offline = false;
    } catch (err) {
      if (!(err instanceof ServiceUnreachableError)) throw err;
      this.offline = true;
    }
  }

  /** Close out the session: no reinforcer is left without an outcome. */
  async finish(): Promise<SessionSummary> {
    for (const q of this.queuedMistakes) {
      if (q.rectified === null) q.rectified = false;
    }
    await this.flushQueues();
    if (this.pending) {
      const { reinforcerId } = this.pending;
      this.pending = null;
      try {
        await this.client.reportOutcome(this.sessionId, reinforcerId, false);
        this.outcomeCount += 1;
      } catch (err) {
        if (!(err instanceof ServiceUnreachableError)) throw err;
      }
    }

    let preferred: CatalogEntry | null = null;
    let interactionCount = 0;
    let totalRegret = 0;
    try {
      const metrics = await this.client.getMetrics(this.sessionId);
      interactionCount = metrics.interaction_count;
      totalRegret = metrics.total_regret;
      if (metrics.preferred_reinforcer !== null) {
        preferred = this.catalog[metrics.preferred_reinforcer] ?? null;
      }
    } catch (err) {
      if (!(err instanceof ServiceUnreachableError)) throw err;
    }

    for (const s of this.stats) {
      s.scorePerMinute = s.minutes > 0 ? s.score / s.minutes : 0;
    }
    return {
      phases: this.stats,
      preferredReinforcer: preferred,
      interactionCount,
      totalRegret,
      prompt: preferred
        ? `The trainer thinks you responded best to "${preferred.label}". Was this your preference?`
        : "The trainer did not identify a preferred hint this session.",
    };
  }
}

export function renderSummaryText(summary: SessionSummary): string {
  const lines = ["Session summary", "==============="];
  for (const p of summary.phases) {
    lines.push(
      `${p.label}${p.reinforced ? " (coached)" : " (transfer)"}: ` +
        `score ${p.score} in ${p.minutes.toFixed(1)} min ` +
        `(${p.scorePerMinute.toFixed(1)}/min), ` +
        `${p.placements} placements, ${p.mistakes} mistakes`
    );
  }
  lines.push(`Interactions recorded: ${summary.interactionCount}`);
  lines.push(summary.prompt);
  return lines.join("\n");
}
