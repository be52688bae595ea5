// Mistake rules: a placement that seals a gap under blocks, or too many
// placements in a row without clearing a line.

import { BoardState, COLS, ROWS } from "./board.js";

export type MistakeKind = "GapFormed" | "NoClearStreak";

export interface MistakeRule {
  kind: MistakeKind;
  streakThreshold?: number;
}

export const DEFAULT_STREAK_THRESHOLD = 6;

export function defaultRules(streakThreshold = DEFAULT_STREAK_THRESHOLD): MistakeRule[] {
  return [{ kind: "GapFormed" }, { kind: "NoClearStreak", streakThreshold }];
}

export function validateRules(rules: MistakeRule[]): void {
  for (const rule of rules) {
    if (rule.kind === "NoClearStreak") {
      const t = rule.streakThreshold ?? DEFAULT_STREAK_THRESHOLD;
      if (t < 2) throw new Error(`streakThreshold must be >= 2, got ${t}`);
    }
  }
}

/** Empty cells that have at least one occupied cell above them in the same column. */
export function coveredCells(grid: number[][]): Set<string> {
  const covered = new Set<string>();
  for (let c = 0; c < COLS; c++) {
    let blockedAbove = false;
    for (let r = 0; r < ROWS; r++) {
      if (grid[r][c] !== 0) blockedAbove = true;
      else if (blockedAbove) covered.add(`${c},${r}`);
    }
  }
  return covered;
}

/**
 * Classify the transition from one placement. GapFormed wins over
 * NoClearStreak when both apply; null means a clean placement.
 */
export function detectMistake(
  before: BoardState,
  after: BoardState,
  rules: MistakeRule[] = defaultRules()
): MistakeKind | null {
  validateRules(rules);
  const wantGap = rules.some((r) => r.kind === "GapFormed");
  const streakRule = rules.find((r) => r.kind === "NoClearStreak");

  if (wantGap) {
    const prev = coveredCells(before.grid);
    for (const cell of coveredCells(after.grid)) {
      if (!prev.has(cell)) return "GapFormed";
    }
  }
  if (streakRule) {
    const threshold = streakRule.streakThreshold ?? DEFAULT_STREAK_THRESHOLD;
    if (after.placementsSinceClear >= threshold) return "NoClearStreak";
  }
  return null;
}
