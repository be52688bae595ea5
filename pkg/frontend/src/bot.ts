// Scripted player used by tests and demos: executes a fixed list of
// (piece, rotation, column) drops against the board and feeds every placement
// through the training session.

import {
  applyPlacement,
  BoardState,
  hardDrop,
  newBoard,
  PieceKind,
  pieceStream,
} from "./board.js";
import { PlacementFeedback, TrainingSession } from "./session.js";

export interface ScriptedMove {
  kind: PieceKind;
  rotation: number;
  x: number;
}

export interface ScriptResult {
  board: BoardState;
  feedback: PlacementFeedback[];
}

/**
 * Drop each scripted piece in order. The session sees every transition; the
 * returned feedback list parallels the moves.
 */
export async function playScript(
  session: TrainingSession,
  moves: ScriptedMove[],
  board?: BoardState
): Promise<ScriptResult> {
  const upcoming = pieceStream(1);
  let state = board ?? newBoard(moves[0]?.kind ?? "O", upcoming());
  const feedback: PlacementFeedback[] = [];
  for (const move of moves) {
    const piece = hardDrop(state.grid, { kind: move.kind, rotation: move.rotation, x: move.x, y: 0 });
    const after = applyPlacement(state, piece, upcoming());
    feedback.push(await session.onPlacement(state, after));
    state = after;
  }
  return { board: state, feedback };
}

/** Four flat two-by-two blocks: clean placements, no clears, no gaps. */
export function cleanOpening(): ScriptedMove[] {
  return [
    { kind: "O", rotation: 0, x: 0 },
    { kind: "O", rotation: 0, x: 2 },
    { kind: "O", rotation: 0, x: 4 },
    { kind: "O", rotation: 0, x: 6 },
  ];
}

/**
 * Two blocks leaving a notch at columns 2, then a flat bar across it: the bar
 * seals the notch and forms a covered gap.
 */
export function gapScript(): ScriptedMove[] {
  return [
    { kind: "O", rotation: 0, x: 0 },
    { kind: "O", rotation: 0, x: 3 },
    { kind: "I", rotation: 0, x: 0 },
  ];
}
