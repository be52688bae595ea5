import { describe, expect, test } from "vitest";

import {
  applyPlacement,
  canPlace,
  COLS,
  emptyGrid,
  hardDrop,
  newBoard,
  PIECE_KINDS,
  pieceCells,
  pieceStream,
  ROWS,
  spawn,
} from "../src/board.js";
import { detectMistake } from "../src/mistakes.js";

test("every piece has four cells in every rotation", () => {
  for (const kind of PIECE_KINDS) {
    for (let r = 0; r < 4; r++) {
      expect(pieceCells({ kind, rotation: r, x: 3, y: 0 }).length).toBe(4);
    }
  }
});

test("hard drop lands on the floor", () => {
  const piece = hardDrop(emptyGrid(), spawn("O"));
  for (const [, y] of pieceCells(piece)) {
    expect(y).toBeGreaterThanOrEqual(ROWS - 2);
  }
});

test("hard drop stacks on blocks", () => {
  const grid = emptyGrid();
  grid[ROWS - 1].fill(1);
  const piece = hardDrop(grid, spawn("O"));
  expect(Math.max(...pieceCells(piece).map(([, y]) => y))).toBe(ROWS - 2);
});

test("placement scores and advances the queue", () => {
  const board = newBoard("O", "T");
  const landed = hardDrop(board.grid, board.active!);
  const after = applyPlacement(board, landed, "I");
  expect(after.score).toBe(1);
  expect(after.placements).toBe(1);
  expect(after.placementsSinceClear).toBe(1);
  expect(after.active?.kind).toBe("T");
  expect(after.nextPiece).toBe("I");
});

test("full rows clear and reset the streak", () => {
  let board = newBoard("O", "O");
  board = { ...board, placementsSinceClear: 7 };
  for (let x = 0; x < COLS; x += 2) {
    const piece = hardDrop(board.grid, { kind: "O", rotation: 0, x, y: 0 });
    board = applyPlacement(board, piece, "O");
  }
  // five O pieces fill the bottom two rows completely
  expect(board.linesCleared).toBe(2);
  expect(board.placementsSinceClear).toBe(0);
  expect(board.grid.every((row) => row.every((c) => c === 0))).toBe(true);
  expect(board.score).toBe(5 + 100);
});

test("piece stream is deterministic per seed", () => {
  const a = pieceStream(42);
  const b = pieceStream(42);
  const c = pieceStream(43);
  const seqA = Array.from({ length: 50 }, a);
  expect(Array.from({ length: 50 }, b)).toEqual(seqA);
  expect(Array.from({ length: 50 }, c)).not.toEqual(seqA);
});

test("game over when the spawn is blocked", () => {
  let board = newBoard("I", "I");
  // stack filling everything except the spawn rows; the locked bar then
  // occupies the spawn row itself
  const grid = emptyGrid();
  for (let r = 2; r < ROWS; r++) {
    for (let c = 2; c < 8; c++) grid[r][c] = 1;
  }
  board = { ...board, grid };
  const piece = { kind: "I" as const, rotation: 0, x: 3, y: 0 };
  expect(canPlace(board.grid, piece)).toBe(true);
  const after = applyPlacement(board, piece, "I");
  expect(after.gameOver).toBe(true);
  expect(after.active).toBeNull();
});

test("a dropped s-piece on flat floor forms a gap", () => {
  const board = newBoard("S", "O");
  const landed = hardDrop(board.grid, board.active!);
  const after = applyPlacement(board, landed, "O");
  expect(detectMistake(board, after)).toBe("GapFormed");
});

test("a dropped o-piece on flat floor is clean", () => {
  const board = newBoard("O", "O");
  const landed = hardDrop(board.grid, board.active!);
  const after = applyPlacement(board, landed, "O");
  expect(detectMistake(board, after)).toBeNull();
});
