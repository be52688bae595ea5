// Falling-blocks board mechanics: a 10x20 grid, seven pieces, line clears.
// Everything here is pure; the UI and the bot both drive it through
// applyPlacement so game state stays replayable.

export const COLS = 10;
export const ROWS = 20;

export type PieceKind = "I" | "O" | "T" | "J" | "L" | "S" | "Z";

export const PIECE_KINDS: PieceKind[] = ["I", "O", "T", "J", "L", "S", "Z"];

// Cell offsets (x, y) per rotation state, y growing downward.
const SHAPES: Record<PieceKind, [number, number][][]> = {
  I: [
    [[0, 1], [1, 1], [2, 1], [3, 1]],
    [[2, 0], [2, 1], [2, 2], [2, 3]],
  ],
  O: [[[0, 0], [1, 0], [0, 1], [1, 1]]],
  T: [
    [[1, 0], [0, 1], [1, 1], [2, 1]],
    [[1, 0], [1, 1], [2, 1], [1, 2]],
    [[0, 1], [1, 1], [2, 1], [1, 2]],
    [[1, 0], [0, 1], [1, 1], [1, 2]],
  ],
  J: [
    [[0, 0], [0, 1], [1, 1], [2, 1]],
    [[1, 0], [2, 0], [1, 1], [1, 2]],
    [[0, 1], [1, 1], [2, 1], [2, 2]],
    [[1, 0], [1, 1], [0, 2], [1, 2]],
  ],
  L: [
    [[2, 0], [0, 1], [1, 1], [2, 1]],
    [[1, 0], [1, 1], [1, 2], [2, 2]],
    [[0, 1], [1, 1], [2, 1], [0, 2]],
    [[0, 0], [1, 0], [1, 1], [1, 2]],
  ],
  S: [
    [[1, 0], [2, 0], [0, 1], [1, 1]],
    [[1, 0], [1, 1], [2, 1], [2, 2]],
  ],
  Z: [
    [[0, 0], [1, 0], [1, 1], [2, 1]],
    [[2, 0], [1, 1], [2, 1], [1, 2]],
  ],
};

export interface ActivePiece {
  kind: PieceKind;
  rotation: number;
  x: number;
  y: number;
}

export interface BoardState {
  grid: number[][]; // ROWS x COLS, 0 empty, 1..7 locked piece color
  active: ActivePiece | null;
  nextPiece: PieceKind;
  score: number;
  linesCleared: number;
  placementsSinceClear: number;
  placements: number;
  gameOver: boolean;
}

const LINE_SCORES = [0, 40, 100, 300, 1200];

export function emptyGrid(): number[][] {
  return Array.from({ length: ROWS }, () => new Array(COLS).fill(0));
}

export function cloneGrid(grid: number[][]): number[][] {
  return grid.map((row) => row.slice());
}

export function pieceCells(piece: ActivePiece): [number, number][] {
  const states = SHAPES[piece.kind];
  const shape = states[((piece.rotation % states.length) + states.length) % states.length];
  return shape.map(([dx, dy]) => [piece.x + dx, piece.y + dy]);
}

export function rotationCount(kind: PieceKind): number {
  return SHAPES[kind].length;
}

export function canPlace(grid: number[][], piece: ActivePiece): boolean {
  for (const [x, y] of pieceCells(piece)) {
    if (x < 0 || x >= COLS || y < 0 || y >= ROWS) return false;
    if (grid[y][x] !== 0) return false;
  }
  return true;
}

export function spawn(kind: PieceKind): ActivePiece {
  return { kind, rotation: 0, x: 3, y: 0 };
}

export function hardDrop(grid: number[][], piece: ActivePiece): ActivePiece {
  let dropped = { ...piece };
  while (canPlace(grid, { ...dropped, y: dropped.y + 1 })) {
    dropped = { ...dropped, y: dropped.y + 1 };
  }
  return dropped;
}

function clearFullLines(grid: number[][]): { grid: number[][]; cleared: number } {
  const kept = grid.filter((row) => row.some((c) => c === 0));
  const cleared = ROWS - kept.length;
  while (kept.length < ROWS) kept.unshift(new Array(COLS).fill(0));
  return { grid: kept, cleared };
}

export function newBoard(firstPiece: PieceKind, nextPiece: PieceKind): BoardState {
  return {
    grid: emptyGrid(),
    active: spawn(firstPiece),
    nextPiece,
    score: 0,
    linesCleared: 0,
    placementsSinceClear: 0,
    placements: 0,
    gameOver: false,
  };
}

/** Lock the given piece into the board, clear lines, score, advance the queue. */
export function applyPlacement(
  state: BoardState,
  piece: ActivePiece,
  upcoming: PieceKind
): BoardState {
  const grid = cloneGrid(state.grid);
  const color = PIECE_KINDS.indexOf(piece.kind) + 1;
  for (const [x, y] of pieceCells(piece)) grid[y][x] = color;
  const { grid: afterClear, cleared } = clearFullLines(grid);
  const nextActive = spawn(state.nextPiece);
  const gameOver = !canPlace(afterClear, nextActive);
  return {
    grid: afterClear,
    active: gameOver ? null : nextActive,
    nextPiece: upcoming,
    score: state.score + LINE_SCORES[cleared] + 1,
    linesCleared: state.linesCleared + cleared,
    placementsSinceClear: cleared > 0 ? 0 : state.placementsSinceClear + 1,
    placements: state.placements + 1,
    gameOver,
  };
}

/** Deterministic piece stream (multiplicative congruential generator). */
export function pieceStream(seed: number): () => PieceKind {
  let state = (seed >>> 0) || 1;
  return () => {
    state = (state * 48271) % 2147483647;
    return PIECE_KINDS[state % PIECE_KINDS.length];
  };
}
