// Browser app: canvas board, keyboard controls, reinforcer banner, two-phase
// timer, end-of-session summary. Gameplay pauses while a reinforcer banner is
// up and resumes when the learner dismisses it.

import {
  applyPlacement,
  BoardState,
  canPlace,
  COLS,
  hardDrop,
  newBoard,
  pieceCells,
  pieceStream,
  ROWS,
  rotationCount,
} from "./board.js";
import { TrainerClient } from "./client.js";
import { defaultPhases, renderSummaryText, TrainingSession } from "./session.js";

const CELL = 24;
const COLORS = ["#111", "#4dd2ff", "#ffd24d", "#c84dff", "#4d6bff", "#ff9f4d", "#5fff4d", "#ff4d5e"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  client: TrainerClient;
  session: TrainingSession;
  board: BoardState;
  nextKind = pieceStream(Date.now() % 2147483647);
  paused = false;
  dropTimer = 0;
  ctx: CanvasRenderingContext2D;
  finished = false;

  constructor(group: string) {
    const base = `${location.protocol}//${location.hostname}:${location.port || 7477}`;
    this.client = new TrainerClient(base);
    const minutes = Number(new URLSearchParams(location.search).get("minutes") ?? "15");
    this.session = new TrainingSession(
      this.client,
      group,
      "tetris7",
      defaultPhases(minutes * 60_000, Math.min(5, minutes) * 60_000)
    );
    this.board = newBoard(this.nextKind(), this.nextKind());
    const canvas = el<HTMLCanvasElement>("board");
    canvas.width = COLS * CELL;
    canvas.height = ROWS * CELL;
    this.ctx = canvas.getContext("2d")!;
  }

  async start() {
    try {
      await this.session.start();
      el("status").textContent = `session ${this.session.id}`;
    } catch (err) {
      el("status").textContent = "service unreachable: playing locally";
    }
    document.addEventListener("keydown", (e) => this.onKey(e));
    this.dropTimer = window.setInterval(() => this.tick(), 600);
    this.render();
  }

  onKey(e: KeyboardEvent) {
    if (this.paused || this.finished || !this.board.active) return;
    const piece = this.board.active;
    if (e.key === "ArrowLeft" && canPlace(this.board.grid, { ...piece, x: piece.x - 1 })) {
      piece.x -= 1;
    } else if (e.key === "ArrowRight" && canPlace(this.board.grid, { ...piece, x: piece.x + 1 })) {
      piece.x += 1;
    } else if (e.key === "ArrowDown" && canPlace(this.board.grid, { ...piece, y: piece.y + 1 })) {
      piece.y += 1;
    } else if (e.key === "ArrowUp") {
      const rotated = { ...piece, rotation: (piece.rotation + 1) % rotationCount(piece.kind) };
      if (canPlace(this.board.grid, rotated)) this.board.active = rotated;
    } else if (e.key === " ") {
      e.preventDefault();
      void this.commit(hardDrop(this.board.grid, piece));
      return;
    }
    this.render();
  }

  tick() {
    if (this.paused || this.finished || !this.board.active) return;
    const piece = this.board.active;
    if (canPlace(this.board.grid, { ...piece, y: piece.y + 1 })) {
      piece.y += 1;
      this.render();
    } else {
      void this.commit(piece);
    }
  }

  async commit(piece: { kind: any; rotation: number; x: number; y: number }) {
    const before = this.board;
    this.board = applyPlacement(before, piece, this.nextKind());
    this.render();
    const feedback = await this.session.onPlacement(before, this.board).catch(() => null);
    if (feedback?.dispatched) this.showBanner(feedback.dispatched.message);
    el("offline").style.display = this.session.offline ? "block" : "none";
    if (this.board.gameOver) {
      // Losing restarts the board; the session and its phases keep running.
      this.board = newBoard(this.nextKind(), this.nextKind());
      this.render();
    }
    if (this.session.finished() && !this.finished) await this.end();
  }

  showBanner(message: string) {
    this.paused = true;
    el("banner-text").textContent = message;
    el("banner").style.display = "flex";
    beep();
  }

  hideBanner() {
    this.paused = false;
    el("banner").style.display = "none";
  }

  async end() {
    this.finished = true;
    window.clearInterval(this.dropTimer);
    const summary = await this.session.finish();
    el("summary-text").textContent = renderSummaryText(summary);
    const prompt = el("summary-prompt");
    prompt.textContent = summary.prompt;
    el("summary").style.display = "flex";
  }

  render() {
    const ctx = this.ctx;
    ctx.fillStyle = COLORS[0];
    ctx.fillRect(0, 0, COLS * CELL, ROWS * CELL);
    for (let r = 0; r < ROWS; r++) {
      for (let c = 0; c < COLS; c++) {
        if (this.board.grid[r][c] !== 0) drawCell(ctx, c, r, COLORS[this.board.grid[r][c]]);
      }
    }
    if (this.board.active) {
      for (const [x, y] of pieceCells(this.board.active)) {
        drawCell(ctx, x, y, "#eee");
      }
    }
    const phase = this.session.currentPhase();
    el("phase").textContent = phase
      ? `${phase.label} ${phase.reinforced ? "(coached)" : "(free play)"}`
      : "done";
    el("score").textContent =
      `score ${this.board.score}  lines ${this.board.linesCleared}  next ${this.board.nextPiece}`;
  }
}

function drawCell(ctx: CanvasRenderingContext2D, c: number, r: number, color: string) {
  ctx.fillStyle = color;
  ctx.fillRect(c * CELL + 1, r * CELL + 1, CELL - 2, CELL - 2);
}

function beep() {
  try {
    const audio = new AudioContext();
    const osc = audio.createOscillator();
    osc.frequency.value = 660;
    osc.connect(audio.destination);
    osc.start();
    osc.stop(audio.currentTime + 0.15);
  } catch {
    // no audio available; the banner alone is fine
  }
}

window.addEventListener("DOMContentLoaded", () => {
  const group = new URLSearchParams(location.search).get("group") ?? "learned";
  const app = new App(group);
  el("banner-resume").addEventListener("click", () => app.hideBanner());
  el("summary-yes").addEventListener("click", () => {
    el("summary-prompt").textContent = "Thanks! Glad the hints landed.";
  });
  el("summary-no").addEventListener("click", () => {
    el("summary-prompt").textContent = "Thanks for the honest answer.";
  });
  void app.start();
});
