"""Weighted-update engine for adaptive reinforcer selection.

One engine instance tracks a probability simplex over the reinforcers of a
single learner session. Every recorded (reinforcer, outcome) interaction moves
weight toward reinforcers that get mistakes rectified, through five stages:

1. raw step: on success the selected weight gains ``alpha`` and every other
   weight loses ``alpha / (n - 1)``; a failure mirrors the signs. The result
   is clamped to the epsilon floor and rescaled to the simplex.
2. exponential smoothing toward the previous smoothed vector with multiplier
   ``ewma_phi`` (the smoothed vector is what the window statistics see).
3. exploration bonus: ``sigma_multiplier`` times the per-reinforcer sample
   standard deviation over the last ``window_k`` smoothed vectors, added to
   every arm. Fewer than two snapshots give a zero bonus.
4. clamp to the epsilon floor, so no reinforcer ever becomes unselectable.
5. rescale back onto the simplex.

Selection is weighted-random over the current simplex, so the engine explores
while it exploits; the floor keeps it from ever turning greedy.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Raised when an engine configuration violates its invariants."""


@dataclass(frozen=True)
class EngineConfig:
    """Parameters of one engine.

    ``ewma_phi`` defaults to the span mapping 2 / (window_k + 1), e.g. 0.5 for
    a window of 3 and 1/3 for a window of 5.
    """

    n: int
    alpha: float
    window_k: int = 3
    ewma_phi: float | None = None
    epsilon_floor: float = 1e-4
    sigma_multiplier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"need at least 2 reinforcers, got n={self.n}")
        if not (0.0 < self.alpha < 1.0 / self.n):
            raise ConfigurationError(
                f"alpha must be in (0, 1/n) = (0, {1.0 / self.n:.6g}), got {self.alpha}"
            )
        if self.window_k < 1:
            raise ConfigurationError(f"window_k must be >= 1, got {self.window_k}")
        if self.ewma_phi is None:
            object.__setattr__(self, "ewma_phi", 2.0 / (self.window_k + 1))
        if not (0.0 < self.ewma_phi <= 1.0):
            raise ConfigurationError(f"ewma_phi must be in (0, 1], got {self.ewma_phi}")
        if not (0.0 <= self.epsilon_floor < 1.0 / self.n):
            raise ConfigurationError(
                f"epsilon_floor must be in [0, 1/n), got {self.epsilon_floor}"
            )
        if self.sigma_multiplier < 0.0:
            raise ConfigurationError(
                f"sigma_multiplier must be >= 0, got {self.sigma_multiplier}"
            )
        if self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "window_k": self.window_k,
            "ewma_phi": self.ewma_phi,
            "epsilon_floor": self.epsilon_floor,
            "sigma_multiplier": self.sigma_multiplier,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass(frozen=True)
class Outcome:
    """One dispatched reinforcer and whether the learner then rectified."""

    selected: int
    success: bool


@dataclass(frozen=True)
class InteractionRecord:
    """Snapshot of the engine after one recorded outcome."""

    t: int
    state_tag: str
    selected: int
    success: bool
    weights_after: tuple[float, ...]
    entropy_after: float
    regret: float

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "state_tag": self.state_tag,
            "selected": self.selected,
            "success": self.success,
            "weights_after": list(self.weights_after),
            "entropy_after": self.entropy_after,
            "regret": self.regret,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionRecord":
        return cls(
            t=d["t"],
            state_tag=d["state_tag"],
            selected=d["selected"],
            success=d["success"],
            weights_after=tuple(d["weights_after"]),
            entropy_after=d["entropy_after"],
            regret=d["regret"],
        )


@dataclass
class EngineState:
    """Mutable per-session state. Sequential object: record one outcome at a time."""

    config: EngineConfig
    weights: np.ndarray
    ewma_current: np.ndarray
    ewma_history: deque = field(repr=False)
    interaction_count: int = 0
    rng: np.random.Generator = field(default=None, repr=False)


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def new_engine(config: EngineConfig) -> EngineState:
    """Fresh engine: uniform weights, smoothed vector at uniform, empty window."""
    w = uniform_weights(config.n)
    return EngineState(
        config=config,
        weights=w,
        ewma_current=w.copy(),
        ewma_history=deque(maxlen=config.window_k),
        interaction_count=0,
        rng=np.random.default_rng(config.seed),
    )


def _clamp_rescale(weights: np.ndarray, floor: float) -> np.ndarray:
    """Clamp every weight to the floor, then rescale the above-floor mass so the
    vector sums to 1 with the floor preserved exactly."""
    n = weights.size
    clamped = np.maximum(weights, floor)
    free = clamped - floor
    total_free = float(free.sum())
    if total_free <= 0.0:
        return uniform_weights(n)
    return floor + free * ((1.0 - n * floor) / total_free)


def raw_update(
    weights: np.ndarray, outcome: Outcome, alpha: float, epsilon_floor: float = 0.0
) -> np.ndarray:
    """Apply the +/- alpha step for one outcome and return a fresh simplex vector.

    The amount won or lost by the selected reinforcer is spread evenly over the
    other n - 1 with the opposite sign, so total mass is conserved before the
    floor clamp.
    """
    w = np.asarray(weights, dtype=float)
    n = w.size
    if not 0 <= outcome.selected < n:
        raise IndexError(f"selected reinforcer {outcome.selected} out of range for n={n}")
    sign = 1.0 if outcome.success else -1.0
    updated = w + (-sign) * (alpha / (n - 1))
    updated[outcome.selected] = w[outcome.selected] + sign * alpha
    return _clamp_rescale(updated, epsilon_floor)


def ewma_smooth(state: EngineState, updated: np.ndarray) -> np.ndarray:
    """Blend the raw-updated vector into the smoothed trajectory and archive it.

    Returns phi * updated + (1 - phi) * previous smoothed vector; the result
    becomes the new smoothed vector and the newest window snapshot.
    """
    phi = state.config.ewma_phi
    smoothed = phi * np.asarray(updated, dtype=float) + (1.0 - phi) * state.ewma_current
    state.ewma_history.append(smoothed)
    state.ewma_current = smoothed
    return smoothed


def exploration_bonus(state: EngineState) -> np.ndarray:
    """Per-reinforcer bonus: sigma_multiplier times the sample standard deviation
    of each reinforcer's smoothed values across the window. Zero with fewer than
    two snapshots."""
    history = state.ewma_history
    k = len(history)
    if k < 2:
        return np.zeros(state.config.n)
    it = iter(history)
    acc = next(it).copy()
    for snap in it:
        acc += snap
    mean = acc / k
    sq = np.zeros(state.config.n)
    for snap in history:
        d = snap - mean
        sq += d * d
    return state.config.sigma_multiplier * np.sqrt(sq / (k - 1))


def record_outcome(state: EngineState, outcome: Outcome, state_tag: str = "") -> InteractionRecord:
    """Run the five update stages for one outcome and advance the engine."""
    cfg = state.config
    raw = raw_update(state.weights, outcome, cfg.alpha, cfg.epsilon_floor)
    smoothed = ewma_smooth(state, raw)
    bonus = exploration_bonus(state)
    state.weights = _clamp_rescale(smoothed + bonus, cfg.epsilon_floor)
    state.interaction_count += 1
    return InteractionRecord(
        t=state.interaction_count,
        state_tag=state_tag,
        selected=outcome.selected,
        success=outcome.success,
        weights_after=tuple(state.weights.tolist()),
        entropy_after=entropy(state.weights),
        regret=regret(state.weights, outcome.selected),
    )


def select_reinforcer(state: EngineState) -> int:
    """Weighted-random draw over the current weights. Consumes one uniform variate."""
    u = state.rng.random()
    cum = np.cumsum(state.weights)
    i = int(np.searchsorted(cum, u, side="right"))
    return min(i, state.config.n - 1)


def entropy(weights: np.ndarray) -> float:
    """Shannon entropy in bits, with 0 * log 0 = 0.

    Computed as log2(n) minus the divergence from uniform, which is exact at
    the uniform vector; the result is clamped to [0, log2 n].
    """
    w = np.asarray(weights, dtype=float)
    n = w.size
    log2n = math.log2(n)
    if w.min() > 0.0:
        h = log2n - float(np.dot(w, np.log2(w * n)))
    else:
        positive = w > 0.0
        terms = np.where(positive, w * np.log2(np.where(positive, w * n, 1.0)), 0.0)
        h = log2n - float(np.sum(terms))
    return min(max(h, 0.0), log2n)


def regret(weights: np.ndarray, selected: int) -> float:
    """Gap between the heaviest reinforcer and the dispatched one."""
    w = np.asarray(weights, dtype=float)
    if not 0 <= selected < w.size:
        raise IndexError(f"selected reinforcer {selected} out of range for n={w.size}")
    return float(w.max() - w[selected])


def preferred_reinforcer(state: EngineState) -> int:
    """Argmax of the weights; ties break toward the lowest id."""
    return int(np.argmax(state.weights))
