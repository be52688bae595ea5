"""Entropy trajectories, weight-state Markov chain, and convergence analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .engine import ConfigurationError, EngineConfig, entropy
from .novice import Group, NoviceProfile, PhaseSchedule, derive_seed, run_session
from .stats import pearson


class ValidationError(ValueError):
    """Raised for structurally invalid analysis inputs."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solve fails to reach its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ResourceLimitError(RuntimeError):
    """Raised when an enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class EntropySeries:
    """Entropy in bits at increasing interaction indices."""

    values: tuple[tuple[int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple((int(t), float(h)) for t, h in self.values))
        ts = [t for t, _ in self.values]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("entropy series indices must be strictly increasing")

    @property
    def entropies(self) -> list[float]:
        return [h for _, h in self.values]

    def __len__(self) -> int:
        return len(self.values)


def entropy_series_from_records(records, n: int) -> EntropySeries:
    """Series starting at the fresh-engine entropy log2(n), then one point per record."""
    values = [(0, math.log2(n))]
    values.extend((rec.t, rec.entropy_after) for rec in records)
    return EntropySeries(tuple(values))


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic chain over discretized weight-states.

    ``states[i]`` is the weight vector of state i; ``rows`` is the transition
    matrix (dense ndarray, or CSR when large). States on the enumeration
    frontier are absorbing.
    """

    rows: object
    states: tuple[tuple[float, ...], ...]
    n_reinforcers: int
    alpha_gain: float
    beta_redistribution: float

    @property
    def size(self) -> int:
        return len(self.states)

    def dense(self) -> np.ndarray:
        if sp.issparse(self.rows):
            return self.rows.toarray()
        return np.asarray(self.rows)


_DENSE_STATE_LIMIT = 2048
STATE_CAP = 100_000


def _chain_step(w: np.ndarray, arm: int, success: bool, alpha: float, beta: float) -> np.ndarray:
    """One +/- step of the weight chain: the selected arm moves by alpha, the
    rest by beta with the opposite sign; clamp at zero and rescale to sum 1."""
    v = w + (-beta if success else beta)
    v[arm] = w[arm] + (alpha if success else -alpha)
    v = np.maximum(v, 0.0)
    total = float(v.sum())
    if total <= 0.0:
        return np.full(w.size, 1.0 / w.size)
    return v / total


def _state_key(w: np.ndarray) -> tuple:
    return tuple(round(float(x), 12) for x in w)


def build_transition_matrix(
    n_reinforcers: int,
    alpha_gain: float,
    success_probability_per_arm,
    depth: int,
    beta_redistribution: float | None = None,
    state_cap: int = STATE_CAP,
) -> TransitionMatrix:
    """Enumerate weight-states reachable within ``depth`` steps of the uniform
    start and build the transition chain over them.

    From a state with weights w, arm i is selected with probability w[i]; the
    outcome is a success with ``success_probability_per_arm[i]``, moving to the
    corresponding gain state, else to the loss state. Frontier states at the
    final depth are absorbing. ``beta_redistribution`` defaults to
    alpha_gain / (n - 1), the mass-conserving choice.
    """
    if n_reinforcers < 2:
        raise ValidationError(f"need at least 2 reinforcers, got {n_reinforcers}")
    if alpha_gain <= 0:
        raise ValidationError(f"alpha_gain must be positive, got {alpha_gain}")
    if depth < 1:
        raise ValidationError(f"depth must be >= 1, got {depth}")
    beta = alpha_gain / (n_reinforcers - 1) if beta_redistribution is None else beta_redistribution
    if beta < 0:
        raise ValidationError(f"beta_redistribution must be >= 0, got {beta}")
    p_success = np.asarray(success_probability_per_arm, dtype=float)
    if p_success.shape != (n_reinforcers,) or np.any(p_success < 0) or np.any(p_success > 1):
        raise ValidationError("success probabilities must be n values in [0, 1]")

    start = np.full(n_reinforcers, 1.0 / n_reinforcers)
    states: list[np.ndarray] = [start]
    index = {_state_key(start): 0}
    level = [0]
    transitions: dict[int, dict[int, float]] = {}

    for _ in range(depth):
        next_level = []
        for si in level:
            w = states[si]
            row: dict[int, float] = {}
            for arm in range(n_reinforcers):
                select_p = float(w[arm])
                if select_p <= 0.0:
                    continue
                gain_mass = select_p * float(p_success[arm])
                loss_mass = select_p - gain_mass
                for success, mass in ((True, gain_mass), (False, loss_mass)):
                    if mass <= 0.0:
                        continue
                    nxt = _chain_step(w, arm, success, alpha_gain, beta)
                    key = _state_key(nxt)
                    ti = index.get(key)
                    if ti is None:
                        ti = len(states)
                        if ti >= state_cap:
                            raise ResourceLimitError(
                                f"state enumeration exceeded the cap of {state_cap} states"
                            )
                        index[key] = ti
                        states.append(nxt)
                        next_level.append(ti)
                    row[ti] = row.get(ti, 0.0) + mass
            transitions[si] = row
        level = next_level

    size = len(states)
    for si in range(size):
        if si not in transitions:
            transitions[si] = {si: 1.0}

    if size <= _DENSE_STATE_LIMIT:
        rows = np.zeros((size, size))
        for si, row in transitions.items():
            for ti, mass in row.items():
                rows[si, ti] = mass
    else:
        data, ri, ci = [], [], []
        for si, row in transitions.items():
            for ti, mass in row.items():
                ri.append(si)
                ci.append(ti)
                data.append(mass)
        rows = sp.csr_matrix((data, (ri, ci)), shape=(size, size))

    return TransitionMatrix(
        rows=rows,
        states=tuple(tuple(float(x) for x in s) for s in states),
        n_reinforcers=n_reinforcers,
        alpha_gain=alpha_gain,
        beta_redistribution=beta,
    )


def _as_matrix(m):
    if isinstance(m, TransitionMatrix):
        return m.rows
    if sp.issparse(m):
        return m
    return np.asarray(m, dtype=float)


def stationary_distribution(
    matrix,
    damping: float = 1e-6,
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> np.ndarray:
    """Probability vector pi with pi @ M = pi, residual below ``tol`` in the
    max norm against the undamped matrix.

    Runs a lazy damped power iteration first, which has a unique fixed point
    even for periodic or reducible chains and so gives a canonical start, then
    polishes on the original chain until the residual bound holds.
    """
    m = _as_matrix(matrix)
    size = m.shape[0]
    if m.shape != (size, size):
        raise ValidationError(f"matrix must be square, got shape {m.shape}")
    if sp.issparse(m):
        if m.nnz and m.data.min() < 0:
            raise ValidationError("matrix entries must be non-negative")
        row_sums = np.asarray(m.sum(axis=1)).ravel()
    else:
        if m.size and m.min() < 0:
            raise ValidationError("matrix entries must be non-negative")
        row_sums = m.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 1e-9:
        raise ValidationError("matrix is not row-stochastic")

    mt = m.T if not sp.issparse(m) else m.T.tocsr()

    def step(pi):
        return mt @ pi

    uniform = np.full(size, 1.0 / size)
    pi = uniform.copy()
    budget = max_iter

    # Phase 1: lazy damped iteration toward the canonical fixed point.
    for _ in range(min(budget, max_iter // 2)):
        budget -= 1
        nxt = 0.5 * pi + 0.5 * ((1.0 - damping) * step(pi) + damping * uniform)
        nxt /= nxt.sum()
        if float(np.max(np.abs(nxt - pi))) < 1e-13:
            pi = nxt
            break
        pi = nxt

    # Phase 2: polish on the undamped chain until the residual bound holds.
    residual = float(np.max(np.abs(step(pi) - pi)))
    while residual >= tol:
        if budget <= 0:
            raise ConvergenceError(
                f"stationary solve did not reach residual {tol:g}; "
                f"best residual {residual:.3e}",
                residual,
            )
        budget -= 1
        pi = 0.5 * pi + 0.5 * step(pi)
        pi /= pi.sum()
        residual = float(np.max(np.abs(step(pi) - pi)))

    # Phase 3: keep polishing while it still pays, so fast-mixing chains come
    # out near machine accuracy rather than just inside the bound.
    while residual > tol * 1e-3 and budget > 0:
        budget -= 1
        nxt = 0.5 * pi + 0.5 * step(pi)
        nxt /= nxt.sum()
        nxt_residual = float(np.max(np.abs(step(nxt) - nxt)))
        if nxt_residual >= residual:
            break
        pi, residual = nxt, nxt_residual

    pi = np.maximum(pi, 0.0)
    return pi / pi.sum()


def detect_plateau(series: EntropySeries, tolerance: float) -> int | None:
    """Smallest interaction index from which every subsequent entropy change is
    below ``tolerance``. None if no change is ever checked from that point (a
    plateau must cover at least one step) or the series never settles."""
    if len(series) == 0:
        raise ValidationError("series must be non-empty")
    if tolerance <= 0:
        raise ValidationError(f"tolerance must be positive, got {tolerance}")
    hs = series.entropies
    if len(hs) < 2:
        return None
    last_violation = -1
    for i in range(len(hs) - 1):
        if abs(hs[i + 1] - hs[i]) >= tolerance:
            last_violation = i
    start = last_violation + 1
    if start > len(hs) - 2:
        return None
    return series.values[start][0]


def alpha_sweep(
    alphas,
    profile: NoviceProfile,
    schedule: PhaseSchedule,
    base_config: EngineConfig,
    seeds: int = 30,
) -> dict[float, EntropySeries]:
    """Mean entropy trajectory of coached sessions for each step size.

    Per alpha, runs ``seeds`` independent sessions and averages entropy at each
    interaction index, truncating to the shortest session of that alpha.
    """
    alphas = list(alphas)
    if not alphas:
        raise ConfigurationError("need at least one alpha")
    if seeds < 1:
        raise ConfigurationError(f"seeds must be >= 1, got {seeds}")

    result: dict[float, EntropySeries] = {}
    for alpha in alphas:
        runs = []
        for s in range(seeds):
            cfg = replace(
                base_config, alpha=alpha, seed=derive_seed(base_config.seed, "sweep", alpha, s)
            )
            summary = run_session(profile, schedule, Group.LEARNED, cfg)
            series = entropy_series_from_records(summary.records, cfg.n)
            runs.append(series.entropies)
        horizon = min(len(r) for r in runs)
        stacked = np.array([r[:horizon] for r in runs])
        mean = stacked.mean(axis=0)
        result[alpha] = EntropySeries(tuple((t, float(mean[t])) for t in range(horizon)))
    return result


def regret_mistake_correlation(summaries) -> float:
    """Correlation between per-session total mistakes and total regret."""
    summaries = list(summaries)
    if len(summaries) < 2:
        raise ValueError("need at least 2 session summaries")
    mistakes = [s.total_mistakes for s in summaries]
    regrets = [s.total_regret for s in summaries]
    return pearson(mistakes, regrets)


__all__ = [
    "EntropySeries",
    "TransitionMatrix",
    "ValidationError",
    "ConvergenceError",
    "ResourceLimitError",
    "entropy_series_from_records",
    "build_transition_matrix",
    "stationary_distribution",
    "detect_plateau",
    "alpha_sweep",
    "regret_mistake_correlation",
    "entropy",
]
