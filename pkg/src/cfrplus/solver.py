"""Vector-form, alternating-update CFR+ and vanilla CFR.

Each iteration runs one pass per player, player 1 first. The updating
player's regrets are revised at its own nodes; the other player's average
strategy is accumulated at its nodes with weight ``max(t - d, 0)``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _backend
from .evaluator import Profile, exploitability
from .game_tree import P1, P2, GameTree, PublicNode
from .regret_core import RegretTable, StrategyTable

log = logging.getLogger(__name__)


class Variant(str, enum.Enum):
    CFR_PLUS = "cfr+"
    VANILLA = "cfr"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    variant: Variant = Variant.CFR_PLUS
    averaging_delay: int = 0
    max_iterations: int = 100_000
    # Vanilla CFR averages with w = 1 unless this is set, in which case it
    # uses the same max(t - d, 0) sequence as CFR+.
    delay_vanilla: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.averaging_delay < 0:
            raise ValueError("averaging_delay must be >= 0")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")

    @property
    def plus(self) -> bool:
        return self.variant is Variant.CFR_PLUS

    @property
    def delay_applies(self) -> bool:
        return self.plus or self.delay_vanilla

    def weight(self, t: int) -> float:
        """Averaging weight of iteration ``t`` (1-based)."""
        if not self.delay_applies:
            return 1.0
        return float(max(t - self.averaging_delay, 0))


@dataclass
class SolverState:
    tree: GameTree
    config: SolverConfig
    regrets: list[RegretTable] = field(default_factory=list)
    averages: list[StrategyTable] = field(default_factory=list)
    iteration: int = 0

    def __post_init__(self) -> None:
        if not self.regrets:
            self.regrets = [RegretTable(self.tree, p) for p in (P1, P2)]
        if not self.averages:
            self.averages = [StrategyTable(self.tree, p) for p in (P1, P2)]

    def _arrays(self):
        return [t.values for t in self.regrets], [t.values for t in self.averages]

    def copy(self) -> "SolverState":
        return SolverState(self.tree, self.config, [t.copy() for t in self.regrets],
                           [t.copy() for t in self.averages], self.iteration)


def new_state(tree: GameTree, config: SolverConfig | None = None) -> SolverState:
    return SolverState(tree, config or SolverConfig())


def traverse(state: SolverState, node: PublicNode | int, player: int, weight: float,
             opp_reach: np.ndarray, kernel=None) -> np.ndarray:
    """Single CFR pass for ``player`` from ``node``; mutates the state's tables."""
    if weight < 0:
        raise ValueError("weight must be >= 0")
    reach = np.asarray(opp_reach, dtype=np.float64)
    if reach.shape != (state.tree.deck_size,) or np.any(reach < 0):
        raise ValueError("opp_reach must be a nonnegative vector of length deck_size")
    kernel = kernel or _backend.kernel
    nid = node if isinstance(node, (int, np.integer)) else node.id
    regrets, sums = state._arrays()
    return kernel.cfr_pass(state.tree.flat, int(nid), player, float(weight),
                           state.config.plus, reach, regrets, sums)


def run_iteration(state: SolverState, config: SolverConfig | None = None, kernel=None) -> None:
    run_iterations(state, 1, config, kernel)


def run_iterations(state: SolverState, count: int, config: SolverConfig | None = None,
                   kernel=None) -> None:
    """Advance ``count`` iterations in one kernel call."""
    config = config or state.config
    if count <= 0:
        return
    kernel = kernel or _backend.kernel
    regrets, sums = state._arrays()
    kernel.run_iterations(state.tree.flat, state.iteration, count, config.averaging_delay,
                          config.delay_applies, config.plus, regrets, sums)
    state.iteration += count


def _match_rows(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    valid = np.arange(values.shape[1]) < counts[:, None]
    pos = np.where(valid, np.maximum(values, 0.0), 0.0)
    total = pos.sum(axis=1, keepdims=True)
    uniform = np.where(valid, 1.0 / counts[:, None], 0.0)
    return np.where(total > 0.0, pos / np.where(total > 0.0, total, 1.0), uniform)


def current_profile(state: SolverState) -> Profile:
    """Regret-matched strategies at every infoset."""
    rows = [_match_rows(t.values, t.action_counts) for t in state.regrets]
    return Profile(state.tree, (rows[0], rows[1]))


def average_profile(state: SolverState) -> Profile:
    """Normalized cumulative strategy; uniform where no mass has accumulated."""
    rows = []
    for t in state.averages:
        valid = np.arange(t.values.shape[1]) < t.action_counts[:, None]
        total = t.values.sum(axis=1, keepdims=True)
        uniform = np.where(valid, 1.0 / t.action_counts[:, None], 0.0)
        rows.append(np.where(total > 0.0, t.values / np.where(total > 0.0, total, 1.0), uniform))
    return Profile(state.tree, (rows[0], rows[1]))


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    exploitability_avg_milli: float
    exploitability_cur_milli: float


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    target_milli: float = 1.0
    stop_on: str = "average"

    @property
    def final(self) -> TraceRecord | None:
        return self.records[-1] if self.records else None


def solve_to_target(tree: GameTree, config: SolverConfig, target_milli: float = 1.0,
                    probe_interval: int = 10, *,
                    stop_on: Literal["average", "current"] = "average",
                    state: SolverState | None = None, kernel=None) -> ConvergenceTrace:
    """Iterate until the watched profile is below ``target_milli`` exploitability.

    Both profiles are probed every ``probe_interval`` iterations and, if the
    budget runs out between probes, once more at the last iteration. Pass
    ``state`` to continue a run (e.g. one restored from a snapshot); the
    budget counts absolute iterations.
    """
    if target_milli <= 0:
        raise ValueError("target_milli must be > 0")
    if probe_interval < 1:
        raise ValueError("probe_interval must be >= 1")
    if stop_on not in ("average", "current"):
        raise ValueError(f"stop_on must be 'average' or 'current', not {stop_on!r}")
    if state is None:
        state = SolverState(tree, config)
    elif state.tree is not tree and state.tree.deck_size != tree.deck_size:
        raise ValueError("state belongs to a different game")
    state.config = config
    trace = ConvergenceTrace(target_milli=target_milli, stop_on=stop_on)

    while state.iteration < config.max_iterations:
        next_probe = (state.iteration // probe_interval + 1) * probe_interval
        run_iterations(state, min(next_probe, config.max_iterations) - state.iteration,
                       kernel=kernel)
        avg = exploitability(tree, average_profile(state), kernel).exploitability_milli
        cur = exploitability(tree, current_profile(state), kernel).exploitability_milli
        trace.records.append(TraceRecord(state.iteration, avg, cur))
        watched = avg if stop_on == "average" else cur
        if watched < target_milli:
            trace.converged = True
            break

    trace.iterations = state.iteration
    log.debug("deck=%d %s stop_on=%s: %s after %d iterations", tree.deck_size,
              config.variant, stop_on, "converged" if trace.converged else "not converged",
              state.iteration)
    return trace
