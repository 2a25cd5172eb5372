"""Regret and average-strategy tables and the matching rules over them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game_tree import GameTree, InfosetId


@dataclass
class _Table:
    """Dense row-per-infoset table for one player.

    ``values`` has shape ``(infoset_count, max_actions)``; columns past a
    row's action count are padding and stay zero.
    """

    tree: GameTree = field(repr=False)
    player: int
    values: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        shape = (self.tree.infoset_count(self.player), self.tree.max_actions)
        if self.values is None:
            self.values = np.zeros(shape, dtype=np.float64)
        elif self.values.shape != shape:
            raise ValueError(f"table shape {self.values.shape} != {shape}")
        self.action_counts = self.tree.action_counts(self.player)

    def row_of(self, infoset: InfosetId | int) -> int:
        if isinstance(infoset, (int, np.integer)):
            return int(infoset)
        if infoset.player != self.player:
            raise KeyError(f"infoset belongs to player {infoset.player}, table to {self.player}")
        return self.tree.infoset_index(infoset)

    def row(self, infoset: InfosetId | int) -> np.ndarray:
        r = self.row_of(infoset)
        return self.values[r, : self.action_counts[r]]

    def entries(self) -> np.ndarray:
        """All real (non-padding) entries, row-major."""
        mask = np.arange(self.values.shape[1]) < self.action_counts[:, None]
        return self.values[mask]

    def copy(self):
        return type(self)(self.tree, self.player, self.values.copy())


class RegretTable(_Table):
    pass


class StrategyTable(_Table):
    pass


def _check_finite(*xs: float) -> None:
    for x in xs:
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")


def match_strategy(regrets: Sequence[float] | np.ndarray) -> np.ndarray:
    """Strategy proportional to positive regret, uniform if none is positive.

    >>> match_strategy([2.0, 0.0, 1.0]).tolist()
    [0.6666666666666666, 0.0, 0.3333333333333333]
    """
    r = np.asarray(regrets, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("need a non-empty 1-d action vector")
    if not np.all(np.isfinite(r)):
        raise ValueError("regrets must be finite")
    pos = np.maximum(r, 0.0)
    total = 0.0
    for x in pos:
        total += x
    if total > 0.0:
        return pos / total
    return np.full(r.size, 1.0 / r.size)


def match_columns(regrets: np.ndarray) -> np.ndarray:
    """:func:`match_strategy` applied to each column of an ``(A, N)`` block.

    Summation runs over actions in order, matching the compiled kernel.
    """
    pos = np.maximum(regrets, 0.0)
    total = pos[0].copy()
    for a in range(1, pos.shape[0]):
        total += pos[a]
    out = np.empty_like(pos)
    uniform = 1.0 / pos.shape[0]
    positive = total > 0.0
    safe = np.where(positive, total, 1.0)
    for a in range(pos.shape[0]):
        out[a] = np.where(positive, pos[a] / safe, uniform)
    return out


def update_regret_plus(current: float, delta: float) -> float:
    _check_finite(current, delta)
    if current < 0:
        raise ValueError(f"regret+ entries are nonnegative, got {current}")
    return max(current + delta, 0.0)


def update_regret_vanilla(current: float, delta: float) -> float:
    _check_finite(current, delta)
    return current + delta


def accumulate_average(table: StrategyTable, infoset: InfosetId | int, action: int,
                       reach: float, prob: float, weight: float) -> None:
    if reach < 0 or weight < 0 or not 0.0 <= prob <= 1.0:
        raise ValueError(f"bad accumulation args reach={reach} prob={prob} weight={weight}")
    r = table.row_of(infoset)
    if not 0 <= action < table.action_counts[r]:
        raise IndexError(f"action {action} out of range")
    table.values[r, action] += reach * prob * weight


def average_strategy(table: StrategyTable, infoset: InfosetId | int) -> np.ndarray:
    row = table.row(infoset)
    total = row.sum()
    if total > 0.0:
        return row / total
    return np.full(row.size, 1.0 / row.size)
