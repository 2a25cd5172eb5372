"""Pure numpy traversal kernels, used when the compiled extension is absent.

Arithmetic is ordered exactly as in ``_ckernel.pyx`` so both backends agree
to the last bit on the same inputs.
"""

from __future__ import annotations

import numpy as np

from .game_tree import FlatTree, _terminal_utility
from .regret_core import match_columns

DECISION = 0


def _terminal(flat: FlatTree, nid: int, traverser: int, reach: np.ndarray) -> np.ndarray:
    return _terminal_utility(flat.kind[nid], flat.contrib[nid], flat.winner[nid],
                             traverser, reach)


def cfr_pass(flat: FlatTree, nid: int, traverser: int, weight: float, plus: bool,
             reach: np.ndarray, regrets, sums) -> np.ndarray:
    """One vector-form CFR pass for ``traverser`` rooted at node ``nid``.

    Mutates ``regrets[traverser]`` and ``sums[opponent]`` in place and
    returns the counterfactual value vector of the traverser.
    """
    if flat.kind[nid] != DECISION:
        return _terminal(flat, nid, traverser, reach)
    n = flat.deck_size
    p = flat.player[nid]
    na = flat.n_actions[nid]
    start = flat.child_start[nid]
    base = flat.row_base[nid]
    rows = slice(base, base + n)
    sigma = match_columns(regrets[p][rows, :na].T)
    u = np.zeros(n)
    if p == traverser:
        m = np.empty((na, n))
        for a in range(na):
            m[a] = cfr_pass(flat, flat.children[start + a], traverser, weight, plus,
                            reach, regrets, sums)
            u += sigma[a] * m[a]
        table = regrets[p]
        for a in range(na):
            updated = table[rows, a] + (m[a] - u)
            table[rows, a] = np.maximum(updated, 0.0) if plus else updated
    else:
        for a in range(na):
            u += cfr_pass(flat, flat.children[start + a], traverser, weight, plus,
                          sigma[a] * reach, regrets, sums)
        table = sums[p]
        for a in range(na):
            table[rows, a] += reach * sigma[a] * weight
    return u


def evaluate(flat: FlatTree, nid: int, player: int, reach: np.ndarray, strategies,
             best_response: bool) -> np.ndarray:
    """Value vector of ``player`` against the fixed opponent strategy.

    With ``best_response`` the player's own nodes take the per-card maximum
    over actions; otherwise they follow ``strategies[player]``.
    """
    if flat.kind[nid] != DECISION:
        return _terminal(flat, nid, player, reach)
    n = flat.deck_size
    p = flat.player[nid]
    na = flat.n_actions[nid]
    start = flat.child_start[nid]
    base = flat.row_base[nid]
    sigma = strategies[p][base:base + n, :na].T
    if p == player:
        if best_response:
            u = evaluate(flat, flat.children[start], player, reach, strategies, True)
            for a in range(1, na):
                u = np.maximum(u, evaluate(flat, flat.children[start + a], player, reach,
                                           strategies, True))
            return u
        u = np.zeros(n)
        for a in range(na):
            u += sigma[a] * evaluate(flat, flat.children[start + a], player, reach,
                                     strategies, False)
        return u
    u = np.zeros(n)
    for a in range(na):
        u += evaluate(flat, flat.children[start + a], player, sigma[a] * reach,
                      strategies, best_response)
    return u


def run_iteration(flat: FlatTree, weight: float, plus: bool, regrets, sums) -> None:
    ones = np.ones(flat.deck_size)
    for traverser in (0, 1):
        cfr_pass(flat, 0, traverser, weight, plus, ones, regrets, sums)


def run_iterations(flat: FlatTree, start: int, count: int, delay: int, delay_applies: bool,
                   plus: bool, regrets, sums) -> None:
    """Iterations ``start+1 .. start+count``; the averaging weight of
    iteration t is ``max(t - delay, 0)`` or 1 when the delay does not apply."""
    for t in range(start + 1, start + count + 1):
        w = float(max(t - delay, 0)) if delay_applies else 1.0
        run_iteration(flat, w, plus, regrets, sums)
