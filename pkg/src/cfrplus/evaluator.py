"""Exact expected values, best responses and exploitability."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _backend
from .game_tree import P1, P2, GameTree, InfosetId, PublicNode

DIST_TOL = 1e-9


class ProfileError(ValueError):
    """Raised for incomplete or malformed strategy profiles."""


@dataclass(frozen=True)
class Profile:
    """Behavioral strategies for both players, stored as dense rows.

    ``strategies[p]`` has one row per infoset of player ``p`` (see
    :meth:`GameTree.infoset_index`) and ``tree.max_actions`` columns.
    Index with an :class:`InfosetId` to get one strategy vector.
    """

    tree: GameTree
    strategies: tuple[np.ndarray, np.ndarray]

    def __getitem__(self, infoset: InfosetId) -> np.ndarray:
        row = self.tree.infoset_index(infoset)
        na = len(self.tree.nodes[infoset.node].actions)
        return self.strategies[infoset.player][row, :na]

    def to_mapping(self) -> list[dict[InfosetId, np.ndarray]]:
        return [{I: self[I] for I in self.tree.infosets(p)} for p in (P1, P2)]

    @classmethod
    def from_mapping(cls, tree: GameTree,
                     mappings: Sequence[Mapping[InfosetId, Sequence[float]]]) -> "Profile":
        if len(mappings) != 2:
            raise ProfileError("need one mapping per player")
        arrays = []
        for p in (P1, P2):
            arr = np.zeros((tree.infoset_count(p), tree.max_actions))
            for I in tree.infosets(p):
                if I not in mappings[p]:
                    raise ProfileError(f"profile missing infoset {I}")
                vec = np.asarray(mappings[p][I], dtype=np.float64)
                na = len(tree.nodes[I.node].actions)
                if vec.shape != (na,):
                    raise ProfileError(f"infoset {I} needs {na} probabilities, got {vec.shape}")
                arr[tree.infoset_index(I), :na] = vec
            arrays.append(arr)
        profile = cls(tree, (arrays[0], arrays[1]))
        profile.validate()
        return profile

    @classmethod
    def uniform(cls, tree: GameTree) -> "Profile":
        arrays = []
        for p in (P1, P2):
            counts = tree.action_counts(p)
            cols = np.arange(tree.max_actions)
            arrays.append(np.where(cols < counts[:, None], 1.0 / counts[:, None], 0.0))
        return cls(tree, (arrays[0], arrays[1]))

    def validate(self, players: Sequence[int] = (P1, P2)) -> None:
        for p in players:
            arr = self.strategies[p]
            shape = (self.tree.infoset_count(p), self.tree.max_actions)
            if arr.shape != shape:
                raise ProfileError(f"player {p} strategy shape {arr.shape} != {shape}")
            counts = self.tree.action_counts(p)
            valid = np.arange(shape[1]) < counts[:, None]
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ProfileError(f"player {p} has negative or non-finite probabilities")
            if np.any(arr[~valid] != 0):
                raise ProfileError(f"player {p} puts mass on padding columns")
            if np.any(np.abs(arr.sum(axis=1) - 1.0) > DIST_TOL):
                raise ProfileError(f"player {p} has rows that do not sum to 1")


@dataclass(frozen=True)
class ExploitabilityReport:
    br_value_vs_p1: float
    br_value_vs_p2: float
    exploitability_milli: float


def _kernel_arrays(profile: Profile) -> list[np.ndarray]:
    return [np.ascontiguousarray(s, dtype=np.float64) for s in profile.strategies]


def value_vector(profile: Profile, player: int, *, best_response: bool,
                 node: PublicNode | int = 0, kernel=None) -> np.ndarray:
    """Per-card counterfactual values of ``player`` from ``node`` down."""
    kernel = kernel or _backend.kernel
    nid = node if isinstance(node, (int, np.integer)) else node.id
    tree = profile.tree
    return kernel.evaluate(tree.flat, nid, player, np.ones(tree.deck_size),
                           _kernel_arrays(profile), best_response)


def expected_value(tree: GameTree, profile: Profile, player: int) -> float:
    """Chips per hand won by ``player`` when both follow ``profile``."""
    _check_tree(tree, profile)
    profile.validate()
    return float(value_vector(profile, player, best_response=False).sum())


def best_response_value(tree: GameTree, profile: Profile, responder: int) -> float:
    """Chips per hand a best-responding ``responder`` wins against the opponent's
    strategy in ``profile``. The responder's own entries are ignored."""
    _check_tree(tree, profile)
    profile.validate(players=(1 - responder,))
    return float(value_vector(profile, responder, best_response=True).sum())


def best_response_action_values(tree: GameTree, profile: Profile, responder: int,
                                node: PublicNode | int) -> np.ndarray:
    """``(actions, cards)`` counterfactual values of each action at one of the
    responder's nodes, assuming best play below it."""
    nid = node if isinstance(node, (int, np.integer)) else node.id
    node = tree.nodes[nid]
    if node.is_terminal or node.player != responder:
        raise ValueError(f"node {nid} is not a decision node of player {responder}")
    # the responder's own reach factors out per card
    reach = _opponent_reach(tree, profile, nid, responder)
    arrays = _kernel_arrays(profile)
    return np.stack([_backend.kernel.evaluate(tree.flat, child, responder, reach, arrays, True)
                     for child in node.children])


def best_response_strategy(tree: GameTree, profile: Profile, responder: int) -> np.ndarray:
    """Pure best-response rows for ``responder``; ties go to the first action."""
    _check_tree(tree, profile)
    profile.validate(players=(1 - responder,))
    rows = np.zeros((tree.infoset_count(responder), tree.max_actions))
    n = tree.deck_size
    for nid in tree.decision_nodes(responder):
        best = np.argmax(best_response_action_values(tree, profile, responder, nid), axis=0)
        rows[tree.row_base(nid) + np.arange(n), best] = 1.0
    return rows


def _opponent_reach(tree: GameTree, profile: Profile, nid: int, responder: int) -> np.ndarray:
    path = []
    cur = nid
    parents = {c: n.id for n in tree.nodes for c in n.children}
    while cur in parents:
        par = parents[cur]
        path.append((par, tree.nodes[par].children.index(cur)))
        cur = par
    reach = np.ones(tree.deck_size)
    for par, a in path:
        node = tree.nodes[par]
        if node.player != responder:
            base = tree.row_base(node)
            reach = reach * profile.strategies[node.player][base:base + tree.deck_size, a]
    return reach


def exploitability(tree: GameTree, profile: Profile, kernel=None) -> ExploitabilityReport:
    """Mean of both players' best-response gains, in milli-chips per hand.

    With bet size 1 chip this is millibets per hand; an exact equilibrium
    scores 0.
    """
    _check_tree(tree, profile)
    profile.validate()
    vs_p1 = float(value_vector(profile, P2, best_response=True, kernel=kernel).sum())
    vs_p2 = float(value_vector(profile, P1, best_response=True, kernel=kernel).sum())
    return ExploitabilityReport(vs_p1, vs_p2, 1000.0 * (vs_p1 + vs_p2) / 2.0)


def _check_tree(tree: GameTree, profile: Profile) -> None:
    if profile.tree is tree:
        return
    if profile.tree.deck_size != tree.deck_size or profile.tree.rules_hash() != tree.rules_hash():
        raise ProfileError("profile was built for a different game")
