"""Public game tree for the one-card poker family.

The private deal is never materialized as chance nodes. Every traversal
carries one entry per private card, and the deal probabilities
``1/N`` and ``1/(N-1)`` are folded into :func:`terminal_utility`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

P1 = 0
P2 = 1
PLAYERS = (P1, P2)

ANTE = 1
BET_SIZE = 1


class NodeKind(enum.IntEnum):
    DECISION = 0
    FOLD = 1
    SHOWDOWN = 2


@dataclass(frozen=True)
class GameSpec:
    deck_size: int
    ante: int = ANTE
    bet_size: int = BET_SIZE

    def __post_init__(self) -> None:
        if not isinstance(self.deck_size, (int, np.integer)) or self.deck_size < 2:
            raise ValueError(f"deck_size must be an integer >= 2, got {self.deck_size!r}")
        if self.ante != ANTE or self.bet_size != BET_SIZE:
            raise ValueError("only ante=1 and bet_size=1 are supported")


@dataclass(frozen=True)
class PublicNode:
    """One node of the public betting tree.

    ``winner`` is set only for fold terminals. ``contributions`` holds the
    chips each player has committed (ante included) and is meaningful for
    terminals only.
    """

    id: int
    kind: NodeKind
    history: str
    player: int = -1
    actions: tuple[str, ...] = ()
    children: tuple[int, ...] = ()
    contributions: tuple[int, int] = (ANTE, ANTE)
    winner: int = -1

    @property
    def is_terminal(self) -> bool:
        return self.kind != NodeKind.DECISION


class InfosetId(NamedTuple):
    player: int
    node: int
    card: int


# Betting grammar: (history, acting player, actions). Child histories append
# the first letter of the action: c(heck), b(et), f(old), k = call.
_GRAMMAR = {
    "": (P1, ("check", "bet")),
    "c": (P2, ("check", "bet")),
    "b": (P2, ("fold", "call")),
    "cb": (P1, ("fold", "call")),
}
_SYMBOL = {"check": "c", "bet": "b", "fold": "f", "call": "k"}


class GameTree:
    """Immutable public tree plus per-player infoset indexing.

    Each player's decision nodes get consecutive slots in creation order; the
    infoset ``(player, node, card)`` maps to the dense row
    ``slot * deck_size + card - 1`` of that player's tables.
    """

    def __init__(self, spec: GameSpec) -> None:
        self.spec = spec
        self.deck_size = spec.deck_size
        nodes: list[PublicNode] = []
        self._build("", [ANTE, ANTE], nodes)
        self.nodes: tuple[PublicNode, ...] = tuple(nodes)
        self.root = self.nodes[0]

        slots: list[list[int]] = [[], []]
        for node in self.nodes:
            if node.kind == NodeKind.DECISION:
                slots[node.player].append(node.id)
        self._slot_nodes = tuple(tuple(s) for s in slots)
        self._slot_of = {nid: k for s in slots for k, nid in enumerate(s)}
        self.max_actions = max(len(n.actions) for n in self.nodes if not n.is_terminal)
        self._action_counts = tuple(
            np.repeat(np.asarray([len(self.nodes[nid].actions) for nid in s], dtype=np.intp),
                      self.deck_size)
            for s in self._slot_nodes)
        for counts in self._action_counts:
            counts.setflags(write=False)
        self._flat = _flatten(self)

    def _build(self, history: str, contrib: list[int], out: list[PublicNode]) -> int:
        nid = len(out)
        out.append(None)  # type: ignore[arg-type]  # reserve id, preorder numbering
        if history in _GRAMMAR:
            player, actions = _GRAMMAR[history]
            children = []
            for action in actions:
                c = list(contrib)
                if action == "bet":
                    c[player] += BET_SIZE
                elif action == "call":
                    c[player] = c[1 - player]
                children.append(self._build(history + _SYMBOL[action], c, out))
            node = PublicNode(nid, NodeKind.DECISION, history, player, actions, tuple(children))
        elif history.endswith("f"):
            folder = _GRAMMAR[history[:-1]][0]
            node = PublicNode(nid, NodeKind.FOLD, history, contributions=tuple(contrib),
                              winner=1 - folder)
        else:
            node = PublicNode(nid, NodeKind.SHOWDOWN, history, contributions=tuple(contrib))
        out[nid] = node
        return nid

    # -- indexing -----------------------------------------------------------

    def decision_nodes(self, player: int) -> tuple[int, ...]:
        return self._slot_nodes[player]

    def infoset_count(self, player: int) -> int:
        return len(self._slot_nodes[player]) * self.deck_size

    def infoset_index(self, infoset: InfosetId) -> int:
        player, nid, card = infoset
        node = self.nodes[nid]
        if node.is_terminal or node.player != player:
            raise KeyError(f"no infoset for player {player} at node {nid}")
        if not 1 <= card <= self.deck_size:
            raise KeyError(f"card {card} outside [1, {self.deck_size}]")
        return self._slot_of[nid] * self.deck_size + card - 1

    def infoset_at(self, player: int, index: int) -> InfosetId:
        if not 0 <= index < self.infoset_count(player):
            raise IndexError(index)
        slot, c = divmod(index, self.deck_size)
        return InfosetId(player, self._slot_nodes[player][slot], c + 1)

    def infosets(self, player: int) -> list[InfosetId]:
        return [self.infoset_at(player, k) for k in range(self.infoset_count(player))]

    def row_base(self, node: PublicNode | int) -> int:
        nid = node if isinstance(node, (int, np.integer)) else node.id
        return self._slot_of[nid] * self.deck_size

    def action_counts(self, player: int) -> np.ndarray:
        """Number of legal actions for every table row of ``player``."""
        return self._action_counts[player]

    @property
    def flat(self) -> "FlatTree":
        return self._flat

    def rules_hash(self) -> bytes:
        """Stable 8-byte hash of the betting rules (deck size excluded)."""
        import hashlib

        h = hashlib.sha256()
        for n in self.nodes:
            h.update(repr((n.kind.value, n.history, n.player, n.actions, n.children,
                           n.contributions, n.winner)).encode())
        return h.digest()[:8]

    def __repr__(self) -> str:
        return f"GameTree(deck_size={self.deck_size}, nodes={len(self.nodes)})"


@dataclass(frozen=True)
class FlatTree:
    """Array form of a :class:`GameTree` consumed by the traversal kernels."""

    deck_size: int
    kind: np.ndarray
    player: np.ndarray
    child_start: np.ndarray
    n_actions: np.ndarray
    children: np.ndarray
    row_base: np.ndarray
    contrib: np.ndarray = field(repr=False)
    winner: np.ndarray = field(repr=False)
    depth: int = 0


def _flatten(tree: GameTree) -> FlatTree:
    n = len(tree.nodes)
    kind = np.zeros(n, dtype=np.intp)
    player = np.full(n, -1, dtype=np.intp)
    child_start = np.zeros(n, dtype=np.intp)
    n_actions = np.zeros(n, dtype=np.intp)
    row_base = np.zeros(n, dtype=np.intp)
    contrib = np.zeros((n, 2), dtype=np.float64)
    winner = np.full(n, -1, dtype=np.intp)
    children: list[int] = []
    for node in tree.nodes:
        kind[node.id] = int(node.kind)
        player[node.id] = node.player
        winner[node.id] = node.winner
        contrib[node.id] = node.contributions
        if node.kind == NodeKind.DECISION:
            child_start[node.id] = len(children)
            n_actions[node.id] = len(node.children)
            children.extend(node.children)
            row_base[node.id] = tree.row_base(node)

    def depth(nid: int) -> int:
        node = tree.nodes[nid]
        return 1 + max((depth(c) for c in node.children), default=0)

    return FlatTree(tree.deck_size, kind, player, child_start, n_actions,
                    np.asarray(children, dtype=np.intp), row_base, contrib, winner, depth(0))


def build_one_card_poker(spec: GameSpec | int) -> GameTree:
    if not isinstance(spec, GameSpec):
        spec = GameSpec(int(spec))
    return GameTree(spec)


def lookup_infosets(tree: GameTree, node: PublicNode | int) -> list[InfosetId]:
    """Infosets of the acting player at ``node``, one per card, ordered by rank."""
    if isinstance(node, (int, np.integer)):
        node = tree.nodes[node]
    if node.is_terminal:
        raise ValueError(f"node {node.id} ({node.history!r}) is terminal")
    return [InfosetId(node.player, node.id, c) for c in range(1, tree.deck_size + 1)]


def payoff(node: PublicNode, player: int, card: int, opp_card: int) -> float:
    """Chips won by ``player`` holding ``card`` against ``opp_card`` at a terminal."""
    if not node.is_terminal:
        raise ValueError(f"node {node.id} is not terminal")
    if card == opp_card:
        raise ValueError("cards must be distinct")
    if node.kind == NodeKind.FOLD:
        win = node.winner == player
    else:
        win = card > opp_card
    return float(node.contributions[1 - player] if win else -node.contributions[player])


def terminal_utility(tree: GameTree, node: PublicNode | int, traverser: int,
                     opp_reach: Sequence[float] | np.ndarray) -> np.ndarray:
    """Chance- and reach-weighted payoff per traverser card at a terminal node.

    Runs in O(N) with running sums over the rank order; opponent card equal
    to the traverser's card is excluded.
    """
    if isinstance(node, (int, np.integer)):
        node = tree.nodes[node]
    if not node.is_terminal:
        raise ValueError(f"node {node.id} ({node.history!r}) is not terminal")
    reach = np.asarray(opp_reach, dtype=np.float64)
    if reach.shape != (tree.deck_size,):
        raise ValueError(f"opp_reach must have length {tree.deck_size}")
    if np.any(reach < 0):
        raise ValueError("opp_reach entries must be nonnegative")
    return _terminal_utility(node.kind, node.contributions, node.winner, traverser, reach)


def _terminal_utility(kind: int, contributions, winner: int, traverser: int,
                      reach: np.ndarray) -> np.ndarray:
    n = reach.shape[0]
    scale = 1.0 / (n * (n - 1))
    own = float(contributions[traverser])
    opp = float(contributions[1 - traverser])
    running = np.cumsum(reach)
    below = np.concatenate(([0.0], running[:-1]))  # mass on strictly lower ranks
    total = running[-1]
    if kind == NodeKind.FOLD:
        amount = opp if winner == traverser else -own
        return scale * amount * (total - reach)
    above = total - below - reach
    return scale * (opp * below - own * above)
