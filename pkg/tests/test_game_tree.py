import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfrplus.game_tree import (P1, P2, GameSpec, InfosetId, NodeKind, build_one_card_poker,
                               lookup_infosets, payoff, terminal_utility)

from oracles import p1_payoff


def node_by_history(tree, history):
    return next(n for n in tree.nodes if n.history == history)


class TestBuild:
    def test_betting_structure(self, deck3):
        decisions = {n.history: n for n in deck3.nodes if n.kind == NodeKind.DECISION}
        assert set(decisions) == {"", "c", "b", "cb"}
        assert decisions[""].player == P1 and decisions[""].actions == ("check", "bet")
        assert decisions["c"].player == P2 and decisions["c"].actions == ("check", "bet")
        assert decisions["b"].player == P2 and decisions["b"].actions == ("fold", "call")
        assert decisions["cb"].player == P1 and decisions["cb"].actions == ("fold", "call")
        terminals = {n.history: n.kind for n in deck3.nodes if n.is_terminal}
        assert terminals == {"cc": NodeKind.SHOWDOWN, "cbf": NodeKind.FOLD,
                             "cbk": NodeKind.SHOWDOWN, "bf": NodeKind.FOLD,
                             "bk": NodeKind.SHOWDOWN}

    def test_node_invariants(self, deck3):
        for node in deck3.nodes:
            if node.is_terminal:
                assert node.children == ()
                assert min(node.contributions) >= 1
            else:
                assert len(node.actions) >= 2
                assert len(node.children) == len(node.actions)

    @pytest.mark.parametrize("deck, per_player", [(2, 4), (3, 6), (10, 20)])
    def test_infoset_counts(self, deck, per_player):
        tree = build_one_card_poker(deck)
        assert tree.infoset_count(P1) == per_player
        assert tree.infoset_count(P2) == per_player
        assert sum(not n.is_terminal for n in tree.nodes) == 4
        assert sum(n.is_terminal for n in tree.nodes) == 5

    @pytest.mark.parametrize("deck", [1, 0, -3])
    def test_rejects_small_deck(self, deck):
        with pytest.raises(ValueError):
            build_one_card_poker(deck)
        with pytest.raises(ValueError):
            GameSpec(deck)

    def test_index_bijection(self):
        tree = build_one_card_poker(7)
        for p in (P1, P2):
            seen = set()
            for k in range(tree.infoset_count(p)):
                I = tree.infoset_at(p, k)
                assert tree.infoset_index(I) == k
                seen.add(I)
            assert len(seen) == tree.infoset_count(p)

    def test_infoset_exists_only_for_actor(self, deck3):
        root = deck3.root
        with pytest.raises(KeyError):
            deck3.infoset_index(InfosetId(P2, root.id, 1))
        with pytest.raises(KeyError):
            deck3.infoset_index(InfosetId(P1, root.id, 4))


class TestLookupInfosets:
    def test_root_deck3(self, deck3):
        assert lookup_infosets(deck3, deck3.root) == [
            InfosetId(P1, deck3.root.id, 1), InfosetId(P1, deck3.root.id, 2),
            InfosetId(P1, deck3.root.id, 3)]

    def test_after_bet_deck2(self):
        tree = build_one_card_poker(2)
        node = node_by_history(tree, "b")
        infosets = lookup_infosets(tree, node)
        assert len(infosets) == 2
        assert all(I.player == P2 for I in infosets)

    def test_terminal_rejected(self, deck3):
        for node in deck3.nodes:
            if node.is_terminal:
                with pytest.raises(ValueError):
                    lookup_infosets(deck3, node)


class TestTerminalUtility:
    def test_check_check_showdown(self, deck3):
        u = terminal_utility(deck3, node_by_history(deck3, "cc"), P1, [1, 1, 1])
        np.testing.assert_allclose(u, [-1 / 3, 0, 1 / 3], atol=1e-15)

    def test_fold_after_bet(self, deck3):
        u = terminal_utility(deck3, node_by_history(deck3, "bf"), P1, [1, 1, 1])
        np.testing.assert_allclose(u, [1 / 3] * 3, atol=1e-15)

    def test_zero_reach(self, deck3):
        for node in deck3.nodes:
            if node.is_terminal:
                for p in (P1, P2):
                    assert not terminal_utility(deck3, node, p, np.zeros(3)).any()

    def test_rejects_decision_node(self, deck3):
        with pytest.raises(ValueError):
            terminal_utility(deck3, deck3.root, P1, np.ones(3))

    @given(deck=st.integers(2, 9), data=st.data())
    def test_matches_enumeration(self, deck, data):
        tree = build_one_card_poker(deck)
        reach = np.array(data.draw(st.lists(st.floats(0, 1), min_size=deck, max_size=deck)))
        for node in tree.nodes:
            if not node.is_terminal:
                continue
            for p in (P1, P2):
                u = terminal_utility(tree, node, p, reach)
                for c in range(1, deck + 1):
                    expect = 0.0
                    for o in range(1, deck + 1):
                        if o == c:
                            continue  # card removal
                        v = p1_payoff(node.history, c, o) if p == P1 else -p1_payoff(node.history, o, c)
                        expect += reach[o - 1] * v / (deck * (deck - 1))
                    assert u[c - 1] == pytest.approx(expect, abs=1e-12)

    def test_zero_sum_per_deal(self):
        tree = build_one_card_poker(5)
        for node in tree.nodes:
            if node.is_terminal:
                for c in range(1, 6):
                    for o in range(1, 6):
                        if c != o:
                            assert payoff(node, P1, c, o) == -payoff(node, P2, o, c)

    def test_showdown_sums_to_zero(self):
        tree = build_one_card_poker(6)
        for history in ("cc", "bk", "cbk"):
            u = terminal_utility(tree, node_by_history(tree, history), P1, np.ones(6))
            assert u.sum() == pytest.approx(0.0, abs=1e-15)
