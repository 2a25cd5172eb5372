import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cfrplus import _backend  # noqa: E402
from cfrplus.evaluator import Profile  # noqa: E402
from cfrplus.game_tree import InfosetId, build_one_card_poker  # noqa: E402

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture(params=["python", "compiled"])
def kernel(request):
    if request.param not in _backend.BACKENDS:
        pytest.skip("compiled kernel not built")
    return _backend.BACKENDS[request.param]


@pytest.fixture
def deck3():
    return build_one_card_poker(3)


def profile_from_oracle(tree, sigma) -> Profile:
    """Build a Profile from history-keyed dicts as used in tests/oracles.py."""
    mappings = []
    for p in (0, 1):
        m = {}
        for I in tree.infosets(p):
            m[I] = [float(x) for x in sigma[p][(tree.nodes[I.node].history, I.card)]]
        mappings.append(m)
    return Profile.from_mapping(tree, mappings)


def random_profile(tree, rng, pure_fraction=0.2) -> Profile:
    arrays = []
    for p in (0, 1):
        rows = rng.dirichlet(np.ones(tree.max_actions), size=tree.infoset_count(p))
        pure = rng.random(len(rows)) < pure_fraction
        rows[pure] = np.eye(tree.max_actions)[rng.integers(0, tree.max_actions, pure.sum())]
        arrays.append(rows)
    return Profile(tree, (arrays[0], arrays[1]))


__all__ = ["InfosetId", "profile_from_oracle", "random_profile"]
