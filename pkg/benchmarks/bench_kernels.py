"""Compare the compiled and numpy traversal kernels.

    python benchmarks/bench_kernels.py --decks 4,16,64 --iterations 200

Reports microseconds per CFR iteration and per exploitability evaluation
for each backend, plus the speedup of the compiled kernel.
"""

from __future__ import annotations

import argparse
import time

from cfrplus import _backend
from cfrplus.cli import parse_decks
from cfrplus.evaluator import exploitability
from cfrplus.game_tree import build_one_card_poker
from cfrplus.solver import SolverConfig, Variant, average_profile, new_state, run_iterations


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(deck: int, iterations: int, repeat: int, kernel) -> tuple[float, float]:
    tree = build_one_card_poker(deck)
    config = SolverConfig(Variant.CFR_PLUS, 0)

    def iterate():
        run_iterations(new_state(tree, config), iterations, kernel=kernel)

    state = new_state(tree, config)
    run_iterations(state, 10, kernel=kernel)
    profile = average_profile(state)

    def evaluate():
        for _ in range(iterations):
            exploitability(tree, profile, kernel)

    return (_time(iterate, repeat) / iterations * 1e6, _time(evaluate, repeat) / iterations * 1e6)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--decks", type=parse_decks, default=parse_decks("4,16,64,256"))
    parser.add_argument("--iterations", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    names = list(_backend.BACKENDS)
    print(f"backends available: {', '.join(names)} (default: {_backend.name})")
    header = f"{'deck':>5} {'backend':>9} {'us/iteration':>13} {'us/exploit':>11}"
    print(header)
    print("-" * len(header))
    for deck in args.decks:
        rows = {name: bench(deck, args.iterations, args.repeat, _backend.BACKENDS[name])
                for name in names}
        for name, (it, ev) in rows.items():
            print(f"{deck:>5} {name:>9} {it:>13.1f} {ev:>11.1f}")
        if "compiled" in rows:
            (pi, pe), (ci, ce) = rows["python"], rows["compiled"]
            print(f"{deck:>5} {'speedup':>9} {pi / ci:>12.1f}x {pe / ce:>10.1f}x")


if __name__ == "__main__":
    main()
