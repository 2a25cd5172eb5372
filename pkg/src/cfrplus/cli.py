"""Command-line driver: ``cfrplus solve | sweep | stats``.

Exit codes: 0 converged, 2 not converged, 64 usage error, 74 I/O error.
CSV goes to ``--output`` or stdout; summaries go to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, Sequence, TextIO

from . import _backend
from .evaluator import exploitability
from .game_tree import GameSpec, build_one_card_poker
from .solver import (SolverConfig, SolverState, Variant, average_profile, run_iterations,
                     solve_to_target)
from .table_stats import DEFAULT_QUANTIZER, stats

EXIT_CONVERGED = 0
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64
EXIT_IO = 74

SOLVE_HEADER = ["iteration", "exploitability_avg_milli", "exploitability_cur_milli"]
SWEEP_HEADER = ["deck_size", "variant", "profile", "iterations_to_target", "status"]
STATS_HEADER = ["iteration", "variant", "entries", "zero_fraction", "entropy_bits_per_entry"]

log = logging.getLogger("cfrplus")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _deck(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("deck size must be >= 2")
    return value


def parse_decks(text: str) -> list[int]:
    """``"4..32"`` (inclusive), ``"4,8,16"`` or a mix like ``"3,8..10"``."""
    decks: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(x) for x in part.split("..", 1))
            decks.extend(range(lo, hi + 1))
        else:
            decks.append(int(part))
    if not decks:
        raise argparse.ArgumentTypeError(f"empty deck range {text!r}")
    if min(decks) < 2:
        raise argparse.ArgumentTypeError("deck sizes must be >= 2")
    return sorted(set(decks))


def _decks_arg(text: str) -> list[int]:
    try:
        return parse_decks(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _variants_arg(text: str) -> list[Variant]:
    try:
        out = [Variant(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"variants must be among 'cfr', 'cfr+': {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("no variants given")
    return list(dict.fromkeys(out))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfrplus", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, max_iterations: int, probe: int) -> None:
        p.add_argument("--d", "--delay", dest="delay", type=_nonneg_int, default=0,
                       help="averaging delay in iterations (default 0)")
        p.add_argument("--probe-interval", type=_positive_int, default=probe)
        p.add_argument("--max-iterations", type=_nonneg_int, default=max_iterations)
        p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")

    solve = sub.add_parser("solve", help="solve one deck size and emit the convergence trace")
    solve.add_argument("--deck", type=_deck, required=True)
    solve.add_argument("--variant", type=Variant, choices=list(Variant), default=Variant.CFR_PLUS)
    solve.add_argument("--target-milli", type=_positive_float, default=1.0)
    solve.add_argument("--stop-on", choices=("average", "current"), default="average")
    solve.add_argument("--delay-vanilla", action="store_true",
                       help="apply the max(t-d,0) averaging weights to vanilla CFR too")
    solve.add_argument("--strategy-report", action="store_true",
                       help="print the final average strategy to stderr")
    common(solve, 100_000, 10)

    sweep = sub.add_parser("sweep", help="iterations-to-target over a range of deck sizes")
    sweep.add_argument("--decks", type=_decks_arg, default=parse_decks("4..32"))
    sweep.add_argument("--variants", type=_variants_arg, default=[Variant.VANILLA, Variant.CFR_PLUS])
    sweep.add_argument("--include-current", action="store_true",
                       help="also time the CFR+ current profile")
    sweep.add_argument("--target-milli", type=_positive_float, default=1.0)
    sweep.add_argument("--delay-vanilla", action="store_true")
    sweep.add_argument("--jobs", type=_positive_int, default=1)
    common(sweep, 100_000, 10)

    st = sub.add_parser("stats", help="zero fraction and entropy of regret tables, both variants")
    st.add_argument("--deck", type=_deck, required=True)
    st.add_argument("--quantizer", type=_positive_float, default=DEFAULT_QUANTIZER)
    common(st, 500, 10)
    return parser


@contextlib.contextmanager
def _open_output(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_solve(args: argparse.Namespace, out: TextIO) -> int:
    tree = build_one_card_poker(GameSpec(args.deck))
    config = SolverConfig(args.variant, args.delay, args.max_iterations, args.delay_vanilla)
    state = SolverState(tree, config)
    trace = solve_to_target(tree, config, args.target_milli, args.probe_interval,
                            stop_on=args.stop_on, state=state)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SOLVE_HEADER)
    for rec in trace.records:
        writer.writerow([rec.iteration, _fmt(rec.exploitability_avg_milli),
                         _fmt(rec.exploitability_cur_milli)])
    final = trace.final
    status = "converged" if trace.converged else "not converged"
    if final is None:
        print(f"{status}: no probes (max_iterations={config.max_iterations})", file=sys.stderr)
    else:
        print(f"{status}: deck={args.deck} variant={config.variant} "
              f"iterations={trace.iterations} "
              f"exploitability_avg_milli={final.exploitability_avg_milli:.6g} "
              f"exploitability_cur_milli={final.exploitability_cur_milli:.6g}", file=sys.stderr)
    if args.strategy_report:
        profile = average_profile(state)
        for player, mapping in enumerate(profile.to_mapping()):
            for infoset, vec in mapping.items():
                node = tree.nodes[infoset.node]
                probs = " ".join(f"{a}={p:.4f}" for a, p in zip(node.actions, vec))
                print(f"P{player + 1} history={node.history or '-'} card={infoset.card}: {probs}",
                      file=sys.stderr)
    return EXIT_CONVERGED if trace.converged else EXIT_NOT_CONVERGED


def _sweep_job(job: tuple) -> tuple[int, bool]:
    deck, variant, stop_on, delay, max_iterations, target, probe, delay_vanilla = job
    tree = build_one_card_poker(deck)
    config = SolverConfig(variant, delay, max_iterations, delay_vanilla)
    trace = solve_to_target(tree, config, target, probe, stop_on=stop_on)
    return trace.iterations, trace.converged


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    jobs = []
    for deck in args.decks:
        for variant in args.variants:
            jobs.append((deck, variant, "average"))
            if args.include_current and variant is Variant.CFR_PLUS:
                jobs.append((deck, variant, "current"))
    payloads = [(d, v, s, args.delay, args.max_iterations, args.target_milli,
                 args.probe_interval, args.delay_vanilla) for d, v, s in jobs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_job, payloads))
    else:
        results = [_sweep_job(p) for p in payloads]

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    all_converged = True
    for (deck, variant, stop_on), (iterations, converged) in zip(jobs, results):
        all_converged &= converged
        writer.writerow([deck, variant.value, stop_on, iterations,
                         "converged" if converged else "not_converged"])
    return EXIT_CONVERGED if all_converged else EXIT_NOT_CONVERGED


def cmd_stats(args: argparse.Namespace, out: TextIO) -> int:
    tree = build_one_card_poker(GameSpec(args.deck))
    states = {v: SolverState(tree, SolverConfig(v, args.delay, args.max_iterations))
              for v in (Variant.VANILLA, Variant.CFR_PLUS)}
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    if args.probe_interval > args.max_iterations:
        print(f"note: probe interval {args.probe_interval} exceeds max iterations "
              f"{args.max_iterations}; no probes taken", file=sys.stderr)
    probes = range(args.probe_interval, args.max_iterations + 1, args.probe_interval)
    for t in probes:
        for variant, state in states.items():
            run_iterations(state, t - state.iteration)
            s = stats(state.regrets, args.quantizer)
            writer.writerow([t, variant.value, s.entries, _fmt(s.zero_fraction),
                             _fmt(s.entropy_bits_per_entry)])
    for variant, state in states.items():
        final = stats(state.regrets, args.quantizer)
        avg = float("nan")
        if state.iteration:
            avg = exploitability(tree, average_profile(state)).exploitability_milli
        print(f"{variant}: iteration={state.iteration} zero_fraction={final.zero_fraction:.4f} "
              f"entropy_bits={final.entropy_bits_per_entry:.4f} "
              f"exploitability_avg_milli={avg:.6g}", file=sys.stderr)
    return EXIT_CONVERGED


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "stats": cmd_stats}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.debug("kernel backend: %s", _backend.name)
    command = COMMANDS[args.command]
    try:
        with _open_output(args.output) as fh:
            code = command(args, fh)
    except OSError as exc:
        print(f"cfrplus: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"cfrplus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
