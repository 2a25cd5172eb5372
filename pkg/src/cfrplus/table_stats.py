"""Table compressibility measurements and binary solver snapshots.

Snapshot layout (all integers little-endian)::

    magic      8 bytes  b"CFRPSNAP"
    version    u32
    deck_size  u32
    rules_hash 8 bytes
    iteration  u64
    then for player 1, player 2 and for regrets, averages:
        count  u64
        count  float64 (IEEE-754, little-endian), row-major
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .game_tree import P1, P2, GameTree, build_one_card_poker
from .regret_core import RegretTable, StrategyTable, _Table
from .solver import SolverConfig, SolverState

DEFAULT_QUANTIZER = 1e-6

MAGIC = b"CFRPSNAP"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sII8sQ")
_COUNT = struct.Struct("<Q")


@dataclass(frozen=True)
class TableStats:
    entries: int
    zero_fraction: float
    entropy_bits_per_entry: float


def _entries(table) -> np.ndarray:
    if isinstance(table, _Table):
        return table.entries()
    if isinstance(table, (list, tuple)) and table and isinstance(table[0], _Table):
        return np.concatenate([t.entries() for t in table])
    return np.asarray(table, dtype=np.float64).ravel()


def stats(table, quantizer: float = DEFAULT_QUANTIZER) -> TableStats:
    """Zero fraction and order-0 entropy of a table's entries.

    ``table`` may be a regret/strategy table, a list of them (pooled), or
    any array of values. Zeros are counted before quantization.
    """
    if not quantizer > 0:
        raise ValueError(f"quantizer must be positive, got {quantizer}")
    values = _entries(table)
    n = values.size
    if n == 0:
        return TableStats(0, 0.0, 0.0)
    zero_fraction = float(np.count_nonzero(values == 0.0)) / n
    _, counts = np.unique(np.round(values / quantizer), return_counts=True)
    p = counts / n
    entropy = float(-(p * np.log2(p)).sum())
    return TableStats(n, zero_fraction, max(entropy, 0.0))


class SnapshotError(ValueError):
    pass


class SnapshotTruncatedError(SnapshotError):
    pass


class SnapshotVersionError(SnapshotError):
    pass


class SnapshotGameMismatchError(SnapshotError):
    pass


def snapshot(state: SolverState) -> bytes:
    tree = state.tree
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, tree.deck_size, tree.rules_hash(),
                          state.iteration)]
    for p in (P1, P2):
        for table in (state.regrets[p], state.averages[p]):
            values = np.ascontiguousarray(table.values, dtype="<f8")
            parts.append(_COUNT.pack(values.size))
            parts.append(values.tobytes())
    return b"".join(parts)


def restore(data: bytes, config: SolverConfig | None = None,
            tree: GameTree | None = None) -> SolverState:
    """Decode a snapshot. Pass ``tree`` to share an existing tree object."""
    view = memoryview(data)
    if len(view) < _HEADER.size:
        raise SnapshotTruncatedError(f"header needs {_HEADER.size} bytes, got {len(view)}")
    magic, version, deck_size, rules, iteration = _HEADER.unpack_from(view, 0)
    if magic != MAGIC:
        raise SnapshotError("not a solver snapshot (bad magic)")
    if version != FORMAT_VERSION:
        raise SnapshotVersionError(f"snapshot version {version}, expected {FORMAT_VERSION}")
    if tree is None:
        if deck_size < 2:
            raise SnapshotGameMismatchError(f"invalid deck size {deck_size}")
        tree = build_one_card_poker(deck_size)
    if tree.deck_size != deck_size or tree.rules_hash() != rules:
        raise SnapshotGameMismatchError(
            f"snapshot is for deck {deck_size}, tree is deck {tree.deck_size}")

    offset = _HEADER.size
    tables: dict[tuple[int, type], _Table] = {}
    for p in (P1, P2):
        for cls in (RegretTable, StrategyTable):
            if len(view) < offset + _COUNT.size:
                raise SnapshotTruncatedError(f"stream ends inside player {p + 1} table header")
            (count,) = _COUNT.unpack_from(view, offset)
            offset += _COUNT.size
            shape = (tree.infoset_count(p), tree.max_actions)
            if count != shape[0] * shape[1]:
                raise SnapshotGameMismatchError(
                    f"player {p + 1} table has {count} entries, expected {shape[0] * shape[1]}")
            end = offset + 8 * count
            if len(view) < end:
                raise SnapshotTruncatedError(
                    f"player {p + 1} table needs {8 * count} bytes, {len(view) - offset} left")
            values = np.frombuffer(view[offset:end], dtype="<f8").astype(np.float64).reshape(shape)
            tables[p, cls] = cls(tree, p, values)
            offset = end
    if offset != len(view):
        raise SnapshotError(f"{len(view) - offset} trailing bytes after snapshot")
    return SolverState(tree, config or SolverConfig(),
                       [tables[P1, RegretTable], tables[P2, RegretTable]],
                       [tables[P1, StrategyTable], tables[P2, StrategyTable]],
                       int(iteration))
