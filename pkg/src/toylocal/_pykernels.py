"""Pure-Python kernels. Reference behaviour for ``_ckernels``.

Both modules expose the same functions with the same return values; the
compiled one is preferred at import (see ``toylocal.kernels``).
"""

from __future__ import annotations

import numpy as np

from toylocal.rng import GAMMA, MASK64, derive_key, mix64

COLUMN_OK = 0
DUPLICATE_ROW = 1
SINGLE_VALUED = 2
BELOW_QUARTER = 3

TABLE_OK = 0
TABLE_OVERLAP = 1
TABLE_MISSING = 2

TELEPORT_FIELDS = ("x", "pair_outcome", "y", "alice_outcome", "p1_post", "p2_post", "final3")


def encode_rows(rows) -> np.ndarray:
    """Base-4 codes, first particle most significant."""
    out = []
    for row in np.asarray(rows, dtype=np.int64).tolist():
        c = 0
        for v in row:
            c = c * 4 + v
        out.append(c)
    return np.asarray(out, dtype=np.int64)


def column_check(rows) -> tuple[int, int]:
    """First violation of the outcome-set rules in an ``(L, N)`` array.

    Returns ``(status, index)``; ``index`` is the offending row for
    ``DUPLICATE_ROW`` and the 0-based column otherwise.
    """
    data = np.asarray(rows, dtype=np.int64).tolist()
    seen = set()
    for i, row in enumerate(data):
        key = tuple(row)
        if key in seen:
            return DUPLICATE_ROW, i
        seen.add(key)
    n_rows = len(data)
    n_cols = len(data[0]) if data else 0
    for col in range(n_cols):
        counts = [0, 0, 0, 0]
        for row in data:
            counts[row[col]] += 1
        present = [c for c in counts if c]
        if len(present) < 2:
            return SINGLE_VALUED, col
        for c in present:
            if 4 * c < n_rows:
                return BELOW_QUARTER, col
    return COLUMN_OK, -1


def outcome_table(codes, labels, n_states: int):
    """Map every state code to its outcome label.

    Returns ``(table, status, code, first_label, second_label)``. On overlap
    ``code`` is the shared state and the labels are the two outcomes that
    claim it; on a gap ``code`` is the smallest uncovered state.
    """
    table = [-1] * n_states
    for c, lab in zip(np.asarray(codes).tolist(), np.asarray(labels).tolist()):
        prev = table[c]
        if prev != -1:
            return np.asarray(table, dtype=np.int64), TABLE_OVERLAP, c, prev, lab
        table[c] = lab
    for c, lab in enumerate(table):
        if lab == -1:
            return np.asarray(table, dtype=np.int64), TABLE_MISSING, c, -1, -1
    return np.asarray(table, dtype=np.int64), TABLE_OK, -1, -1, -1


def _randbelow(key: int, counter: int, n: int) -> tuple[int, int]:
    limit = (1 << 64) - ((1 << 64) % n)
    while True:
        counter += 1
        v = mix64((key + counter * GAMMA) & MASK64)
        if v < limit:
            return v % n, counter


def teleport_batch(key: int, trials: int) -> np.ndarray:
    """Ontic trace of ``trials`` teleportation runs, one row per trial.

    Mirrors the draw order of ``bell.teleport_stats``: trial ``i`` uses child
    stream ``i`` and draws x, the pair's initial state (two values), the pair
    measurement's row, then Alice's row.
    """
    out = np.empty((trials, len(TELEPORT_FIELDS)), dtype=np.int8)
    for i in range(trials):
        k = derive_key(key, i)
        ctr = 0
        x, ctr = _randbelow(k, ctr, 4)
        a, ctr = _randbelow(k, ctr, 4)
        b, ctr = _randbelow(k, ctr, 4)
        pair_r = (a - b) % 4
        y, ctr = _randbelow(k, ctr, 4)
        # after normalisation particle 3 holds y as well
        r = (x - y) % 4
        row, ctr = _randbelow(k, ctr, 4)
        out[i] = (x, pair_r, y, r, row, (row - r) % 4, (y + r) % 4)
    return out
