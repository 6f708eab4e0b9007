"""Generalized cuckoo hashing with d >= 3 tables and labeled insertion.

Every cell (j, i) carries an integer label, initially 0.  Inserting x
always targets the cell with the smallest label among x's d candidates
(ties to the smallest table index).  A free target just takes the key; an
occupied target is overwritten with x after a mode-specific label update,
and the evicted key is re-inserted the same way:

* ``khosla``   - the overwritten cell's label becomes
  min over x's other candidate labels, plus one.  Labels then lower-bound
  the length of the shortest eviction path to a free cell.
* ``eppstein`` - the overwritten cell's label counts overwrites ("wear").

Insertion aborts once any label reaches the configured cap; construction
is then considered failed and callers redraw the hash functions.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .graphs import build, one_orientation

KHOSLA = "khosla"
EPPSTEIN = "eppstein"
_MODES = (KHOSLA, EPPSTEIN)


def default_label_cap(mode: str, n: int) -> int:
    """Abort thresholds: 4*log2(n) for khosla, log2(log2(n)) + 10 for
    eppstein.  Both are configurable on the table."""
    if n < 2:
        return 16
    if mode == KHOSLA:
        return math.ceil(4 * math.log2(n))
    if mode == EPPSTEIN:
        return math.ceil(math.log2(max(math.log2(n), 2.0)) + 10)
    raise ValueError(f"unknown mode {mode!r}")


class LabeledCuckooTable:
    """d tables of ``fam.m`` cells with per-cell occupant and label."""

    def __init__(self, fam, mode: str, label_cap: int | None = None, n_expected: int | None = None):
        if fam.d < 3:
            raise ValueError("labeled insertion is for d >= 3 tables")
        if mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if label_cap is None:
            if n_expected is None:
                raise ValueError("give either label_cap or n_expected")
            label_cap = default_label_cap(mode, n_expected)
        self.fam = fam
        self.d = fam.d
        self.m = fam.m
        self.mode = mode
        self.label_cap = label_cap
        self.cells: list[list[int | None]] = [[None] * fam.m for _ in range(fam.d)]
        self.labels = np.zeros((fam.d, fam.m), dtype=np.int64)
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def lookup(self, x: int) -> bool:
        h = self.fam.evaluate(x)
        return any(self.cells[j][h[j]] == x for j in range(self.d))

    def insert(self, x: int) -> bool:
        """Insert via argmin-label walking; False means the label cap was
        hit and the table needs a rehash."""
        if self.lookup(x):
            raise ValueError(f"duplicate insert of key {x}")
        cur = x
        h = self.fam.evaluate(cur)
        while True:
            labs = [int(self.labels[j, h[j]]) for j in range(self.d)]
            j = min(range(self.d), key=lambda i: labs[i])
            pos = h[j]
            victim = self.cells[j][pos]
            if victim is None:
                self.cells[j][pos] = cur
                self._count += 1
                return True
            if self.mode == KHOSLA:
                self.labels[j, pos] = min(labs[i] for i in range(self.d) if i != j) + 1
            else:
                self.labels[j, pos] += 1
            self.cells[j][pos] = cur
            if int(self.labels[j, pos]) >= self.label_cap:
                return False
            cur = victim
            h = self.fam.evaluate(cur)

    def max_label(self) -> int:
        return int(self.labels.max())

    def stored_keys(self) -> list[int]:
        return [k for table in self.cells for k in table if k is not None]

    def check_placement(self) -> None:
        """Every occupant must hash to its cell; no key stored twice."""
        keys = self.stored_keys()
        if len(keys) != len(set(keys)):
            raise AssertionError("a key is stored twice")
        for j in range(self.d):
            for i, k in enumerate(self.cells[j]):
                if k is not None and self.fam.evaluate(k)[j] != i:
                    raise AssertionError(f"misplaced key in table {j + 1}")


def allocation_free_distances(tbl: LabeledCuckooTable) -> np.ndarray:
    """Shortest eviction-path distance from each cell to a free cell.

    The allocation graph has one vertex per cell and an edge from the cell
    an occupant sits in to each of that occupant's d-1 alternative cells;
    free cells are at distance 0.  Unreachable cells get a large sentinel
    (graph size), which is effectively infinity."""
    d, m = tbl.d, tbl.m
    total = d * m
    dist = np.full(total, total, dtype=np.int64)
    # reverse adjacency: edges point occupant-cell -> alternative-cell, so
    # BFS from free cells walks edges backwards
    rev: list[list[int]] = [[] for _ in range(total)]
    queue: deque[int] = deque()
    for j in range(d):
        for i in range(m):
            k = tbl.cells[j][i]
            if k is None:
                v = j * m + i
                dist[v] = 0
                queue.append(v)
            else:
                h = tbl.fam.evaluate(k)
                u = j * m + i
                for j2 in range(d):
                    if j2 != j:
                        rev[j2 * m + h[j2]].append(u)
    while queue:
        v = queue.popleft()
        for u in rev[v]:
            if dist[u] > dist[v] + 1:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist.reshape(d, m)


def static_suitable(keys, fam) -> bool:
    """Does some placement of the key set exist under this draw?

    True iff the key hypergraph admits a peel-based 1-orientation, i.e.
    contains no complex component."""
    if fam.d < 3:
        raise ValueError("use the bipartite suitability check for d = 2")
    return one_orientation(build(fam, keys)) is not None
