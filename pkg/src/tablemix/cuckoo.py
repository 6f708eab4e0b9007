"""Two-table cuckoo hashing with a bounded stash.

A key x lives in t1[h_1(x)], t2[h_2(x)], or the stash.  Insertion runs the
classic single-chain eviction walk, alternating tables; when the walk
exhausts its budget the carried key is parked in the stash, and if the
stash is full the caller is asked to rehash (redraw the family and
rebuild).  Whether a whole key set fits for a given stash size is decided
statically by the excess of its graph.
"""

from __future__ import annotations

import enum
import math

from .graphs import build, excess


class InsertResult(enum.Enum):
    PLACED = "placed"
    PLACED_VIA_STASH = "placed_via_stash"
    REHASH_NEEDED = "rehash_needed"


class CuckooTable:
    """Two tables of ``fam.m`` cells plus a stash of ``stash_size`` slots.

    Single-writer: interleave mutations from one thread only; lookups
    between mutations are safe.
    """

    def __init__(self, fam, stash_size: int = 0, max_loop: int | None = None):
        if fam.d != 2:
            raise ValueError("cuckoo table needs a hash source with d = 2")
        if stash_size < 0:
            raise ValueError("stash_size must be nonnegative")
        self.fam = fam
        self.m = fam.m
        self.stash_size = stash_size
        self.max_loop = max_loop
        self.t1: list[int | None] = [None] * fam.m
        self.t2: list[int | None] = [None] * fam.m
        self.stash: list[int] = []
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def _budget(self) -> int:
        if self.max_loop is not None:
            return self.max_loop
        # 3 * log_{1+eps} n + 16 with eps floored away from zero
        n = self._count + 1
        eps = max(2 * self.m / n - 1, 0.01)
        return math.ceil(3 * math.log(max(n, 2)) / math.log(1 + eps)) + 16

    def lookup(self, x: int) -> bool:
        h1, h2 = self.fam.evaluate(x)
        return self.t1[h1] == x or self.t2[h2] == x or x in self.stash

    def insert(self, x: int) -> InsertResult:
        if self.lookup(x):
            raise ValueError(f"duplicate insert of key {x}")
        cur = x
        table = 1
        path: list[tuple[list, int]] = []
        for _ in range(self._budget() + 1):
            h1, h2 = self.fam.evaluate(cur)
            slot, pos = (self.t1, h1) if table == 1 else (self.t2, h2)
            victim = slot[pos]
            slot[pos] = cur
            path.append((slot, pos))
            if victim is None:
                self._count += 1
                return InsertResult.PLACED
            cur = victim
            table = 2 if table == 1 else 1
        if len(self.stash) < self.stash_size:
            self.stash.append(cur)
            self._count += 1
            return InsertResult.PLACED_VIA_STASH
        # walk failed: swap the chain back so the table is untouched
        for slot, pos in reversed(path):
            cur, slot[pos] = slot[pos], cur
        return InsertResult.REHASH_NEEDED

    def remove(self, x: int) -> bool:
        h1, h2 = self.fam.evaluate(x)
        if self.t1[h1] == x:
            self.t1[h1] = None
        elif self.t2[h2] == x:
            self.t2[h2] = None
        elif x in self.stash:
            self.stash.remove(x)
        else:
            return False
        self._count -= 1
        return True

    def stored_keys(self) -> list[int]:
        keys = [k for k in self.t1 if k is not None]
        keys += [k for k in self.t2 if k is not None]
        keys += self.stash
        return keys

    def check_invariants(self) -> None:
        """Full-scan check of the placement invariant; raises on violation."""
        keys = self.stored_keys()
        if len(keys) != len(set(keys)):
            raise AssertionError("a key is stored twice")
        if len(self.stash) > self.stash_size:
            raise AssertionError("stash over capacity")
        for i, k in enumerate(self.t1):
            if k is not None and self.fam.evaluate(k)[0] != i:
                raise AssertionError("misplaced key in table 1")
        for i, k in enumerate(self.t2):
            if k is not None and self.fam.evaluate(k)[1] != i:
                raise AssertionError("misplaced key in table 2")


def suitable(keys, fam, stash_size: int = 0) -> bool:
    """Can the key set be stored under this draw with a stash of the given
    size?  Decided structurally: the excess of the key graph must not
    exceed the stash capacity."""
    if fam.d != 2:
        raise ValueError("suitability check needs a hash source with d = 2")
    return excess(build(fam, keys)) <= stash_size
