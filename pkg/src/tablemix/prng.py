"""Seedable counter-based random source used throughout the package.

The generator is a SplitMix-style 64-bit counter mix: every output is a
scramble of (seed, counter).  State is just a counter, so streams can be
forked cheaply (``child``) and bulk draws can be produced with numpy while
consuming the stream exactly as repeated scalar draws would.  It is built
for reproducibility and splittability, not cryptographic strength.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_CHILD_SALT = 0xD1B54A32D192ED03
_ORACLE_SALT = 0x8CB92BA72F3D8DD7


def mix64(value: int) -> int:
    """SplitMix64 finalizer: a fixed bijective scramble of a 64-bit value."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array."""
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class Prng:
    """Deterministic stream of 64-bit values derived from (seed, counter).

    Identical seeds produce identical streams.  ``child(i)`` streams for
    distinct ``i`` are pairwise distinct deterministic functions of
    (seed, i).  A ``Prng`` is single-owner: share randomness across workers
    by handing each worker its own child stream.
    """

    __slots__ = ("_seed", "_counter")

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._counter = 0

    def next_u64(self) -> int:
        self._counter += 1
        return mix64((self._seed + self._counter * _GOLDEN) & _MASK64)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), exact via rejection sampling."""
        if bound < 1 or bound > (1 << 64):
            raise ValueError(f"bound must be in [1, 2**64], got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound

    def integers(self, bound: int, size: int) -> np.ndarray:
        """Array of ``size`` draws below ``bound``.

        Consumes the stream exactly as ``size`` repeated :meth:`below`
        calls would, so scalar and bulk callers stay interchangeable.
        """
        if bound < 1 or bound > (1 << 64):
            raise ValueError(f"bound must be in [1, 2**64], got {bound}")
        if size < 0:
            raise ValueError("size must be nonnegative")
        if size < 64:
            return np.array([self.below(bound) for _ in range(size)], dtype=np.uint64)
        limit = (1 << 64) - ((1 << 64) % bound)
        limit_v = np.uint64(limit - 1) if limit == (1 << 64) else np.uint64(limit)
        # rejection acceptance rate is always >= 1/2, slack of ~1/16 + retry
        out = np.empty(size, dtype=np.uint64)
        filled = 0
        while filled < size:
            need = size - filled
            chunk = need + (need >> 4) + 16
            start = self._counter + 1
            counters = np.arange(start, start + chunk, dtype=np.uint64)
            vals = _mix64_vec(np.uint64(self._seed) + counters * np.uint64(_GOLDEN))
            if limit == (1 << 64):
                mask = np.ones(chunk, dtype=bool)
            else:
                mask = vals < limit_v
            hits = np.nonzero(mask)[0]
            take = min(need, hits.size)
            if take:
                accepted = vals[hits[:take]]
                if bound != (1 << 64):
                    accepted = accepted % np.uint64(bound)
                out[filled : filled + take] = accepted
                self._counter = start + int(hits[take - 1])
                filled += take
            else:
                self._counter = start + chunk - 1
        return out

    def child(self, index: int) -> "Prng":
        """Fork a deterministic sub-stream; distinct indices never collide."""
        if index < 0:
            raise ValueError("child index must be nonnegative")
        return Prng(mix64(((self._seed ^ _CHILD_SALT) + (index + 1) * _GOLDEN) & _MASK64))


class RandomOracle:
    """Idealized fully-random stand-in for a drawn hash family.

    Each of the ``d`` coordinates is a keyed function of
    (seed, key, coordinate), so repeated evaluation of the same key is
    consistent without storing anything.  Used as the baseline against
    which the structured families are compared.
    """

    __slots__ = ("d", "m", "_base")

    def __init__(self, source: "Prng | int", d: int, m: int):
        if d < 1 or m < 1:
            raise ValueError("need d >= 1 and m >= 1")
        self.d = d
        self.m = m
        self._base = source.next_u64() if isinstance(source, Prng) else mix64(source)

    def _limit(self) -> int:
        return (1 << 64) - ((1 << 64) % self.m)

    def evaluate(self, x: int) -> tuple[int, ...]:
        limit = self._limit()
        out = []
        kx = mix64((x + 1) * _ORACLE_SALT & _MASK64)
        for i in range(self.d):
            salt = 0
            while True:
                v = mix64((self._base ^ kx) + (i + 1) * _GOLDEN + salt * _MIX1)
                if v < limit:
                    out.append(v % self.m)
                    break
                salt += 1
        return tuple(out)

    def evaluate_many(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        limit = self._limit()
        kx = _mix64_vec((keys + np.uint64(1)) * np.uint64(_ORACLE_SALT))
        cols = []
        for i in range(self.d):
            base = (np.uint64(self._base) ^ kx) + np.uint64((i + 1) * _GOLDEN & _MASK64)
            v = _mix64_vec(base)
            if limit != (1 << 64):
                salt = 1
                bad = v >= np.uint64(limit)
                while bad.any():
                    v = np.where(
                        bad, _mix64_vec(base + np.uint64(salt * _MIX1 & _MASK64)), v
                    )
                    bad = v >= np.uint64(limit)
                    salt += 1
            cols.append((v % np.uint64(self.m)).astype(np.int64))
        return np.stack(cols, axis=1)
