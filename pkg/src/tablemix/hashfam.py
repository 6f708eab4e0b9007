"""Polynomial hash families over a fixed prime field.

A degree-(kappa-1) polynomial with uniformly random coefficients modulo a
prime is the classical kappa-wise independent family; with kappa = 2 it is
also 2-universal after range reduction.  All polynomials in this package
share one artifact-wide modulus, the Mersenne prime 2**61 - 1, which keeps
every key of up to 61 bits (except the prime itself) admissible and allows
fast vectorized reduction.  Range reduction is plain ``mod r``; the slight
non-uniformity when r does not divide the prime is absorbed by the
2-universality constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prng import Prng

PRIME = (1 << 61) - 1
_MASK61 = PRIME
_MASK32 = (1 << 32) - 1


@dataclass(frozen=True)
class PolyHash:
    """A polynomial ``x -> ((sum a_i x^i) mod PRIME) mod range_size``.

    ``coefficients[i]`` is the coefficient of ``x**i``; the leading
    coefficient is unrestricted, so the effective degree may degenerate.
    Instances are immutable and safe to share across workers.
    """

    coefficients: tuple[int, ...]
    range_size: int

    def __post_init__(self):
        if not 1 <= len(self.coefficients) <= 64:
            raise ValueError("need between 1 and 64 coefficients")
        if self.range_size < 1:
            raise ValueError("range_size must be positive")
        if any(not 0 <= a < PRIME for a in self.coefficients):
            raise ValueError("coefficients must lie in [0, PRIME)")

    @property
    def kappa(self) -> int:
        return len(self.coefficients)

    def __call__(self, x: int) -> int:
        return eval_poly(self, x)

    def eval_many(self, keys: np.ndarray) -> np.ndarray:
        return eval_poly_many(self, keys)


def draw_poly(prng: Prng, kappa: int, range_size: int) -> PolyHash:
    """Draw a polynomial with ``kappa`` uniform coefficients in [0, PRIME)."""
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if range_size < 1:
        raise ValueError("range_size must be positive")
    coeffs = tuple(prng.below(PRIME) for _ in range(kappa))
    return PolyHash(coeffs, range_size)


def check_key(x: int) -> int:
    """Validate that ``x`` is an admissible key (an integer below PRIME)."""
    if not 0 <= x < PRIME:
        raise ValueError(f"key {x!r} outside admissible range [0, 2**61 - 1)")
    return x


def eval_poly(h: PolyHash, x: int) -> int:
    """Horner evaluation mod PRIME, then mod the range."""
    check_key(x)
    acc = 0
    for a in reversed(h.coefficients):
        acc = (acc * x + a) % PRIME
    return acc % h.range_size


def _mulmod61(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise (a * b) mod (2**61 - 1) for uint64 operands below 2**61."""
    a0 = a & np.uint64(_MASK32)
    a1 = a >> np.uint64(32)
    b0 = b & np.uint64(_MASK32)
    b1 = b >> np.uint64(32)
    mid = a1 * b0 + a0 * b1  # < 2**62, no wrap
    lo1 = a0 * b0
    lo = lo1 + ((mid & np.uint64(_MASK32)) << np.uint64(32))  # may wrap
    carry = (lo < lo1).astype(np.uint64)
    hi = a1 * b1 + (mid >> np.uint64(32)) + carry
    # full product is hi * 2**64 + lo; 2**64 == 8 (mod 2**61 - 1)
    r = (hi << np.uint64(3)) + (lo & np.uint64(_MASK61)) + (lo >> np.uint64(61))
    r = (r & np.uint64(_MASK61)) + (r >> np.uint64(61))
    return np.where(r >= np.uint64(PRIME), r - np.uint64(PRIME), r)


def eval_poly_many(h: PolyHash, keys: np.ndarray) -> np.ndarray:
    """Vectorized :func:`eval_poly` over an array of admissible keys."""
    x = np.asarray(keys, dtype=np.uint64)
    if x.size and int(x.max()) >= PRIME:
        raise ValueError("some key outside admissible range [0, 2**61 - 1)")
    acc = np.full(x.shape, np.uint64(h.coefficients[-1]), dtype=np.uint64)
    for a in reversed(h.coefficients[:-1]):
        acc = _mulmod61(acc, x)
        acc += np.uint64(a)
        acc = np.where(acc >= np.uint64(PRIME), acc - np.uint64(PRIME), acc)
    if h.range_size == (1 << 64):
        return acc.astype(np.int64, copy=False)  # values < 2**61 already fit
    return (acc % np.uint64(h.range_size)).astype(np.int64)
