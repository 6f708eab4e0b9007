"""Perfect hashing into [2m] from an acyclic bipartite key graph.

Families are redrawn until the key graph is acyclic (its 2-core is
empty); a peel order then yields two bit tables such that

    sigma(x) = h_1(x)      if bit1[h_1(x)] ^ bit2[h_2(x)] == 0
             = m + h_2(x)  otherwise

is injective on the construction keys.  Bits are assigned in reverse peel
order: each key fixes the bit of its peel vertex so the XOR points at
that vertex's side; bits never needed stay 0.

The closed-form success probabilities per draw are exposed as
``acyclic_prob_bounds``: the asymptotic acyclicity rate of the random
graph and a first-moment lower bound that is meaningful for eps >= 0.08.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .family import FamilyParams, TableMixFamily, draw_family, ell_from_delta
from .graphs import LabeledHypergraph, build, parallel_peel
from .hashfam import check_key
from .prng import Prng

_MAGIC = b"TMPH"


class ConstructionFailure(RuntimeError):
    """Raised when no acyclic draw was found within the attempt cap."""


class PerfectHash:
    """Evaluation-only structure: a bipartite family plus two bit tables."""

    def __init__(self, fam: TableMixFamily, bit1: np.ndarray, bit2: np.ndarray,
                 debug_sigma: dict[int, int] | None = None):
        if fam.d != 2:
            raise ValueError("perfect hashing uses a d = 2 family")
        if len(bit1) != fam.m or len(bit2) != fam.m:
            raise ValueError("bit tables must match the family range")
        self.fam = fam
        self.m = fam.m
        self.bit1 = bit1
        self.bit2 = bit2
        self.debug_sigma = debug_sigma

    def range_size(self) -> int:
        return 2 * self.m


def evaluate(ph: PerfectHash, x: int) -> int:
    check_key(x)
    h1, h2 = ph.fam.evaluate(x)
    if int(ph.bit1[h1]) ^ int(ph.bit2[h2]) == 0:
        return h1
    return ph.m + h2


def evaluate_many(ph: PerfectHash, keys: np.ndarray) -> np.ndarray:
    hv = ph.fam.evaluate_many(np.asarray(keys, dtype=np.uint64))
    side2 = (ph.bit1[hv[:, 0]] ^ ph.bit2[hv[:, 1]]).astype(bool)
    return np.where(side2, ph.m + hv[:, 1], hv[:, 0])


def _assign_bits(g: LabeledHypergraph, edge_order: np.ndarray, peel_verts: np.ndarray,
                 m: int) -> tuple[np.ndarray, np.ndarray]:
    bit1 = np.zeros(m, dtype=np.uint8)
    bit2 = np.zeros(m, dtype=np.uint8)
    bits = (bit1, bit2)
    ids = g.vertex_ids()
    parts = peel_verts // m
    vids = peel_verts % m
    # reverse peel order; within one peel batch the touched cells are
    # disjoint, so vectorized scatter per reversed batch would also work
    for e, part, v in zip(edge_order[::-1], parts[::-1], vids[::-1]):
        row = ids[e]
        other_part = 1 - part
        other_v = int(row[other_part]) - other_part * m
        want = int(part)  # xor 0 -> side 1, xor 1 -> side 2
        bits[part][v] = want ^ int(bits[other_part][other_v])
    return bit1, bit2


def build_perfect_hash(
    prng: Prng,
    keys,
    epsilon: float,
    delta: float = 0.5,
    c: int = 3,
    max_attempts: int = 64,
    debug: bool = False,
) -> tuple[PerfectHash, int]:
    """Retry-until-acyclic construction; returns (structure, attempts).

    Requires epsilon >= 0.08 so the expected number of attempts is a small
    constant.  Raises :class:`ConstructionFailure` past the attempt cap.
    """
    if epsilon < 0.08:
        raise ValueError("epsilon must be at least 0.08")
    keys = sorted(set(keys))
    n = len(keys)
    if n < 1:
        raise ValueError("need at least one key")
    karr = np.asarray(keys, dtype=np.uint64)
    m = int(np.ceil((1 + epsilon) * n))
    params = FamilyParams(c=c, d=2, kappa=2, ell=ell_from_delta(n, delta), m=m)
    for attempt in range(1, max_attempts + 1):
        fam = draw_family(prng.child(attempt), params)
        g = build(fam, karr)
        edge_order, peel_verts, alive = parallel_peel(g)
        if alive.any():
            continue
        bit1, bit2 = _assign_bits(g, edge_order, peel_verts, m)
        sigma = None
        if debug:
            ids = g.vertex_ids()
            sigma = {}
            for e, pv in zip(edge_order, peel_verts):
                part, v = int(pv) // m, int(pv) % m
                sigma[int(g.labels[e])] = v if part == 0 else m + v
        ph = PerfectHash(fam, bit1, bit2, debug_sigma=sigma)
        values = evaluate_many(ph, karr)
        if np.unique(values).size != n:
            raise AssertionError("bit assignment produced a collision")
        return ph, attempt
    raise ConstructionFailure(f"no acyclic draw within {max_attempts} attempts")


def acyclic_prob_bounds(epsilon: float) -> tuple[float, float]:
    """(asymptotic acyclicity rate, first-moment lower bound) per draw."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    q = (1.0 / (1.0 + epsilon)) ** 2
    exact = math.sqrt(1.0 - q)
    lower = 1.0 + 0.5 * math.log(1.0 - q)
    return exact, lower


def save(ph: PerfectHash, path: str) -> None:
    """Write range size, family blob and packed bit tables."""
    fam_blob = ph.fam.to_bytes()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<2Q", ph.m, len(fam_blob)))
        fh.write(fam_blob)
        fh.write(np.packbits(ph.bit1).tobytes())
        fh.write(np.packbits(ph.bit2).tobytes())


def load(path: str) -> PerfectHash:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError("not a serialized perfect hash file")
    m, fam_len = struct.unpack_from("<2Q", blob, 4)
    off = 4 + 16
    fam = TableMixFamily.from_bytes(blob[off : off + fam_len])
    off += fam_len
    packed = math.ceil(m / 8)
    bit1 = np.unpackbits(np.frombuffer(blob, np.uint8, packed, off))[:m]
    off += packed
    bit2 = np.unpackbits(np.frombuffer(blob, np.uint8, packed, off))[:m]
    return PerfectHash(fam, bit1, bit2)


def build_from_key_file(prng: Prng, key_path: str, epsilon: float, delta: float,
                        c: int) -> tuple[PerfectHash, int, int]:
    """Build from a newline-delimited file of decimal keys; returns
    (structure, attempts, key count)."""
    keys = []
    with open(key_path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                keys.append(int(line))
    ph, attempts = build_perfect_hash(prng, keys, epsilon, delta, c)
    return ph, attempts, len(set(keys))
