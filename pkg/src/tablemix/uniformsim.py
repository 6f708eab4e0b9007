"""Simulation of a uniform hash function into bit vectors under XOR.

The data structure represents one function h: keys -> [2**width] built
from a bipartite table-mixed family (h_1, h_2), two value tables indexed
by h_1 and h_2, one small value table per g-component, and an independent
degree-1 polynomial f:

    h(x) = t1[h_1(x)] ^ t2[h_2(x)] ^ f(x) ^ y_1[g_1(x)] ^ ... ^ y_c[g_c(x)]

For any fixed key set of the design size, the values are fully random
outside a rare failure event, while the tables take roughly
2*(1+eps)*n*width bits plus lower-order terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .family import FamilyParams, TableMixFamily, draw_family, ell_from_delta
from .hashfam import PolyHash, check_key, draw_poly, eval_poly, eval_poly_many
from .prng import Prng


@dataclass
class UniformSim:
    """Immutable after construction; concurrent evaluation is safe."""

    fam: TableMixFamily
    f: PolyHash
    t1: np.ndarray
    t2: np.ndarray
    y: tuple[np.ndarray, ...]
    width: int

    def __post_init__(self):
        p = self.fam.params
        if len(self.t1) != p.m or len(self.t2) != p.m:
            raise ValueError("value tables must match the family range")
        if len(self.y) != p.c or any(len(yj) != p.ell for yj in self.y):
            raise ValueError("need c auxiliary tables of length ell")

    def table_bits(self) -> int:
        """Bits held in the value tables: (2m + c*ell) * width."""
        p = self.fam.params
        return (2 * p.m + p.c * p.ell) * self.width


def build_sim(
    prng: Prng, n: int, epsilon: float, delta: float, c: int, width: int
) -> UniformSim:
    """Set up the structure for key sets of size ``n``.

    Tables t1, t2 have m = ceil((1+epsilon)*n) entries; the c auxiliary
    tables have ell = ceil(n**delta) entries; all entries are uniform in
    [2**width].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if c < 1:
        raise ValueError("c must be >= 1")
    if not 1 <= width <= 64:
        raise ValueError("width must lie in [1, 64]")
    m = int(np.ceil((1 + epsilon) * n))
    ell = ell_from_delta(n, delta)
    fam = draw_family(prng, FamilyParams(c=c, d=2, kappa=2, ell=ell, m=m))
    r = 1 << width
    f = draw_poly(prng, 2, r)
    t1 = prng.integers(r, m)
    t2 = prng.integers(r, m)
    y = tuple(prng.integers(r, ell) for _ in range(c))
    return UniformSim(fam, f, t1, t2, y, width)


def evaluate(sim: UniformSim, x: int) -> int:
    check_key(x)
    h1, h2 = sim.fam.evaluate(x)
    gv = sim.fam.g_values(x)
    out = int(sim.t1[h1]) ^ int(sim.t2[h2]) ^ eval_poly(sim.f, x)
    for j, gj in enumerate(gv):
        out ^= int(sim.y[j][gj])
    return out


def evaluate_many(sim: UniformSim, keys: np.ndarray) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    hv = sim.fam.evaluate_many(keys)
    gv = sim.fam.g_values_many(keys)
    out = sim.t1[hv[:, 0]] ^ sim.t2[hv[:, 1]]
    out = out ^ eval_poly_many(sim.f, keys).astype(np.uint64)
    for j in range(len(sim.y)):
        out = out ^ sim.y[j][gv[:, j]]
    return out  # uint64; values are below 2**width


@dataclass(frozen=True)
class ProbeResult:
    statistic: float
    pvalue: float
    counts: np.ndarray
    trials: int


def probe_uniformity(
    seed: int,
    trials: int,
    keys,
    *,
    n: int,
    epsilon: float = 1.0,
    delta: float = 0.5,
    c: int = 2,
    width: int = 2,
) -> ProbeResult:
    """Chi-square test of the joint value distribution over fresh draws.

    Builds an independent structure per trial and tallies the tuple
    (h(x))_{x in keys}; the joint space [2**width]**len(keys) must stay
    enumerable, so at most 6 keys and width <= 2 are accepted.
    """
    keys = sorted(set(keys))
    if len(keys) > 6:
        raise ValueError("probe key sets are limited to 6 keys")
    if width > 2:
        raise ValueError("probe width is limited to 2 bits")
    r = 1 << width
    cells = r ** len(keys)
    counts = np.zeros(cells, dtype=np.int64)
    root = Prng(seed)
    karr = np.asarray(keys, dtype=np.uint64)
    for i in range(trials):
        sim = build_sim(root.child(i), n, epsilon, delta, c, width)
        vals = evaluate_many(sim, karr)
        idx = 0
        for v in vals:
            idx = idx * r + int(v)
        counts[idx] += 1
    statistic, pvalue = stats.chisquare(counts)
    return ProbeResult(float(statistic), float(pvalue), counts, trials)
