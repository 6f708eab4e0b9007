"""Table-mixed hash function sequences and their deficiency classifier.

A drawn sequence (h_1, ..., h_d) combines d polynomial hash functions f_i
into [m], c polynomial hash functions g_j into [ell], and d random lookup
tables z_i of shape (c, ell) with entries in [m]:

    h_i(x) = (f_i(x) + sum_j z_i[j, g_j(x)]) mod m

The g-components decide how well a drawn sequence behaves on a fixed key
set T: if some g_j spreads T widely, the unfixed table entries make the
values (h_i(x))_{x in T} fully random.  The ``deficiency`` of a draw with
respect to T measures the distance from that ideal, and key sets are
classified good/critical/bad by comparing it against k = kappa/2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .hashfam import PRIME, PolyHash, check_key, draw_poly, eval_poly, eval_poly_many
from .prng import Prng

_MAGIC = b"TMF1"


@dataclass(frozen=True)
class FamilyParams:
    """Shape of a family draw: c g-functions, d outputs, independence kappa,
    g-range ell and output range m."""

    c: int
    d: int
    kappa: int
    ell: int
    m: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be >= 1")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.kappa < 2 or self.kappa % 2 != 0:
            raise ValueError("kappa must be an even integer >= 2")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @property
    def k(self) -> int:
        return self.kappa // 2


def ell_from_delta(n: int, delta: float) -> int:
    """The g-range used throughout: ell = ceil(n**delta)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return max(1, int(np.ceil(n**delta)))


@dataclass
class TableMixFamily:
    """One drawn hash-function sequence with its f/g/z components.

    Immutable after construction and safe to share across concurrent
    readers; all evaluation methods are pure.
    """

    params: FamilyParams
    f: tuple[PolyHash, ...]
    g: tuple[PolyHash, ...]
    z: np.ndarray  # shape (d, c, ell), entries in [m]

    def __post_init__(self):
        p = self.params
        if len(self.f) != p.d or len(self.g) != p.c:
            raise ValueError("component counts do not match params")
        if self.z.shape != (p.d, p.c, p.ell):
            raise ValueError("z tables must have shape (d, c, ell)")
        if self.z.size and (int(self.z.min()) < 0 or int(self.z.max()) >= p.m):
            raise ValueError("z entries must lie in [0, m)")

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def m(self) -> int:
        return self.params.m

    def g_values(self, x: int) -> tuple[int, ...]:
        check_key(x)
        return tuple(eval_poly(gj, x) for gj in self.g)

    def g_values_many(self, keys: np.ndarray) -> np.ndarray:
        """Shape (len(keys), c) array of g_j values."""
        return np.stack([eval_poly_many(gj, keys) for gj in self.g], axis=1)

    def evaluate(self, x: int) -> tuple[int, ...]:
        """The d-vector (h_1(x), ..., h_d(x))."""
        check_key(x)
        gv = self.g_values(x)
        p = self.params
        out = []
        for i in range(p.d):
            acc = eval_poly(self.f[i], x)
            zi = self.z[i]
            for j in range(p.c):
                acc += int(zi[j, gv[j]])
            out.append(acc % p.m)
        return tuple(out)

    def evaluate_many(self, keys: np.ndarray) -> np.ndarray:
        """Shape (len(keys), d) array of hash vectors."""
        p = self.params
        gv = [eval_poly_many(gj, keys) for gj in self.g]
        cols = []
        for i in range(p.d):
            acc = eval_poly_many(self.f[i], keys).astype(np.int64)
            zi = self.z[i]
            for j in range(p.c):
                acc += zi[j][gv[j]]
            cols.append(acc % p.m)
        return np.stack(cols, axis=1)

    def to_bytes(self) -> bytes:
        """Self-describing little-endian blob: params header, then f and g
        coefficients, then the z tables in row-major [i][j][g-value] order."""
        p = self.params
        head = _MAGIC + struct.pack("<5Q", p.c, p.d, p.kappa, p.ell, p.m)
        body = bytearray(head)
        for poly in self.f + self.g:
            body += struct.pack(f"<{p.kappa}Q", *poly.coefficients)
        body += self.z.astype("<u8").tobytes()
        return bytes(body)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TableMixFamily":
        if blob[:4] != _MAGIC:
            raise ValueError("not a serialized family blob")
        c, d, kappa, ell, m = struct.unpack_from("<5Q", blob, 4)
        params = FamilyParams(c, d, kappa, ell, m)
        off = 4 + 40
        polys = []
        for _ in range(d + c):
            coeffs = struct.unpack_from(f"<{kappa}Q", blob, off)
            off += 8 * kappa
            polys.append(coeffs)
        z = np.frombuffer(blob, dtype="<u8", count=d * c * ell, offset=off)
        z = z.reshape(d, c, ell).astype(np.int64)
        f = tuple(PolyHash(polys[i], m) for i in range(d))
        g = tuple(PolyHash(polys[d + j], ell) for j in range(c))
        return cls(params, f, g, z)


def draw_family(prng: Prng, params: FamilyParams) -> TableMixFamily:
    """Draw a family: f and g polynomials of degree kappa-1, z tables with
    uniform entries in [m].  Deterministic in the prng seed."""
    f = tuple(draw_poly(prng, params.kappa, params.m) for _ in range(params.d))
    g = tuple(draw_poly(prng, params.kappa, params.ell) for _ in range(params.c))
    per_table = params.c * params.ell
    z = np.stack(
        [
            prng.integers(params.m, per_table).astype(np.int64).reshape(params.c, params.ell)
            for _ in range(params.d)
        ]
    )
    return TableMixFamily(params, f, g, z)


GOOD = "good"
CRITICAL = "critical"
BAD = "bad"


@dataclass(frozen=True)
class DeficiencyReport:
    """Deficiency of a drawn sequence with respect to a key set T.

    ``d_t`` is |T| - max(k, |g_1(T)|, ..., |g_c(T)|), clipped below at 0 so
    the report is total for |T| < k.  The classification compares d_t with
    k: strictly above is ``bad``, equal is ``critical``, below is ``good``.
    """

    d_t: int
    classification: str
    per_g_distinct: tuple[int, ...] = field(default=())


def _classify(t_size: int, per_g_distinct: list[int], k: int) -> DeficiencyReport:
    best = max([k] + per_g_distinct)
    d_t = max(0, t_size - best)
    if d_t > k:
        cls = BAD
    elif d_t == k:
        cls = CRITICAL
    else:
        cls = GOOD
    return DeficiencyReport(d_t, cls, tuple(per_g_distinct))


def classify_deficiency(fam: TableMixFamily, keys) -> DeficiencyReport:
    """Classify a key set; depends only on the g-components of the draw."""
    t = sorted(set(keys))
    for x in t:
        check_key(x)
    if not t:
        return _classify(0, [0] * fam.params.c, fam.params.k)
    arr = np.asarray(t, dtype=np.uint64)
    gv = fam.g_values_many(arr)
    distinct = [int(np.unique(gv[:, j]).size) for j in range(fam.params.c)]
    return _classify(len(t), distinct, fam.params.k)


def estimate_bad_rate(params: FamilyParams, t_size: int, trials: int, seed: int) -> float:
    """Monte-Carlo estimate of Pr(classification != good) for T = {1..t_size}.

    Only the g-components are drawn per trial: the classification is
    independent of the f polynomials and the z tables, so skipping them
    keeps large trial counts cheap.  The estimate is meant to sit below
    (t_size**2 / ell)**(c*k) plus sampling noise.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    root = Prng(seed)
    keys = np.arange(1, t_size + 1, dtype=np.uint64)
    k = params.k
    not_good = 0
    for i in range(trials):
        prng = root.child(i)
        distinct = []
        for _ in range(params.c):
            gj = draw_poly(prng, params.kappa, params.ell)
            distinct.append(int(np.unique(eval_poly_many(gj, keys)).size))
        if _classify(t_size, distinct, k).classification != GOOD:
            not_good += 1
    return not_good / trials
