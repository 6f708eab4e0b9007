import numpy as np
import pytest
from scipy import stats

from tablemix.family import FamilyParams, TableMixFamily, draw_family
from tablemix.hashfam import PolyHash
from tablemix.prng import Prng
from tablemix.uniformsim import (
    UniformSim,
    build_sim,
    evaluate,
    evaluate_many,
    probe_uniformity,
)


def test_build_is_deterministic():
    a = build_sim(Prng(4), 100, 1.0, 0.5, 2, 8)
    b = build_sim(Prng(4), 100, 1.0, 0.5, 2, 8)
    assert (a.t1 == b.t1).all() and (a.t2 == b.t2).all()
    assert a.f == b.f
    assert all((ya == yb).all() for ya, yb in zip(a.y, b.y))


def test_shapes_and_bit_accounting():
    n, eps, delta, c, w = 1_000, 0.5, 0.5, 3, 4
    sim = build_sim(Prng(1), n, eps, delta, c, w)
    m = int(np.ceil((1 + eps) * n))
    ell = int(np.ceil(n**delta))
    assert len(sim.t1) == len(sim.t2) == m
    assert len(sim.y) == c and all(len(y) == ell for y in sim.y)
    assert sim.table_bits() == (2 * m + c * ell) * w
    # dominant term is 2(1+eps) n w bits; the rest is lower order
    assert sim.table_bits() - 2 * m * w == c * ell * w


def test_parameter_validation():
    with pytest.raises(ValueError):
        build_sim(Prng(0), 0, 1.0, 0.5, 1, 2)
    with pytest.raises(ValueError):
        build_sim(Prng(0), 10, -1.0, 0.5, 1, 2)
    with pytest.raises(ValueError):
        build_sim(Prng(0), 10, 1.0, 1.5, 1, 2)
    with pytest.raises(ValueError):
        build_sim(Prng(0), 10, 1.0, 0.5, 1, 65)


def _zeroed(sim: UniformSim) -> UniformSim:
    return UniformSim(
        sim.fam,
        PolyHash((0, 0), 1 << sim.width),
        np.zeros_like(sim.t1),
        np.zeros_like(sim.t2),
        tuple(np.zeros_like(y) for y in sim.y),
        sim.width,
    )


def test_all_zero_tables_give_identity_element():
    sim = _zeroed(build_sim(Prng(2), 50, 1.0, 0.5, 2, 8))
    assert evaluate(sim, 17) == 0


def test_single_nonzero_entry_passes_through():
    sim = _zeroed(build_sim(Prng(3), 50, 1.0, 0.5, 2, 8))
    x = 23
    h1 = sim.fam.evaluate(x)[0]
    t1 = sim.t1.copy()
    t1[h1] = 99
    sim2 = UniformSim(sim.fam, sim.f, t1, sim.t2, sim.y, sim.width)
    assert evaluate(sim2, x) == 99


def test_eval_matches_direct_formula_oracle():
    sim = build_sim(Prng(5), 200, 1.0, 0.5, 2, 16)
    prng = Prng(6)
    keys = [prng.below(2**61 - 2) for _ in range(1_000)]
    arr = evaluate_many(sim, np.array(keys, dtype=np.uint64))
    from tablemix.hashfam import eval_poly

    for x, got in zip(keys[:200], arr[:200]):
        h1, h2 = sim.fam.evaluate(x)
        want = int(sim.t1[h1]) ^ int(sim.t2[h2]) ^ eval_poly(sim.f, x)
        for j, gj in enumerate(sim.fam.g_values(x)):
            want ^= int(sim.y[j][gj])
        assert int(got) == want == evaluate(sim, x)


def test_single_key_marginal_is_uniform():
    res = probe_uniformity(11, 30_000, [5], n=4, width=2)
    assert res.pvalue > 0.001
    assert res.counts.sum() == 30_000


def test_pairwise_uniformity_probe():
    res = probe_uniformity(12, 30_000, [1, 2], n=4, width=2)
    assert res.pvalue > 0.001


def test_probe_budget_validation():
    with pytest.raises(ValueError):
        probe_uniformity(1, 10, list(range(7)), n=8, width=2)
    with pytest.raises(ValueError):
        probe_uniformity(1, 10, [1], n=8, width=3)


def test_shared_g_values_still_uniform():
    # keys forced to collide on every g-component; the value tables indexed
    # by (h_1, h_2) must re-uniformize the joint law on a peelable key set
    ell, w, m = 8, 1, 29
    params = FamilyParams(c=1, d=2, kappa=2, ell=ell, m=m)
    g_fixed = (PolyHash((0, 1), ell),)  # identity mod ell
    keys = np.array([ell, 2 * ell, 3 * ell, 4 * ell, 5 * ell], dtype=np.uint64)
    root = Prng(909)
    counts = np.zeros((1 << w) ** len(keys), dtype=np.int64)
    trials = 40_000
    for i in range(trials):
        prng = root.child(i)
        fam = draw_family(prng, params)
        fam = TableMixFamily(params, fam.f, g_fixed, fam.z)
        r = 1 << w
        sim = UniformSim(
            fam,
            PolyHash((prng.below(2**61 - 1), prng.below(2**61 - 1)), r),
            prng.integers(r, m),
            prng.integers(r, m),
            (prng.integers(r, ell),),
            w,
        )
        vals = evaluate_many(sim, keys)
        idx = 0
        for v in vals:
            idx = (idx << w) | int(v)
        counts[idx] += 1
    assert stats.chisquare(counts).pvalue > 0.001


def test_fresh_value_tables_reuniformize_peelable_keys():
    # freeze family, f and y; redraw only t1/t2 across trials
    n, w = 12, 1
    base = build_sim(Prng(31), n, 1.0, 0.5, 1, w)
    keys = np.array([2, 3, 5, 7], dtype=np.uint64)
    from tablemix.graphs import build as build_graph, core_is_empty

    assert core_is_empty(build_graph(base.fam, keys))  # sparse: peelable
    m = base.fam.params.m
    root = Prng(32)
    counts = np.zeros((1 << w) ** len(keys), dtype=np.int64)
    trials = 40_000
    for i in range(trials):
        prng = root.child(i)
        sim = UniformSim(
            base.fam,
            base.f,
            prng.integers(1 << w, m),
            prng.integers(1 << w, m),
            base.y,
            w,
        )
        vals = evaluate_many(sim, keys)
        idx = 0
        for v in vals:
            idx = (idx << w) | int(v)
        counts[idx] += 1
    assert stats.chisquare(counts).pvalue > 0.001
