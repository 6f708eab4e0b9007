import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from tablemix.family import (
    BAD,
    CRITICAL,
    GOOD,
    FamilyParams,
    TableMixFamily,
    classify_deficiency,
    draw_family,
    ell_from_delta,
    estimate_bad_rate,
)
from tablemix.hashfam import PolyHash
from tablemix.prng import Prng


def _handmade(c=1, d=2, ell=4, m=8, g_polys=None, f_polys=None, z=None):
    params = FamilyParams(c=c, d=d, kappa=2, ell=ell, m=m)
    f = f_polys or tuple(PolyHash((0, 0), m) for _ in range(d))
    g = g_polys or tuple(PolyHash((0, 1), ell) for _ in range(c))  # identity mod ell
    if z is None:
        z = np.zeros((d, c, ell), dtype=np.int64)
    return TableMixFamily(params, f, g, z)


def test_params_validation():
    with pytest.raises(ValueError):
        FamilyParams(c=0, d=2, kappa=2, ell=4, m=8)
    with pytest.raises(ValueError):
        FamilyParams(c=1, d=1, kappa=2, ell=4, m=8)
    with pytest.raises(ValueError):
        FamilyParams(c=1, d=2, kappa=3, ell=4, m=8)  # odd independence
    with pytest.raises(ValueError):
        FamilyParams(c=1, d=2, kappa=2, ell=0, m=8)


def test_draw_deterministic_and_shaped():
    params = FamilyParams(c=1, d=2, kappa=2, ell=4, m=8)
    fam1 = draw_family(Prng(11), params)
    fam2 = draw_family(Prng(11), params)
    assert fam1.to_bytes() == fam2.to_bytes()
    assert fam1.z.shape == (2, 1, 4)
    assert int(fam1.z.max()) < 8 and int(fam1.z.min()) >= 0


def test_serialization_roundtrip():
    params = FamilyParams(c=3, d=4, kappa=4, ell=7, m=19)
    fam = draw_family(Prng(5), params)
    back = TableMixFamily.from_bytes(fam.to_bytes())
    assert back.params == fam.params
    assert back.to_bytes() == fam.to_bytes()
    for x in (0, 5, 12345):
        assert back.evaluate(x) == fam.evaluate(x)


def test_zero_tables_reduce_to_f():
    params = FamilyParams(c=2, d=2, kappa=2, ell=4, m=10)
    f = (PolyHash((3, 7), 10), PolyHash((1, 2), 10))
    fam = _handmade(c=2, d=2, ell=4, m=10, f_polys=f,
                    g_polys=(PolyHash((0, 1), 4), PolyHash((2, 5), 4)))
    for x in (0, 1, 9, 1000):
        assert fam.evaluate(x) == (f[0](x), f[1](x))


def test_constructed_single_table_entry():
    # f identically 0, one g value hits a table cell holding 5
    z = np.zeros((2, 1, 4), dtype=np.int64)
    x = 2  # identity g maps 2 -> cell 2
    z[0, 0, 2] = 5
    fam = _handmade(m=10, z=z)
    assert fam.evaluate(x)[0] == 5


def test_eval_matches_direct_formula_oracle():
    params = FamilyParams(c=3, d=3, kappa=2, ell=8, m=23)
    fam = draw_family(Prng(2), params)
    prng = Prng(3)
    keys = [prng.below(2**61 - 2) for _ in range(100)]
    for x in keys:
        expected = []
        for i in range(params.d):
            acc = fam.f[i](x)
            for j in range(params.c):
                acc = acc + int(fam.z[i][j][fam.g[j](x)])
            expected.append(acc % params.m)
        assert fam.evaluate(x) == tuple(expected)
    arr = fam.evaluate_many(np.array(keys, dtype=np.uint64))
    assert [tuple(map(int, row)) for row in arr] == [fam.evaluate(x) for x in keys]


def test_marginal_coordinate_uniform_over_draws():
    # single-coordinate law over fresh draws is uniform on [m]
    params = FamilyParams(c=2, d=3, kappa=2, ell=4, m=16)
    root = Prng(99)
    counts = np.zeros(16, dtype=np.int64)
    for i in range(100_000):
        fam = draw_family(root.child(i), params)
        counts[fam.evaluate(12345)[0]] += 1
    assert stats.chisquare(counts).pvalue > 0.001


def test_classify_injective_g_is_good():
    fam = _handmade(ell=64)
    report = classify_deficiency(fam, range(1, 9))  # identity g is injective here
    assert report.d_t == 0 and report.classification == GOOD
    assert report.per_g_distinct == (8,)


def test_classify_forced_critical_and_bad():
    ell = 4
    fam = _handmade(ell=ell)
    # identity mod ell: keys 0 and ell collide
    critical = classify_deficiency(fam, [0, ell, 1])
    assert critical.d_t == 1 and critical.classification == CRITICAL
    bad = classify_deficiency(fam, [0, ell, 1, 1 + ell])
    assert bad.d_t == 2 and bad.classification == BAD


def test_classify_empty_set_is_good():
    fam = _handmade()
    report = classify_deficiency(fam, [])
    assert report.d_t == 0 and report.classification == GOOD


def test_classify_depends_only_on_g():
    params = FamilyParams(c=2, d=2, kappa=2, ell=8, m=16)
    fam1 = draw_family(Prng(4), params)
    fam2 = draw_family(Prng(5), params)
    # share g components, keep different f and z
    fam2 = TableMixFamily(params, fam2.f, fam1.g, fam2.z)
    keys = list(range(20, 40))
    assert classify_deficiency(fam1, keys) == classify_deficiency(fam2, keys)


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.permutations(list(range(10, 22))))
def test_classify_invariant_under_permutation(rnd, perm):
    fam = draw_family(Prng(rnd.randrange(2**32)),
                      FamilyParams(c=2, d=2, kappa=2, ell=4, m=8))
    assert classify_deficiency(fam, perm) == classify_deficiency(fam, sorted(perm))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 12))
def test_removing_a_key_drops_deficiency_by_zero_or_one(seed, t_size):
    fam = draw_family(Prng(seed), FamilyParams(c=1, d=2, kappa=2, ell=3, m=8))
    keys = list(range(1, t_size + 1))
    d_full = classify_deficiency(fam, keys).d_t
    for x in keys:
        smaller = [y for y in keys if y != x]
        assert d_full - classify_deficiency(fam, smaller).d_t in (0, 1)


def test_conditional_uniformity_given_good():
    # conditioned on a good draw, joint values on a small set are uniform
    params = FamilyParams(c=1, d=2, kappa=2, ell=8, m=2)
    root = Prng(2024)
    keys = (1, 2, 3)
    counts = np.zeros(2 ** (2 * len(keys)), dtype=np.int64)
    taken = 0
    i = 0
    while taken < 20_000:
        fam = draw_family(root.child(i), params)
        i += 1
        if classify_deficiency(fam, keys).classification == BAD:
            continue
        idx = 0
        for x in keys:
            for v in fam.evaluate(x):
                idx = (idx << 1) | v
        counts[idx] += 1
        taken += 1
    assert stats.chisquare(counts).pvalue > 0.001


def test_estimate_bad_rate_trivial_and_bounds():
    params = FamilyParams(c=1, d=2, kappa=2, ell=64, m=8)
    assert estimate_bad_rate(params, 1, 500, seed=1) == 0.0

    trials = 20_000
    rate = estimate_bad_rate(params, 8, trials, seed=2)
    bound = 64 / 64  # |T|^2 / ell = 1, trivially
    assert rate <= bound
    params2 = FamilyParams(c=1, d=2, kappa=2, ell=128, m=8)
    rate2 = estimate_bad_rate(params2, 8, trials, seed=3)
    b2 = 64 / 128
    assert rate2 <= b2 + 3 * math.sqrt(b2 * (1 - b2) / trials)

    # squaring through two g components: bound 0.25 at |T|^2/ell = 0.5
    params3 = FamilyParams(c=2, d=2, kappa=2, ell=128, m=8)
    rate3 = estimate_bad_rate(params3, 8, trials, seed=4)
    b3 = 0.25
    assert rate3 <= b3 + 3 * math.sqrt(b3 * (1 - b3) / trials)


def test_ell_from_delta():
    assert ell_from_delta(10_000, 0.5) == 100
    assert ell_from_delta(10, 0.5) == 4
    with pytest.raises(ValueError):
        ell_from_delta(10, 1.5)
