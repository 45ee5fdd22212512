import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import random_system

from fsdsim import (
    DEFAULT_LLR_MAX,
    CandidateList,
    DegenerateNoiseError,
    InputShapeError,
    exhaustive_maxlog_llr,
    exhaustive_peds,
    fsd_search,
    lattice_points,
    list_llr,
    map_bits,
)


def full_list(q):
    return CandidateList(lattice_points(8), exhaustive_peds(q.R, q.y_zf))


def test_full_lattice_equals_oracle(rng):
    for snr in (0.0, 10.0):
        _, system, q = random_system(rng, snr)
        got = list_llr(full_list(q), q.perm, system.sigma2, l_max=np.inf)
        ref = exhaustive_maxlog_llr(q.R, q.y_zf, system.sigma2, perm=q.perm)
        np.testing.assert_allclose(got.values, ref, rtol=0, atol=1e-9)
        assert not got.empty_side.any()


def test_full_lattice_with_prior(rng):
    _, system, q = random_system(rng, 5.0)
    l_a = rng.normal(0, 2, 16)
    got = list_llr(full_list(q), q.perm, system.sigma2, l_a, l_max=np.inf)
    ref = exhaustive_maxlog_llr(q.R, q.y_zf, system.sigma2, l_a, q.perm)
    np.testing.assert_allclose(got.values, ref, rtol=0, atol=1e-9)


def test_empty_side_clamps():
    bits = np.ones(16, dtype=int)
    path = map_bits(bits).s_real
    cl = CandidateList(path[None, :], np.array([1.0]))
    llr = list_llr(cl, None, 0.5)
    np.testing.assert_array_equal(llr.values, np.full(16, DEFAULT_LLR_MAX))
    assert llr.empty_side.all() and llr.clamped.all()
    llr0 = list_llr(CandidateList(map_bits(np.zeros(16, int)).s_real[None, :], np.array([1.0])), None, 0.5)
    np.testing.assert_array_equal(llr0.values, np.full(16, -DEFAULT_LLR_MAX))


def test_two_candidates_hand_check():
    # differ only in bit 3: the inner Im bit of symbol 0 (-3 vs -1)
    a = np.zeros(16, dtype=int)
    b = a.copy()
    b[3] = 1
    paths = np.stack([map_bits(a).s_real, map_bits(b).s_real])
    peds = np.array([1.0, 1.6])
    llr = list_llr(CandidateList(paths, peds), None, sigma2=0.5, l_max=100.0)
    # (-1.6/0.5)/2 - (-1.0/0.5)/2
    assert llr.values[3] == pytest.approx(-0.6)
    others = np.delete(llr.values, 3)
    np.testing.assert_array_equal(others, -100.0)
    assert not llr.empty_side[3] and llr.empty_side.sum() == 15


def test_large_magnitude_clamped_but_not_empty():
    a = np.zeros(16, dtype=int)
    b = a.copy()
    b[0] = 1
    paths = np.stack([map_bits(a).s_real, map_bits(b).s_real])
    llr = list_llr(CandidateList(paths, np.array([0.0, 100.0])), None, 0.5)
    assert llr.values[0] == -DEFAULT_LLR_MAX
    assert llr.clamped[0] and not llr.empty_side[0]


def test_worse_candidate_leaves_llr_unchanged(rng):
    _, system, q = random_system(rng, 10.0)
    cl = fsd_search(q.R, q.y_zf)
    base = list_llr(cl, q.perm, system.sigma2).values
    worst = cl.paths[np.argmax(cl.peds)]
    extra = CandidateList(np.vstack([cl.paths, worst]), np.append(cl.peds, cl.peds.max() + 1.0))
    np.testing.assert_array_equal(list_llr(extra, q.perm, system.sigma2).values, base)


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10))
def test_sigma_scaling_property(seed, c):
    rng = np.random.default_rng(seed)
    _, system, q = random_system(rng, 10.0)
    cl = fsd_search(q.R, q.y_zf)
    a = list_llr(cl, q.perm, system.sigma2, l_max=np.inf)
    b = list_llr(cl, q.perm, system.sigma2 * c, l_max=np.inf)
    ok = ~a.empty_side
    np.testing.assert_allclose(b.values[ok], a.values[ok] / c, rtol=1e-9, atol=1e-9)


def test_fsd_list_signs_agree_with_full(rng):
    agree = []
    for _ in range(30):
        _, system, q = random_system(rng, 20.0)
        got = list_llr(fsd_search(q.R, q.y_zf), q.perm, system.sigma2)
        ref = exhaustive_maxlog_llr(q.R, q.y_zf, system.sigma2, perm=q.perm)
        agree.append(np.mean(np.sign(got.values) == np.sign(ref)))
    assert np.mean(agree) > 0.95


def test_errors(rng):
    _, _, q = random_system(rng)
    cl = fsd_search(q.R, q.y_zf)
    with pytest.raises(DegenerateNoiseError):
        list_llr(cl, q.perm, 0.0)
    with pytest.raises(InputShapeError):
        list_llr(cl, q.perm, 1.0, l_a=np.zeros(4))
    with pytest.raises(InputShapeError):
        list_llr(CandidateList(np.zeros((0, 8)), np.zeros(0)), None, 1.0)
