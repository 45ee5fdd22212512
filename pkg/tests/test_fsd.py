import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_lattice, dense_ped, naive_fsd, random_system

from fsdsim import (
    DEFAULT_DISTRIBUTION,
    QAM16,
    QPSK,
    CandidateList,
    ConfigurationError,
    InputShapeError,
    NodeDistribution,
    accumulate_ped,
    compute_b,
    direct_enumerate,
    exhaustive_ml,
    fsd_search,
    hard_decision,
    path_ped,
)
from fsdsim.mimo import real_to_bits


def test_distribution_parse_and_counts():
    d = NodeDistribution.parse("11111144")
    assert d == DEFAULT_DISTRIBUTION
    assert d.counts[6] == d.counts[7] == 4
    assert str(d) == "11111144"
    assert NodeDistribution.parse("{1,1,1,1,1,1,4,4}") == d
    assert d.list_size == 16
    assert d.nodes_per_level == (16, 16, 16, 16, 16, 16, 16, 4)
    assert d.visited_nodes == 116


@pytest.mark.parametrize("text", ["11111124", "", "abc"])
def test_distribution_rejects(text):
    with pytest.raises(ConfigurationError):
        NodeDistribution.parse(text)


def test_compute_b_top_level(rng):
    _, _, q = random_system(rng)
    assert compute_b(q.R, q.y_zf, np.zeros(8), 7) == q.y_zf[7]


def test_compute_b_identity(rng):
    y = rng.standard_normal(8)
    path = rng.choice(QAM16.alphabet, 8)
    for level in range(8):
        assert compute_b(np.eye(8), y, path, level) == y[level]


def test_compute_b_dense(rng):
    _, _, q = random_system(rng)
    path = rng.choice(QAM16.alphabet, 8)
    for level in range(8):
        ref = q.y_zf[level] - sum(q.R[level][j] * path[j] for j in range(level + 1, 8))
        assert abs(compute_b(q.R, q.y_zf, path, level) - ref) < 1e-12


@pytest.mark.parametrize("b,expected", [(0.0, -1.0), (3.2, 3.0), (-2.0, -3.0), (2.0, 1.0), (-9.0, -3.0)])
def test_direct_enumerate(b, expected):
    assert direct_enumerate(b, 1.0) == expected


@given(st.floats(-20, 20), st.floats(0.05, 5))
def test_direct_enumerate_brute(b, r):
    s = direct_enumerate(b, r)
    errs = [abs(b - r * a) for a in QAM16.alphabet]
    assert abs(b - r * s) == min(errs)
    assert s == QAM16.alphabet[errs.index(min(errs))]


def test_accumulate_ped_examples():
    assert accumulate_ped(1.5, 2.0, 2.0, 1.0) == 1.5
    assert accumulate_ped(1.0, 2.0, 1.0, 1.0) == 2.0


def test_accumulate_chain_matches_norm(rng):
    for _ in range(200):
        _, _, q = random_system(rng)
        path = rng.choice(QAM16.alphabet, 8)
        d = 0.0
        for level in range(7, -1, -1):
            d = accumulate_ped(d, compute_b(q.R, q.y_zf, path, level), q.R[level, level], path[level])
        assert abs(d - path_ped(q.R, q.y_zf, path)) < 1e-9


def test_fsd_116_nodes_16_candidates(rng):
    _, _, q = random_system(rng)
    cl = fsd_search(q.R, q.y_zf)
    assert len(cl) == 16
    assert cl.visited_nodes == 116


def test_fsd_column_major_order(rng):
    _, _, q = random_system(rng)
    cl = fsd_search(q.R, q.y_zf)
    a = QAM16.alphabet
    for k in range(16):
        assert cl.paths[k, 7] == a[k // 4]
        assert cl.paths[k, 6] == a[k % 4]


def test_fsd_noise_free(rng):
    for _ in range(50):
        frame, _, q = random_system(rng, None)
        cl = fsd_search(q.R, q.y_zf)
        truth = q.permute(frame.s_real)
        assert cl.contains(truth)
        k = cl.best_index()
        np.testing.assert_array_equal(cl.paths[k], truth)
        assert cl.peds[k] < 1e-18
        np.testing.assert_array_equal(hard_decision(cl, q.perm), frame.bits)


def test_fsd_matches_naive(rng):
    for snr in (0.0, 10.0, 20.0):
        for _ in range(30):
            _, _, q = random_system(rng, snr)
            cl = fsd_search(q.R, q.y_zf)
            ref = naive_fsd(q.R.tolist(), q.y_zf.tolist(), DEFAULT_DISTRIBUTION.counts)
            assert [tuple(p) for p in cl.paths] == [p for p, _ in ref]
            np.testing.assert_allclose(cl.peds, [d for _, d in ref], rtol=0, atol=1e-9)


def test_level_peds_consistent(rng):
    _, _, q = random_system(rng)
    cl = fsd_search(q.R, q.y_zf)
    np.testing.assert_array_equal(cl.level_peds[:, 0], cl.peds)
    assert np.all(np.diff(cl.level_peds[:, ::-1], axis=1) >= 0)


@pytest.mark.parametrize("snr", [0.0, 10.0, 20.0])
def test_list_min_bounded_by_ml(rng, snr):
    for _ in range(30):
        _, _, q = random_system(rng, snr)
        cl = fsd_search(q.R, q.y_zf)
        ml = exhaustive_ml(q.R, q.y_zf)
        best = cl.peds.min()
        assert best >= ml.ped - 1e-9
        if cl.contains(ml.path):
            assert best == pytest.approx(ml.ped, abs=1e-9)
        else:
            assert best > ml.ped


def test_all_full_levels_equals_exhaustive(rng):
    _, _, q = random_system(rng, 5.0, n_t=2, n_r=2)
    cl = fsd_search(q.R, q.y_zf, NodeDistribution((4, 4, 4, 4)))
    ref = brute_lattice(q.R.tolist(), q.y_zf.tolist())
    got = {tuple(p): d for p, d in zip(cl.paths, cl.peds)}
    assert len(got) == 256
    for p, d in ref:
        assert got[p] == pytest.approx(d, abs=1e-9)


def test_qpsk_distribution(rng):
    _, _, q = random_system(rng, 10.0, constellation=QPSK)
    cl = fsd_search(q.R, q.y_zf, NodeDistribution.parse("11111122", 2), QPSK)
    assert len(cl) == 4
    assert cl.visited_nodes == 2 + 4 * 7


def test_fsd_input_errors(rng):
    _, _, q = random_system(rng)
    with pytest.raises(InputShapeError):
        fsd_search(q.R[:7, :7], q.y_zf)
    with pytest.raises(ConfigurationError):
        fsd_search(q.R, q.y_zf, NodeDistribution.parse("1144"))
    with pytest.raises(ConfigurationError):
        fsd_search(q.R, q.y_zf, NodeDistribution.parse("11111122", 2))


def test_hard_decision_single_candidate():
    path = np.array([[3.0, -1, 1, -3, 1, 1, -1, 3]])
    cl = CandidateList(path, np.array([0.7]))
    np.testing.assert_array_equal(hard_decision(cl), real_to_bits(path[0]))
    with pytest.raises(InputShapeError):
        hard_decision(CandidateList(np.zeros((0, 8)), np.zeros(0)))


def test_hard_decision_tie_goes_to_earliest():
    paths = np.array([[1.0] * 8, [3.0] * 8])
    cl = CandidateList(paths, np.array([2.0, 2.0]))
    np.testing.assert_array_equal(hard_decision(cl), real_to_bits(paths[0]))


def test_hard_decision_matches_recomputation(rng):
    for _ in range(1000):
        _, _, q = random_system(rng, rng.uniform(0, 20))
        cl = fsd_search(q.R, q.y_zf)
        peds = [dense_ped(q.R, q.y_zf, p) for p in cl.paths]
        best = q.unpermute(cl.paths[int(np.argmin(peds))])
        np.testing.assert_array_equal(hard_decision(cl, q.perm), real_to_bits(best))


def test_constant_complexity(rng):
    counts = set()
    for snr in (0.0, 30.0):
        for _ in range(100):
            _, _, q = random_system(rng, snr)
            cl = fsd_search(q.R, q.y_zf)
            counts.add((cl.visited_nodes, len(cl)))
    assert counts == {(116, 16)}
