import numpy as np
import pytest
from oracles import random_system, sequential_fixed_fsd

from fsdsim import InputShapeError, fsd_search, hard_decision, real_to_bits
from fsdsim.arch import (
    CacheModel,
    FixedWord,
    hardwired_symbol,
    quantize_inputs,
    simulate,
    throughput,
)
from fsdsim.errors import ParameterError


def test_cycle_counts(rng):
    _, _, q = random_system(rng)
    res = simulate(q.R, q.y_zf)
    assert res.stats.traversal_cycles == 29
    assert res.stats.n_cycles == 30
    assert res.stats.visited_nodes == 116
    res8 = simulate(q.R, q.y_zf, parallelism=8)
    assert res8.stats.n_cycles == 16 and res8.stats.visited_nodes == 116


def test_p8_same_result(rng):
    for _ in range(20):
        _, _, q = random_system(rng, 10.0)
        a, b = simulate(q.R, q.y_zf), simulate(q.R, q.y_zf, parallelism=8)
        np.testing.assert_array_equal(a.paths, b.paths)
        np.testing.assert_array_equal(a.peds_raw, b.peds_raw)


def test_bit_exact_vs_sequential(rng):
    for snr in (0.0, 10.0, 20.0):
        for _ in range(50):
            _, _, q = random_system(rng, snr)
            res = simulate(q.R, q.y_zf)
            paths, peds = sequential_fixed_fsd(q.R, q.y_zf)
            np.testing.assert_array_equal(res.paths, paths)
            np.testing.assert_array_equal(res.peds_raw, peds)


def test_cache_sizes():
    assert CacheModel.flip_flops() == {"path_history": 192, "b_cache": 192, "ped_cache": 192}


def test_hardwired_symbols():
    assert [hardwired_symbol(p, 7) for p in range(16)] == [-3] * 4 + [-1] * 4 + [1] * 4 + [3] * 4
    assert [hardwired_symbol(p, 6) for p in range(4)] == [-3, -1, 1, 3]
    with pytest.raises(ValueError):
        hardwired_symbol(0, 5)


def test_exact_inputs_noise_free():
    # R and y_zf on the quantization grid, y_zf = R s exactly
    rng = np.random.default_rng(3)
    for _ in range(20):
        R = np.triu(rng.integers(-16, 17, (8, 8)) / 32.0, 1) + np.diag(rng.integers(24, 48, 8) / 32.0)
        s = rng.choice([-3.0, -1.0, 1.0, 3.0], 8)
        y = R @ s
        res = simulate(R, y)
        assert res.stats.load_saturations == 0
        k = res.best_index()
        assert res.peds_raw[k] == 0
        np.testing.assert_array_equal(res.paths[k], s)


def test_matches_float_at_high_snr(rng):
    agree = 0
    for _ in range(100):
        _, _, q = random_system(rng, 20.0)
        res = simulate(q.R, q.y_zf)
        fx_bits = real_to_bits(q.unpermute(res.paths[res.best_index()]))
        agree += np.array_equal(fx_bits, hard_decision(fsd_search(q.R, q.y_zf), q.perm))
    assert agree >= 95


def test_candidates_rescaled(rng):
    _, _, q = random_system(rng, 20.0)
    res = simulate(q.R, q.y_zf)
    cl = res.candidates()
    ref = fsd_search(q.R, q.y_zf)
    same = np.all(cl.paths == ref.paths, axis=1)
    unsat = res.peds_raw < 2047
    np.testing.assert_allclose(cl.peds[same & unsat], ref.peds[same & unsat], atol=0.5)


def test_trace_snapshots(rng):
    _, _, q = random_system(rng)
    res = simulate(q.R, q.y_zf, trace=True)
    assert len(res.trace) == 30
    y7 = quantize_inputs(q.R, q.y_zf)[1][7]
    assert all(w == y7 for w in res.trace[0].b_cache)
    # after cycle 1 every column holds the PED of its level-7 node
    peds = res.trace[1].ped_cache
    for c in range(4):
        assert len({peds[4 * c + j] for j in range(4)}) == 1


def test_load_saturation_counted():
    R = np.eye(8) * 40.0
    res = simulate(R, np.zeros(8))
    assert res.stats.load_saturations == 8
    assert isinstance(res.cache.ped_cache[0], FixedWord)


def test_shape_check():
    with pytest.raises(InputShapeError):
        simulate(np.eye(4), np.zeros(4))


def test_throughput():
    tp = throughput(400e6, 4, 4, 30)
    assert tp.mbps == pytest.approx(213.333, abs=0.01)
    assert tp.bits_per_cycle == pytest.approx(0.5333, abs=1e-3)
    assert throughput(1e8, 4, 4, 16).bits_per_second == 1e8
    with pytest.raises(ParameterError):
        throughput(400e6, 4, 4, 0)
