import math

import numpy as np
import pytest
from scipy.stats import norm

from sdsim.engine import StreamKey, draw_normal
from sdsim.errors import InvalidBounds
from sdsim.kernels import _numba as nb, _numpy as knp


def keys(n, seed=7):
    return knp.stream_key(np.full(n, seed, dtype=np.uint64), knp.seed_bits(np.ones(n)),
                          np.full(n, 12345, dtype=np.uint64), np.arange(n, dtype=np.uint64))


def test_zero_sd_returns_mean():
    assert draw_normal(StreamKey(1, "x", 0), 1, 5, 3, 0) == 3.0


def test_same_key_same_value():
    k = StreamKey(9, "Quality", 17, 1.0)
    assert draw_normal(k, 1, 5, 3, 2) == draw_normal(k, 1, 5, 3, 2)


def test_key_components_all_matter():
    base = draw_normal(StreamKey(9, "Q", 17, 1.0), -1e9, 1e9, 0, 1)
    for k in (StreamKey(10, "Q", 17, 1.0), StreamKey(9, "R", 17, 1.0), StreamKey(9, "Q", 18, 1.0),
              StreamKey(9, "Q", 17, 2.0)):
        assert draw_normal(k, -1e9, 1e9, 0, 1) != base


def test_noise_off_clamps_mean():
    assert draw_normal(StreamKey(1, "x", 0), 1, 5, 0.2, 4, noise_on=False) == 1.0
    assert draw_normal(StreamKey(1, "x", 0), 1, 5, 7.0, 4, noise_on=False) == 5.0
    assert draw_normal(StreamKey(1, "x", 0), 1, 5, 2.5, 4, noise_on=False) == 2.5


def test_bad_bounds():
    with pytest.raises(InvalidBounds):
        draw_normal(StreamKey(1, "x", 0), 5, 1, 3, 1)
    with pytest.raises(InvalidBounds):
        draw_normal(StreamKey(1, "x", 0), 2, 2, 3, 1)


def test_truncated_draws_stay_in_bounds():
    n = 20000
    x = knp.draw(np.ones(n), np.full(n, 5.0), np.full(n, 0.2), np.full(n, 4.0), keys(n), True, 64)
    assert x.min() >= 1.0 and x.max() <= 5.0


def test_exhausted_resampling_clamps():
    # mean far outside a narrow window: every attempt misses, then the last deviate is clamped
    n = 100
    x = knp.draw(np.zeros(n), np.full(n, 1e-3), np.full(n, 50.0), np.ones(n), keys(n), True, 64)
    assert np.all(x == 1e-3)


def test_monte_carlo_mean():
    n = 1_000_000
    x = knp.draw(np.ones(n), np.full(n, 5.0), np.full(n, 3.0), np.full(n, 0.5), keys(n), True, 64)
    assert abs(x.mean() - 3.0) < 0.01
    assert abs(x.std() - 0.5) < 0.01


def test_uniforms_are_open_unit_interval_and_flat():
    u = knp.uniform(keys(200_000), 0)
    assert u.min() > 0.0 and u.max() < 1.0
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert np.all(np.abs(hist - 20_000) < 600)


def test_negative_sd_same_distribution():
    n = 200_000
    k = keys(n)
    pos = knp.draw(np.full(n, -1e9), np.full(n, 1e9), np.zeros(n), np.ones(n), k, True, 64)
    neg = knp.draw(np.full(n, -1e9), np.full(n, 1e9), np.zeros(n), -np.ones(n), k, True, 64)
    assert np.array_equal(neg, -pos)


def test_norm_ppf_accuracy():
    p = np.concatenate([np.linspace(1e-12, 1e-3, 500), np.linspace(1e-3, 1 - 1e-3, 5000),
                        1 - np.linspace(1e-12, 1e-3, 500)])
    ours = knp.norm_ppf(p)
    ref = norm.ppf(p)
    assert np.max(np.abs(ours - ref) / np.abs(ref)) < 1.2e-9
    assert knp.norm_ppf(np.array([0.5]))[0] == 0.0


def test_backends_agree_bitwise():
    k = keys(5000)
    for a in (0, 1, 63):
        u_np = knp.uniform(k, a)
        u_nb = np.array([nb.uniform(np.uint64(x), a) for x in k])
        assert np.array_equal(u_np, u_nb)
    p = knp.uniform(k, 0)
    assert np.array_equal(knp.norm_ppf(p), np.array([nb.norm_ppf(x) for x in p]))
    assert np.array_equal(knp.mix64(k), np.array([nb.mix64(np.uint64(x)) for x in k]))
    ks = keys(50, seed=3)
    assert np.array_equal(ks, np.array([nb.stream_key(np.uint64(3), np.uint64(nb.seed_bits(1.0)), np.uint64(12345),
                                                      np.uint64(i)) for i in range(50)]))


def test_seed_bits_rounds_half_up():
    assert int(knp.seed_bits(np.array([1.4]))[0]) == 1
    assert int(knp.seed_bits(np.array([1.5]))[0]) == 2
    assert nb.seed_bits(2.49) == np.uint64(2)
    assert math.isclose(float(knp.norm_ppf(np.array([0.975]))[0]), 1.959963984540054, rel_tol=1e-9)
