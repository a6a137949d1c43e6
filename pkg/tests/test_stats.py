import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from sdsim.engine import RunResult
from sdsim.errors import InsufficientData, InvalidParameter, MissingVariable, ZeroVariance
from sdsim.stats import Exponential, Gamma, LogNormal, describe, sample, skewness, summarize


def test_symmetric_sample():
    assert skewness([1, 2, 3, 4, 5]) == 0.0


def test_hand_value():
    assert skewness([0, 0, 0, 1]) == pytest.approx(2.0, abs=1e-12)


def test_errors():
    with pytest.raises(InsufficientData):
        skewness([1, 2])
    with pytest.raises(ZeroVariance):
        skewness([3, 3, 3])


samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=40).filter(
    lambda xs: np.std(xs) > 1e-3 * (1 + np.max(np.abs(xs))))


@given(samples)
def test_matches_scipy(xs):
    assert skewness(xs) == pytest.approx(scipy.stats.skew(xs, bias=False), rel=1e-8, abs=1e-8)


@given(samples)
def test_mirror_negates(xs):
    assert skewness([-x for x in xs]) == pytest.approx(-skewness(xs), rel=1e-9, abs=1e-9)


@given(samples, st.floats(-10, 10).filter(lambda a: abs(a) > 0.1), st.floats(-100, 100))
def test_affine_invariance(xs, a, b):
    expected = math.copysign(1.0, a) * skewness(xs)
    assert skewness([a * x + b for x in xs]) == pytest.approx(expected, rel=1e-6, abs=1e-6)


def test_affine_invariance_tight():
    xs = sample(Gamma(2.0), 1000, 3)
    for a, b in ((2.0, 5.0), (-0.5, 1.0), (3.0, 0.0)):
        assert abs(skewness(a * xs + b) - math.copysign(1, a) * skewness(xs)) < 1e-12


@pytest.mark.parametrize("dist", [Exponential(1.0), Gamma(2.0), Gamma(4.0), LogNormal(0.0, 0.5), Gamma(2.5)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_estimator_consistency(dist, seed):
    assert abs(skewness(sample(dist, 1_000_000, seed)) - dist.analytic_skewness()) < 0.05


def test_analytic_values():
    assert Exponential(3.0).analytic_skewness() == 2.0
    assert Gamma(4.0).analytic_skewness() == 1.0
    w = math.exp(0.25)
    assert LogNormal(0, 0.5).analytic_skewness() == pytest.approx((w + 2) * math.sqrt(w - 1))


def test_sampler_moments():
    assert sample(Exponential(2.0), 200_000, 4).mean() == pytest.approx(0.5, rel=0.01)
    assert sample(Gamma(3.0, 2.0), 200_000, 4).mean() == pytest.approx(6.0, rel=0.01)
    assert sample(Gamma(0.5, 1.0), 200_000, 4).mean() == pytest.approx(0.5, rel=0.02)
    assert np.log(sample(LogNormal(1.0, 0.3), 200_000, 4)).mean() == pytest.approx(1.0, abs=0.01)


def test_gamma_non_integer_matches_scipy():
    xs = sample(Gamma(2.5, 1.0), 50_000, 8)
    assert scipy.stats.kstest(xs, scipy.stats.gamma(2.5).cdf).pvalue > 1e-3


def test_sampling_is_reproducible():
    for d in (Exponential(1.0), LogNormal(0, 1), Gamma(2.0), Gamma(1.7)):
        assert np.array_equal(sample(d, 1000, 42), sample(d, 1000, 42))
        assert not np.array_equal(sample(d, 1000, 42), sample(d, 1000, 43))


@pytest.mark.parametrize("bad", [Exponential(0.0), LogNormal(0, -1), Gamma(0.0), Gamma(1.0, -2.0)])
def test_invalid_parameters(bad):
    with pytest.raises(InvalidParameter):
        sample(bad, 10, 0)
    with pytest.raises(InvalidParameter):
        sample(Exponential(), 0, 0)


def test_describe_constant_sample():
    s = describe([2.0, 2.0, 2.0, 2.0])
    assert (s.sd, s.skewness) == (0.0, 0.0)


def run(values, name="v"):
    values = np.asarray(values, dtype=float)
    return RunResult(times=np.arange(values.size, dtype=float), series={name: values}, metadata={})


def test_summarize_constant_run():
    s = summarize([run([4.0, 4.0, 4.0])], "v", "final-value")
    assert (s.n, s.mean, s.sd, s.skewness) == (1, 4.0, 0.0, None)


def test_summarize_two_runs():
    s = summarize([run([0.0, 1.0]), run([0.0, 3.0])], "v", "final-value")
    assert s.mean == 2.0 and s.sd == pytest.approx(math.sqrt(2))


def test_summarize_time_mean():
    assert summarize([run([1.0, 2.0, 6.0])], "v").mean == 3.0


def test_summarize_missing_variable():
    with pytest.raises(MissingVariable):
        summarize([run([1.0])], "w")
    with pytest.raises(ValueError):
        summarize([run([1.0])], "v", "median")


def test_base_ensemble_quality_in_bounds(frs):
    from sdsim import RngPolicy, RunConfig, simulate_batch
    runs = simulate_batch(frs, [RunConfig(RngPolicy(global_seed=s)) for s in range(1, 21)], save=["Avg Quality"])
    s = summarize(runs, "Avg Quality")
    assert s.n == 20 and 1.0 <= s.mean <= 5.0
