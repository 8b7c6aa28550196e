import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from majvote.cdf import (
    Arcsine,
    Beta,
    EmpiricalStep,
    StepMajority,
    as_points,
    betainc_regularized,
    cdf_eval,
    generalized_arcsine,
    parse_cdf,
)
from majvote.errors import DegenerateSampleError, InfeasibleMomentsError, InvalidInputError
from majvote.theory import (
    asymptotic_accuracy,
    beta_fit_moments,
    beta_from_moments,
    binomial_pmf,
    expected_accuracy,
    sample_ensemble_accuracy,
    variance_bound,
)
from majvote.voting import q_multi
from majvote.pnk import profile_from_cdf

CDFS = [StepMajority(), Arcsine(), Beta(1, 1), Beta(0.5, 0.5), Beta(2, 5), Beta(30, 0.7), generalized_arcsine(0.3)]


@given(st.floats(0.05, 40), st.floats(0.05, 40), st.floats(0, 1))
@settings(max_examples=300, deadline=None)
def test_betainc_matches_scipy(a, b, x):
    assert betainc_regularized(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)


@pytest.mark.parametrize(
    "cdf, y, expected, tol",
    [
        (Arcsine(), 0.5, 0.5, 1e-12),
        (Arcsine(), 1.0, 1.0, 0),
        (Beta(1, 1), 0.3, 0.3, 1e-12),
        (Beta(0.5, 0.5), 0.25, 1 / 3, 1e-5),
        (StepMajority(), 0.5, 0.0, 0),
        (StepMajority(), 0.51, 1.0, 0),
    ],
)
def test_cdf_eval_examples(cdf, y, expected, tol):
    assert abs(cdf_eval(cdf, y) - expected) <= tol


@pytest.mark.parametrize("y", [-0.01, 1.01, float("nan")])
def test_cdf_eval_rejects(y):
    with pytest.raises(InvalidInputError):
        cdf_eval(Arcsine(), y)


@pytest.mark.parametrize("cdf", CDFS, ids=lambda c: c.label)
def test_cdf_axioms(cdf):
    ys = np.linspace(0, 1, 201)
    fs = [cdf(y) for y in ys]
    assert fs[-1] == pytest.approx(1.0)
    assert all(0 <= f <= 1 for f in fs)
    assert all(b >= a - 1e-12 for a, b in zip(fs, fs[1:]))


@pytest.mark.parametrize("cdf", CDFS, ids=lambda c: c.label)
def test_sampling_matches_mean(cdf):
    xs = cdf.sample(np.random.default_rng(3), 200_000)
    assert ((xs >= 0) & (xs <= 1)).all()
    assert xs.mean() == pytest.approx(cdf.mean, abs=0.005)


def test_generalized_arcsine():
    g = generalized_arcsine(0.5)
    assert g(0.25) == pytest.approx(Arcsine()(0.25), abs=1e-10)
    assert generalized_arcsine(0.3)(0.4) == pytest.approx(stats.beta(0.7, 0.3).cdf(0.4), abs=1e-10)
    for alpha in (0, 1, 1.2):
        with pytest.raises(InvalidInputError):
            generalized_arcsine(alpha)


class TestEmpirical:
    def test_right_continuous(self):
        f = EmpiricalStep(((0.2, 0.25), (0.6, 1.0)))
        assert [f(0.1), f(0.2), f(0.5), f(0.6)] == [0.0, 0.25, 0.25, 1.0]
        assert f.mean == pytest.approx(0.5)

    @pytest.mark.parametrize("points", [(), ((0.5, 0.9),), ((0.6, 0.5), (0.2, 1.0)), ((0.5, 1.5),)])
    def test_rejects(self, points):
        with pytest.raises(InvalidInputError):
            EmpiricalStep(points)

    def test_as_points(self):
        f = as_points([0.3, 0.1, 0.3, 0.9])
        assert f.points == ((0.1, 0.25), (0.3, 0.75), (0.9, 1.0))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("step", StepMajority()),
        ("arcsine", Arcsine()),
        ("beta:2:5", Beta(2, 5)),
        ("genarcsine:0.25", Beta(0.75, 0.25)),
        ("point:0.6", EmpiricalStep(((0.6, 1.0),))),
        ("empirical:0.2=0.5,0.8=1", EmpiricalStep(((0.2, 0.5), (0.8, 1.0)))),
    ],
)
def test_parse_cdf(text, expected):
    assert parse_cdf(text) == expected
    assert parse_cdf(expected.label) == expected


@pytest.mark.parametrize("text", ["gauss", "beta:1", "beta:0:1", "beta:x:1", "point:2", "arcsine:1"])
def test_parse_cdf_rejects(text):
    with pytest.raises(InvalidInputError):
        parse_cdf(text)


@pytest.mark.parametrize("n", [1, 5, 60, 1000])
@pytest.mark.parametrize("mu", [0.0, 0.13, 0.5, 0.97, 1.0])
def test_binomial_pmf_matches_scipy(n, mu):
    np.testing.assert_allclose(binomial_pmf(n, mu), stats.binom.pmf(np.arange(n + 1), n, mu), atol=1e-14)


class TestExpected:
    def test_step_reduces_to_binomial_tail(self):
        assert expected_accuracy(StepMajority(), 0.6, 3) == pytest.approx(0.648, abs=1e-12)

    @pytest.mark.parametrize("mu", [0.0, 0.2, 0.55, 1.0])
    @pytest.mark.parametrize("n", [1, 7, 100])
    def test_identity_cdf_gives_mu(self, mu, n):
        assert abs(expected_accuracy(Beta(1, 1), mu, n) - mu) <= 1e-12

    def test_arcsine_near_half(self):
        assert abs(expected_accuracy(Arcsine(), 0.5, 101) - 0.5) <= 0.05

    @pytest.mark.parametrize("cdf", CDFS, ids=lambda c: c.label)
    def test_equals_q_multi_with_equal_members(self, cdf):
        for n in (3, 10):
            ref = q_multi([0.64] * n, profile_from_cdf(n, cdf))
            assert expected_accuracy(cdf, 0.64, n) == pytest.approx(ref, abs=1e-12)

    def test_rejects(self):
        with pytest.raises(InvalidInputError):
            expected_accuracy(Arcsine(), 1.2, 5)
        with pytest.raises(InvalidInputError):
            expected_accuracy(Arcsine(), 0.5, 0)

    @pytest.mark.parametrize("mu", [0.3, 0.7])
    def test_converges_to_limit(self, mu):
        gaps = [abs(expected_accuracy(Arcsine(), mu, n) - Arcsine()(mu)) for n in (11, 51, 101, 201, 501)]
        assert all(b <= a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 2e-4


@pytest.mark.parametrize(
    "cdf, mu, limit, bound",
    [
        (Arcsine(), 0.5, 0.5, 0.25),
        (StepMajority(), 0.6, 1.0, 0.0),
        (StepMajority(), 0.7, 1.0, 0.0),
        (Arcsine(), 0.25, 1 / 3, 2 / 9),
        (Beta(1, 1), 0.5, 0.5, 0.25),
    ],
)
def test_limit_and_bound(cdf, mu, limit, bound):
    assert asymptotic_accuracy(cdf, mu) == pytest.approx(limit, abs=1e-10)
    assert variance_bound(cdf, mu) == pytest.approx(bound, abs=1e-10)


class TestBetaFit:
    def test_from_moments_examples(self):
        fit = beta_from_moments(0.5, 1 / 12)
        assert (fit.a, fit.b) == pytest.approx((1.0, 1.0))
        fit = beta_from_moments(0.5, 0.125)
        assert (fit.a, fit.b) == pytest.approx((0.5, 0.5))

    @pytest.mark.parametrize("v, shape", [(1 / 12, 1.0), (0.125, 0.5)])
    def test_fit_symmetric_pair(self, v, shape):
        # Two points 0.5 -+ s have mean 0.5 and population variance s^2.
        s = math.sqrt(v)
        fit = beta_fit_moments([0.5 - s, 0.5 + s])
        assert (fit.a, fit.b) == pytest.approx((shape, shape))

    def test_errors(self):
        with pytest.raises(DegenerateSampleError):
            beta_fit_moments([0.7, 0.7])
        with pytest.raises(InfeasibleMomentsError):
            beta_fit_moments([0.0, 1.0, 0.0, 1.0])
        with pytest.raises(InvalidInputError):
            beta_fit_moments([0.4])
        with pytest.raises(InvalidInputError):
            beta_fit_moments([0.4, 1.4])

    @pytest.mark.parametrize("a, b", [(1, 1), (0.5, 0.5), (2, 5), (8, 3)])
    def test_round_trip(self, a, b):
        xs = np.random.default_rng(17).beta(a, b, 100_000)
        fit = beta_fit_moments(xs)
        assert fit.a == pytest.approx(a, rel=0.05)
        assert fit.b == pytest.approx(b, rel=0.05)


class TestSampling:
    @pytest.mark.parametrize("n", [1, 4, 17, 50])
    def test_point_mass(self, n):
        s = sample_ensemble_accuracy(EmpiricalStep.point_mass(0.6), n, Arcsine(), 100, seed=1)
        assert s.variance == 0.0
        assert s.mean == pytest.approx(q_multi([0.6] * n, profile_from_cdf(n, Arcsine())), abs=1e-12)

    def test_mean_and_variance(self):
        s = sample_ensemble_accuracy(Beta(1, 1), 15, Arcsine(), 10_000, seed=2)
        assert abs(s.mean - expected_accuracy(Arcsine(), 0.5, 15)) <= 4 * s.stderr_mean
        s = sample_ensemble_accuracy(Beta(0.5, 0.5), 51, Arcsine(), 10_000, seed=3)
        assert s.variance <= variance_bound(Arcsine(), 0.5) + 0.01

    def test_deterministic_per_worker_count(self):
        a = sample_ensemble_accuracy(Beta(2, 2), 9, Arcsine(), 5000, seed=4, workers=2)
        b = sample_ensemble_accuracy(Beta(2, 2), 9, Arcsine(), 5000, seed=4, workers=2)
        assert a == b
        assert a.draws == 5000

    @pytest.mark.parametrize("draws", [0, 1, 2.5])
    def test_rejects_draws(self, draws):
        with pytest.raises(InvalidInputError):
            sample_ensemble_accuracy(Beta(1, 1), 3, Arcsine(), draws, seed=0)
