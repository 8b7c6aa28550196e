import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majvote import pnk
from majvote.cdf import Arcsine, StepMajority, Beta
from majvote.errors import InvalidInputError, SizeLimitError
from majvote.pnk import (
    GenerativeModel,
    PnkRequest,
    ProfileMonotonicityWarning,
    count_compositions,
    enumerate_compositions,
    pnk_closed_form,
    pnk_monte_carlo,
    profile_from_cdf,
    profile_from_pnk,
)
from majvote.voting import classical_profile

from .oracles import pnk_by_placement, poly_count

WRONG = GenerativeModel.RESIDUAL_OVER_WRONG_CLASSES
ALL = GenerativeModel.RESIDUAL_OVER_ALL_CLASSES


@pytest.mark.parametrize(
    "n, k, d, expected",
    [(2, 1, 3, Fraction(1, 2)), (3, 1, 3, Fraction(2, 9)), (3, 0, 3, Fraction(0)), (5, 5, 7, Fraction(1))],
)
def test_closed_form_examples(n, k, d, expected):
    v = pnk_closed_form(n, k, d)
    assert v.exact == expected
    assert v.value == float(expected)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("d", [2, 3, 4])
def test_closed_form_equals_wrong_model_with_extra_class(n, d):
    # The formula spreads residual votes over d classes other than the truth.
    for k in range(n + 1):
        assert pnk_closed_form(n, k, d).exact == pnk_by_placement(n, k, d + 1, "wrong")


def test_closed_form_differs_from_both_models_at_d():
    assert pnk_by_placement(3, 1, 3, "wrong") == Fraction(1, 6)
    assert pnk_by_placement(3, 1, 3, "all") == Fraction(17, 27)
    assert pnk_closed_form(3, 1, 3).exact not in (Fraction(1, 6), Fraction(17, 27))


@pytest.mark.parametrize(
    "args, expected",
    [
        ((1, 3, 1), [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
        ((3, 3, 0), []),
        ((2, 3, 1), [(1, 1, 0), (1, 0, 1), (0, 1, 1)]),
        ((0, 2, 0), [(0, 0)]),
    ],
)
def test_enumerate_compositions_examples(args, expected):
    assert list(enumerate_compositions(*args)) == expected


@given(st.integers(0, 10), st.integers(1, 5), st.integers(0, 10))
@settings(max_examples=200, deadline=None)
def test_compositions_valid_and_counted(total, parts, cap):
    seen = list(enumerate_compositions(total, parts, cap))
    assert len(seen) == len(set(seen)) == poly_count(total, parts, cap) == count_compositions(total, parts, cap)
    for x in seen:
        assert len(x) == parts and sum(x) == total and all(0 <= v <= cap for v in x)
    assert seen == sorted(seen, reverse=True)


@pytest.mark.parametrize("n, k, d", [(0, 0, 3), (3, 4, 3), (3, -1, 3), (3, 1, 1), (2.5, 1, 3)])
def test_request_validation(n, k, d):
    with pytest.raises(InvalidInputError):
        PnkRequest(n, k, d)


def test_size_limits():
    with pytest.raises(SizeLimitError):
        pnk_closed_form(31, 3, 3)
    with pytest.raises(SizeLimitError):
        pnk_closed_form(5, 1, 9)
    with pytest.raises(SizeLimitError):
        pnk_closed_form(12, 3, 6, max_compositions=10)


class TestMonteCarlo:
    def test_analytic_cases(self):
        wrong = pnk_monte_carlo(2, 1, 3, WRONG, 10**6, seed=1)
        every = pnk_monte_carlo(2, 1, 3, ALL, 10**6, seed=2)
        assert abs(wrong.mean - 0.5) <= 3 * wrong.stderr
        assert abs(every.mean - 2 / 3) <= 3 * every.stderr

    @pytest.mark.parametrize("model", list(GenerativeModel))
    def test_no_residual_is_exact(self, model):
        est = pnk_monte_carlo(3, 3, 5, model, 1000, seed=0)
        assert est.mean == 1.0 and est.stderr == 0.0

    def test_reproducible_and_seed_sensitive(self):
        a = pnk_monte_carlo(5, 2, 4, ALL, 20_000, seed=11)
        b = pnk_monte_carlo(5, 2, 4, ALL, 20_000, seed=11)
        c = pnk_monte_carlo(5, 2, 4, ALL, 20_000, seed=12)
        assert a == b
        assert a.successes != c.successes

    def test_workers_deterministic(self):
        runs = [pnk_monte_carlo(4, 1, 3, WRONG, 50_000, seed=5, workers=3) for _ in range(2)]
        assert runs[0] == runs[1]
        one = pnk_monte_carlo(4, 1, 3, WRONG, 50_000, seed=5, workers=1)
        assert abs(runs[0].mean - one.mean) <= 4 * np.hypot(one.stderr, runs[0].stderr)

    @pytest.mark.parametrize("n, k, d", [(3, 1, 3), (4, 2, 3), (5, 2, 4)])
    def test_matches_exact_placement(self, n, k, d):
        for i, (model, key) in enumerate([(WRONG, "wrong"), (ALL, "all")]):
            est = pnk_monte_carlo(n, k, d, model, 200_000, seed=100 + i)
            assert abs(est.mean - float(pnk_by_placement(n, k, d, key))) <= 4 * est.stderr

    def test_wrong_model_nondecreasing_in_k(self):
        for d in (3, 4, 5):
            for n in range(1, 8):
                exact = [pnk_by_placement(n, k, d, "wrong") for k in range(n + 1)]
                assert exact == sorted(exact)

    @pytest.mark.parametrize("trials", [0, -5, 1.5])
    def test_bad_trials(self, trials):
        with pytest.raises(InvalidInputError):
            pnk_monte_carlo(2, 1, 3, WRONG, trials, seed=0)

    def test_bad_model_and_seed(self):
        with pytest.raises(InvalidInputError):
            pnk_monte_carlo(2, 1, 3, "middle", 10, seed=0)
        with pytest.raises(InvalidInputError):
            pnk_monte_carlo(2, 1, 3, WRONG, 10, seed=-1)


class TestProfiles:
    def test_from_cdf_examples(self):
        assert profile_from_cdf(2, Beta(1, 1)).coefficients == pytest.approx((0, 0.5, 1))
        np.testing.assert_allclose(
            profile_from_cdf(4, Arcsine()).coefficients, [0, 1 / 3, 0.5, 2 / 3, 1], atol=1e-5
        )
        assert profile_from_cdf(3, StepMajority()) == classical_profile(3)

    def test_from_pnk_examples(self):
        assert profile_from_pnk(2, 3).coefficients == (0, 0.5, 1)
        assert profile_from_pnk(1, 2).coefficients == (0, 1)
        p32 = pnk_closed_form(3, 2, 3).exact
        assert p32 == pnk_by_placement(3, 2, 4, "wrong")
        assert profile_from_pnk(3, 3).coefficients == (0, 2 / 9, float(p32), 1)

    def test_from_pnk_monotone_in_tested_range(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", ProfileMonotonicityWarning)
            for n in range(1, 13):
                for d in range(2, 6):
                    profile_from_pnk(n, d)

    def test_non_monotone_row_warns(self, monkeypatch):
        monkeypatch.setattr(pnk, "_pnk_row", lambda n, d: (0.0, 0.7, 0.6, 1.0))
        with pytest.warns(ProfileMonotonicityWarning):
            profile = profile_from_pnk(3, 3)
        assert profile.coefficients == (0.0, 0.7, 0.6, 1.0)
