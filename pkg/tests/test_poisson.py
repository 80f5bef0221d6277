import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tomoclt.errors import InvalidParameterError
from tomoclt.poisson import (
    abs_central_moment,
    central_moment_poly,
    check_rate,
    equivalence_pvalue,
    evaluate_moment,
    lower_tail_bound,
    moment_bound_ratio,
    sample_direct,
    sample_field,
    sample_thinned,
)


@pytest.mark.parametrize('r, coeffs', [
    (0, (1,)),
    (1, (0,)),
    (2, (0, 1)),
    (3, (0, 1)),
    (4, (0, 1, 3)),
    (5, (0, 1, 10)),
    (6, (0, 1, 25, 15)),
])
def test_central_moment_coefficients(r, coeffs):
    assert central_moment_poly(r).coeffs == coeffs


def test_mu4_at_two():
    assert central_moment_poly(4)(2.0) == pytest.approx(14.0)


def test_degree_and_constant_term():
    for r in range(2, 21):
        poly = central_moment_poly(r)
        assert poly.degree == r // 2
        assert poly.coeffs[0] == 0
        assert all(isinstance(c, int) for c in poly.coeffs)


def test_rejects_large_order():
    with pytest.raises(InvalidParameterError):
        central_moment_poly(21)
    with pytest.raises(InvalidParameterError):
        central_moment_poly(-1)


def test_mu6_monte_carlo(rng):
    lam = 3.0
    draws = sample_field(1, np.full(10 ** 6, lam), rng).astype(float)
    sixth = (draws - lam) ** 6
    se = sixth.std(ddof=1) / math.sqrt(sixth.size)
    assert abs(sixth.mean() - evaluate_moment(central_moment_poly(6), lam)) <= 4 * se


@pytest.mark.slow
@pytest.mark.parametrize('lam', [0.5, 1.0, 5.0, 20.0])
def test_monte_carlo_moments_match_recursion(lam, rng):
    draws = sample_field(1, np.full(10 ** 7, lam), rng).astype(float) - lam
    for r in range(2, 9):
        powers = draws ** r
        se = powers.std(ddof=1) / math.sqrt(powers.size)
        assert abs(powers.mean() - evaluate_moment(central_moment_poly(r), lam)) <= 4 * se


def test_direct_sampler_moments(rng):
    lam = 4.0
    draws = sample_field(1, np.full(10 ** 6, lam), rng).astype(float)
    assert abs(draws.mean() - lam) <= 4 * math.sqrt(lam / draws.size)
    band = 5 * math.sqrt(evaluate_moment(central_moment_poly(4), lam) - lam ** 2) / 1e3
    assert abs(draws.var(ddof=1) - lam) <= band


def test_small_rate_zero_fraction(rng):
    lam = 0.01
    draws = sample_field(1, np.full(10 ** 6, lam), rng)
    q = math.exp(-lam)
    assert abs(np.mean(draws == 0) - q) <= 4 * math.sqrt(q * (1 - q) / draws.size)


def test_sample_direct_single_draw(rng):
    sample = sample_direct(7.5, rng)
    assert sample.value >= 0
    assert sample.mean == 7.5


@pytest.mark.parametrize('lam', [0.0, -1.0, math.inf, math.nan])
def test_sample_direct_rejects_bad_rate(lam, rng):
    with pytest.raises(InvalidParameterError):
        sample_direct(lam, rng)


def test_sample_thinned_validation(rng):
    with pytest.raises(InvalidParameterError):
        sample_thinned(10, 0.0, rng)
    with pytest.raises(InvalidParameterError):
        sample_thinned(10, 1.5, rng)
    with pytest.raises(InvalidParameterError):
        sample_thinned(0, 0.5, rng)
    assert sample_thinned(10, 1.0, rng).mean == 10.0


def test_unknown_sampler(rng):
    with pytest.raises(InvalidParameterError):
        sample_field(10, np.ones(3), rng, sampler='normal')


@pytest.mark.parametrize('N, p', [(50, 0.5), (10, math.exp(-2)), (1000, 0.9)])
def test_thinned_equivalent_to_direct(N, p, rng):
    probs = np.full(10 ** 5, p)
    direct = sample_field(N, probs, rng, sampler='direct')
    thinned = sample_field(N, probs, rng, sampler='thinned')
    assert equivalence_pvalue(direct, thinned) > 0.001


def test_thinned_mean(rng):
    N, p = 10, math.exp(-2)
    draws = sample_field(N, np.full(10 ** 5, p), rng, sampler='thinned')
    assert abs(draws.mean() - N * p) <= 4 * math.sqrt(N * p / draws.size)


def test_equivalence_detects_different_laws(rng):
    a = sample_field(1, np.full(10 ** 4, 5.0), rng)
    b = sample_field(1, np.full(10 ** 4, 7.0), rng)
    assert equivalence_pvalue(a, b) < 1e-6


def test_abs_central_moment_examples():
    assert abs_central_moment(2, 7.0) == pytest.approx(7.0, rel=1e-12)
    assert abs_central_moment(4, 3.0) == pytest.approx(30.0, rel=1e-12)
    assert abs_central_moment(3, 1.0) == pytest.approx(1.73576, abs=1e-4)


@pytest.mark.parametrize('lam', [0.5, 1.0, 5.0, 20.0, 50.0])
def test_even_absolute_moments_match_polynomials(lam):
    for k in range(1, 5):
        expected = evaluate_moment(central_moment_poly(2 * k), lam)
        assert abs_central_moment(2 * k, lam) == pytest.approx(expected, rel=1e-10)


def test_abs_central_moment_validation():
    with pytest.raises(InvalidParameterError):
        abs_central_moment(3, 0.0)
    with pytest.raises(InvalidParameterError):
        abs_central_moment(11, 1.0)


def test_moment_bound_ratio_is_bounded():
    for r in range(1, 7):
        large = [moment_bound_ratio(r, lam) for lam in np.logspace(0, 3, 40)]
        assert max(large) <= 50
        small = [moment_bound_ratio(r, lam) for lam in np.linspace(math.exp(-4), 1.0, 20)]
        assert all(math.isfinite(v) for v in small)


def test_lower_tail_bound_values():
    assert lower_tail_bound(20, 0.5) == pytest.approx(math.exp(-10 * (1 - math.log(2))))
    assert lower_tail_bound(20, 0.5) == pytest.approx(0.0465, abs=1e-4)
    assert lower_tail_bound(20, 0.999999) == pytest.approx(1.0, abs=1e-9)


def test_lower_tail_bound_dominates_empirical_tail(rng):
    draws = sample_field(1, np.full(10 ** 6, 20.0), rng)
    assert np.mean(draws <= 10) <= lower_tail_bound(20, 0.5)


@pytest.mark.parametrize('a', [0.0, 1.0, 1.5])
def test_lower_tail_bound_rejects_a(a):
    with pytest.raises(InvalidParameterError):
        lower_tail_bound(5.0, a)


@given(st.floats(max_value=0.0, allow_nan=False))
def test_check_rate_rejects_non_positive(lam):
    with pytest.raises(InvalidParameterError):
        check_rate(lam)
