import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tomoclt.discretization import field_from_values, make_grid
from tomoclt.errors import InvalidParameterError
from tomoclt.models.fields import CountField
from tomoclt.models.specs import NormalizationMode
from tomoclt.observation import (
    conditioned_positive_sample,
    coupled_positive_counts,
    observe,
    observe_all,
    simulate_counts,
    survival_probabilities,
    zero_count_cells,
)
from tomoclt.poisson import equivalence_pvalue
from tomoclt.utils.rng import keyed_stream


def counts_field(counts, N=100, p=0.5):
    counts = np.asarray(counts)
    return CountField(grid=make_grid(*counts.shape), N=N, counts=counts, p=np.full(counts.shape, p))


def test_zero_count_values():
    counts = counts_field([[0, 1]])
    add = observe(counts, NormalizationMode.ADD_ONE)
    mx = observe(counts, NormalizationMode.MAX_ONE)
    assert add.values[0, 0] == pytest.approx(math.log(100))
    assert mx.values[0, 0] == pytest.approx(math.log(100))
    assert add.values[0, 1] == pytest.approx(-math.log(2 / 100))
    assert mx.values[0, 1] == pytest.approx(-math.log(1 / 100))
    assert add.label == 'Y[add_one]'


def test_modes_differ_only_where_expected(x8, rng):
    counts = simulate_counts(x8, 5, rng)
    fields = observe_all(counts, rng)
    S = counts.counts
    positive = S >= 1
    diff = fields[NormalizationMode.ADD_ONE].values - fields[NormalizationMode.MAX_ONE].values
    assert np.allclose(diff[positive], -np.log((S[positive] + 1) / S[positive]))
    resample = fields[NormalizationMode.RESAMPLE].values
    assert np.array_equal(resample[positive], fields[NormalizationMode.MAX_ONE].values[positive])
    assert np.all(resample <= math.log(5) + 1e-12)


def test_resample_requires_rng_only_with_zeros():
    with pytest.raises(InvalidParameterError):
        observe(counts_field([[0, 3]]), NormalizationMode.RESAMPLE)
    field = observe(counts_field([[2, 3]]), 'resample')
    assert field.values[0, 0] == pytest.approx(-math.log(2 / 100))


def test_coupled_counts_keep_positive_cells(rng):
    counts = counts_field([[0, 4], [7, 0]], N=10, p=0.1)
    coupled = coupled_positive_counts(counts, rng)
    assert coupled[0, 1] == 4 and coupled[1, 0] == 7
    assert np.all(coupled >= 1)


def test_zero_count_cells():
    assert zero_count_cells(counts_field([[0, 1], [0, 0]])) == 3


def test_survival_probabilities_bounds(parabola, x16):
    p = survival_probabilities(x16)
    assert np.all(p <= 1.0)
    assert np.all(p >= math.exp(-2 * parabola.sup_bound))
    assert np.all(p[-1] == 1.0)


def test_simulate_rejects_bad_dose(x8, rng):
    with pytest.raises(InvalidParameterError):
        simulate_counts(x8, 0, rng)
    with pytest.raises(InvalidParameterError):
        simulate_counts(x8, 2.5, rng)


def test_last_row_has_mean_N(parabola):
    grid = make_grid(4, 4)
    from tomoclt.discretization import discretize_transform
    xfield = discretize_transform(parabola, grid)
    N, reps = 50, 2000
    rows = []
    spot = []
    for r in range(reps):
        counts = simulate_counts(xfield, N, keyed_stream(11, r))
        rows.append(counts.counts[-1])
        spot.append(counts.counts[1, 2])
    rows = np.array(rows, dtype=float)
    assert abs(rows.mean() - N) <= 4 * math.sqrt(N / rows.size)
    lam = N * math.exp(-xfield.values[1, 2])
    assert abs(np.mean(spot) - lam) <= 4 * math.sqrt(lam / reps)


def test_direct_and_thinned_cells_are_equivalent(x8):
    direct = np.array([simulate_counts(x8, 30, keyed_stream(1, r)).counts[2, 3] for r in range(5000)])
    thinned = np.array([
        simulate_counts(x8, 30, keyed_stream(2, r), sampler='thinned').counts[2, 3] for r in range(5000)
    ])
    assert equivalence_pvalue(direct, thinned) > 0.001


def test_same_stream_same_counts(x8):
    a = simulate_counts(x8, 100, keyed_stream(5, 1, 2))
    b = simulate_counts(x8, 100, keyed_stream(5, 1, 2))
    c = simulate_counts(x8, 100, keyed_stream(5, 1, 3))
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-12, max_value=50.0), st.integers(min_value=0, max_value=1000))
def test_conditioned_sample_is_positive(lam, seed):
    assert conditioned_positive_sample(lam, keyed_stream(seed)) >= 1


def test_conditioned_mean(rng):
    lam = 2.0
    draws = np.array([conditioned_positive_sample(lam, rng) for _ in range(10 ** 5)], dtype=float)
    mean = lam / (1 - math.exp(-lam))
    var = (lam + lam ** 2) / (1 - math.exp(-lam)) - mean ** 2
    assert mean == pytest.approx(2.3130, abs=1e-4)
    assert abs(draws.mean() - mean) <= 4 * math.sqrt(var / draws.size)


def test_conditioned_law_matches_truncated_poisson(rng):
    lam = 20.0
    conditioned = np.array([conditioned_positive_sample(lam, rng) for _ in range(20000)])
    plain = rng.poisson(lam, size=40000)
    assert equivalence_pvalue(conditioned, plain[plain > 0]) > 0.001


def test_tiny_rate_uses_inverse_cdf(rng):
    values = [conditioned_positive_sample(1e-10, rng) for _ in range(100)]
    assert all(v >= 1 for v in values)
    assert values.count(1) >= 99


def test_inverse_cdf_branch_is_logged(rng):
    records = []
    handler = logging.Handler()
    handler.emit = records.append
    log = logging.getLogger('tomoclt.observation')
    log.addHandler(handler)
    log.setLevel(logging.DEBUG)
    try:
        conditioned_positive_sample(1e-10, rng)
        conditioned_positive_sample(5.0, rng)
    finally:
        log.removeHandler(handler)
        log.setLevel(logging.NOTSET)
    assert len(records) == 1
    assert 'inversa' in records[0].getMessage()


def test_observe_all_shares_counts(x8, rng):
    counts = simulate_counts(x8, 1000, rng)
    fields = observe_all(counts, rng)
    assert set(fields) == set(NormalizationMode)
    assert all(field.grid.same_as(x8.grid) for field in fields.values())


def test_lln_error_shrinks_with_dose(x8):
    def mean_norm(N):
        from tomoclt.discretization import l2_norm
        norms = [
            l2_norm(observe(simulate_counts(x8, N, keyed_stream(3, r)), 'add_one') - x8)
            for r in range(50)
        ]
        return np.mean(norms)

    assert mean_norm(10_000) < mean_norm(100) / 5


def test_field_from_values_roundtrip(grid8):
    field = field_from_values(grid8, np.zeros(grid8.shape), label='cero')
    assert field.label == 'cero'
