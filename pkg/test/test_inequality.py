import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from foodgap.analysis.inequality import quantile_weights
from foodgap.analysis.inequality import group_means
from foodgap.analysis.inequality import weighted_quantiles
from foodgap.analysis.inequality import gini
from foodgap.analysis.inequality import gini_pairwise
from foodgap.analysis.inequality import ratio_8020
from foodgap.analysis.inequality import ratio_8020_lorenz
from foodgap.analysis.inequality import wealthless_share

positive = st.floats(min_value=0.01, max_value=100.0)


def test_gini_trivial_cases():
    assert gini([1.0], [3.0]) == pytest.approx(0.0)
    assert gini([0.5, 0.5], [0.0, 7.0]) == pytest.approx(0.5)
    assert gini([0.25, 0.25, 0.5], [2.0, 2.0, 5.0]) == pytest.approx(gini([0.5, 0.5], [2.0, 5.0]))


def test_gini_shifts_negative_support():
    g, shifted = gini([0.5, 0.5], [-1.0, 6.0], full_output=True)
    assert shifted
    assert g == pytest.approx(0.5)
    assert gini([0.5, 0.5], [0.0, 0.0]) == 0.0


@settings(max_examples=50, deadline=None)
@given(
    values=arrays(np.float64, 12, elements=positive),
    mass=arrays(np.float64, 12, elements=st.floats(min_value=0.001, max_value=1.0)),
)
def test_gini_two_ways(values, mass):
    assert gini(mass, values) == pytest.approx(gini_pairwise(mass, values), abs=1e-10)


def test_ratio_8020():
    assert ratio_8020(np.full(7, 1.0 / 7), np.full(7, 4.0)) == pytest.approx(1.0)
    assert ratio_8020([0.5, 0.5], [1.0, 9.0]) == pytest.approx(9.0)
    with pytest.raises(ValueError):
        ratio_8020([0.5, 0.5], [0.0, 9.0])


@settings(max_examples=50, deadline=None)
@given(
    values=arrays(np.float64, 15, elements=positive),
    mass=arrays(np.float64, 15, elements=st.floats(min_value=0.001, max_value=1.0)),
)
def test_ratio_8020_matches_lorenz(values, mass):
    assert ratio_8020(mass, values) == pytest.approx(ratio_8020_lorenz(mass, values), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    values=arrays(np.float64, 9, elements=positive),
    mass=arrays(np.float64, 9, elements=st.floats(min_value=0.001, max_value=1.0)),
)
def test_quantile_groups_hold_equal_mass(values, mass):
    weights = quantile_weights(values, mass, 10)
    assert np.allclose(weights.sum(axis=1), 0.1, atol=1e-12)
    assert np.allclose(weights.sum(axis=0), mass / mass.sum(), atol=1e-12)
    means = group_means(values, mass, 10)
    assert np.all(np.diff(means) >= -1e-9)


def test_weighted_quantiles():
    q = weighted_quantiles([3.0, 1.0, 2.0], [0.2, 0.5, 0.3], [0.1, 0.5, 0.6, 1.0])
    assert list(q) == [1.0, 1.0, 2.0, 3.0]


def test_wealthless_share():
    assert wealthless_share([1.0], [0.0]) == 1.0
    assert wealthless_share([0.0, 0.4, 0.6], [0.0, 1.0, 2.0]) == 0.0
    assert wealthless_share([0.3, 0.7], [0.0, 1.0]) == pytest.approx(0.3)
    assert wealthless_share([0.3, 0.7], [-0.5, 1.0]) == pytest.approx(0.3)
