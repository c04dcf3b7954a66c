"""
Mass-weighted inequality measures over a discrete distribution: every cell
carries a value (expenditures, wealth, ...) and a probability mass. Quantile
groups split boundary cells, so a quintile always holds exactly 20% of the
mass.
"""

import logging

import numpy as np
from scipy.integrate import trapezoid

logger = logging.getLogger(__name__)


def _flatten(values, mass):
    values = np.asarray(values, dtype=float).ravel()
    mass = np.asarray(mass, dtype=float).ravel()
    if values.shape != mass.shape:
        raise ValueError(
            "*** ERROR *** values %s and mass %s do not match" % (values.shape, mass.shape)
        )
    if np.any(mass < 0.0):
        raise ValueError("*** ERROR *** negative mass")
    total = mass.sum()
    if not total > 0.0:
        raise ValueError("*** ERROR *** distribution has no mass")
    return values, mass / total


def sort_cells(values, mass):
    """flat values and normalized masses in increasing order of value
    (stable, so ties keep their cell order)"""
    values, mass = _flatten(values, mass)
    order = np.argsort(values, kind="mergesort")
    return values[order], mass[order], order


def quantile_weights(values, mass, n_groups: int):
    """(n_groups x n_cells) matrix of the mass each cell contributes to each
    quantile group, cells in their original (flattened) order"""
    v, m, order = sort_cells(values, mass)
    upper = np.cumsum(m)
    upper[-1] = 1.0
    lower = np.concatenate(([0.0], upper[:-1]))
    edges = np.arange(n_groups + 1) / n_groups
    lo, hi = edges[:-1, None], edges[1:, None]
    overlap = np.minimum(upper[None, :], hi) - np.maximum(lower[None, :], lo)
    weights_sorted = np.clip(overlap, 0.0, None)
    weights = np.empty_like(weights_sorted)
    weights[:, order] = weights_sorted
    return weights


def group_means(values, mass, n_groups: int, of=None):
    """mean of `of` (default: `values`) within each `values`-quantile group"""
    weights = quantile_weights(values, mass, n_groups)
    target = np.asarray(values if of is None else of, dtype=float).ravel()
    return (weights @ target) / weights.sum(axis=1)


def weighted_quantiles(values, mass, qs):
    """smallest value v with F(v) >= q, for each q"""
    v, m, _ = sort_cells(values, mass)
    cdf = np.cumsum(m)
    idx = np.searchsorted(cdf, np.asarray(qs, dtype=float) - 1e-14, side="left")
    return v[np.clip(idx, 0, v.shape[0] - 1)]


def lorenz_curve(values, mass):
    """cumulative population and cumulative value shares, both starting at 0"""
    v, m, _ = sort_cells(values, mass)
    total = v @ m
    if not total > 0.0:
        raise ValueError("*** ERROR *** Lorenz curve needs a positive total")
    pop = np.concatenate(([0.0], np.cumsum(m)))
    share = np.concatenate(([0.0], np.cumsum(v * m) / total))
    return pop, share


def gini(mass, wealth, full_output: bool = False):
    """Gini index 1 - 2 * (area under the Lorenz curve).

    Negative wealth (natural borrowing limit) is handled on the support
    shifted up to zero; with `full_output` a flag reports the shift."""
    wealth = np.asarray(wealth, dtype=float)
    shifted = bool(np.min(wealth) < 0.0)
    if shifted:
        logger.warning("negative wealth in the support: Gini computed on the shifted support")
        wealth = wealth - np.min(wealth)
    v, m = _flatten(wealth, mass)
    if v @ m == 0.0:
        g = 0.0
    else:
        pop, share = lorenz_curve(wealth, mass)
        g = float(1.0 - 2.0 * trapezoid(share, pop))
    if full_output:
        return g, shifted
    return g


def gini_pairwise(mass, wealth):
    """Gini as mean absolute difference over twice the mean"""
    v, m = _flatten(wealth, mass)
    mean = v @ m
    if mean == 0.0:
        return 0.0
    diff = np.abs(v[:, None] - v[None, :])
    return float(m @ diff @ m / (2.0 * mean))


def ratio_8020(mass, values):
    """mean of the top quintile over mean of the bottom quintile"""
    means = group_means(values, mass, 5)
    if not means[0] > 0.0:
        raise ValueError("*** ERROR *** bottom quintile mean is not positive [ %s ]" % means[0])
    return float(means[-1] / means[0])


def ratio_8020_lorenz(mass, values):
    """same ratio read off the Lorenz curve: (1 - L(0.8)) / L(0.2)"""
    pop, share = lorenz_curve(values, mass)
    bottom = np.interp(0.2, pop, share)
    top = 1.0 - np.interp(0.8, pop, share)
    if not bottom > 0.0:
        raise ValueError("*** ERROR *** bottom quintile holds no value")
    return float(top / bottom)


def wealthless_share(mass, wealth, threshold: float = None):
    """mass holding wealth at or below `threshold` (default: the lowest
    wealth level in the support, i.e. the borrowing limit)"""
    wealth = np.asarray(wealth, dtype=float)
    mass = np.asarray(mass, dtype=float)
    if threshold is None:
        threshold = np.min(wealth)
    return float(mass[wealth <= threshold].sum() / mass.sum())
