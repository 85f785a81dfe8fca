"""Independent reference implementations used as test oracles.

Nothing here imports the package; the formulas are coded from scratch with
scipy.stats / mpmath so that agreement is a genuine cross-check.
"""

import math

import mpmath
import numpy as np
from scipy import stats


def normal_cdf_mp(x, dps=40):
    with mpmath.workdps(dps):
        return float(mpmath.ncdf(x))


def bin_masses_dense(n_bits, r, shift, step_frac=1e-4, tail=14.0):
    """Bin masses of N(shift, 1) by composite Simpson quadrature on each bin.

    Interior bins are integrated on a grid of step at most ``delta * step_frac``;
    end bins integrate the density out to ``tail`` standard deviations.
    """
    delta = r / 2 ** (n_bits - 1)
    lo_edge, hi_edge = -r + delta / 2, r - 1.5 * delta
    n_interior = 2**n_bits - 2
    edges = lo_edge + delta * np.arange(n_interior + 1)
    per_bin = int(math.ceil(1 / step_frac))
    per_bin += per_bin % 2
    masses = []
    left_lo = min(lo_edge, shift - tail) - 1.0
    masses.append(_simpson(shift, left_lo, lo_edge, 400_000))
    for a, b in zip(edges[:-1], edges[1:]):
        masses.append(_simpson(shift, a, b, per_bin))
    right_hi = max(hi_edge, shift + tail) + 1.0
    masses.append(_simpson(shift, hi_edge, right_hi, 400_000))
    return np.array(masses)


def _simpson(mu, a, b, n):
    if b <= a:
        return 0.0
    x = np.linspace(a, b, n + 1)
    y = np.exp(-0.5 * (x - mu) ** 2) / math.sqrt(2 * math.pi)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def per_e_guess_three_branch(n_bits, r, e_shifted):
    """max of lower-saturation, best-interior and upper-saturation probabilities."""
    delta = r / 2 ** (n_bits - 1)
    e = np.asarray(e_shifted, dtype=float)
    low = stats.norm.sf(e + r - delta / 2)
    mid = math.erf(delta / (2 * math.sqrt(2)))
    high = stats.norm.cdf(e - r + 1.5 * delta)
    return np.maximum(np.maximum(low, high), mid)


def per_e_guess_exact_bins(n_bits, r, e_shifted):
    """max over all 2**n explicit bin masses, vectorized over ``e_shifted``."""
    delta = r / 2 ** (n_bits - 1)
    cuts = -r + delta / 2 + delta * np.arange(2**n_bits - 1)
    e = np.atleast_1d(np.asarray(e_shifted, dtype=float))[:, None]
    cdf = stats.norm.cdf(cuts[None, :] - e)
    cdf = np.concatenate([np.zeros((e.shape[0], 1)), cdf, np.ones((e.shape[0], 1))], axis=1)
    return np.diff(cdf, axis=1).max(axis=1)


def guess_prob_grid(n_bits, r, sigma_e, offset=0.0, points=10**6, k=12.0, per_e=per_e_guess_three_branch):
    """Riemann sum of p(e) * max_i P(i | e) on a uniform grid over offset +/- k sigma_e."""
    e = np.linspace(offset - k * sigma_e, offset + k * sigma_e, points)
    w = stats.norm.pdf(e, loc=offset, scale=sigma_e)
    w /= w.sum()
    total = 0.0
    for chunk in np.array_split(np.arange(points), max(1, points // 200_000)):
        total += float(np.dot(w[chunk], per_e(n_bits, r, e[chunk])))
    return total


def worst_case_closed_form(n_bits, r, shift):
    delta = r / 2 ** (n_bits - 1)
    c1 = normal_cdf_mp(shift - r + 1.5 * delta)
    c2 = float(mpmath.erf(delta / (2 * mpmath.sqrt(2))))
    return -math.log2(max(c1, c2))
