"""Choice of the ADC range parameter ``R`` that maximizes conditional min-entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr, ndtri

from .adc import AdcConfig, interior_prob, left_edge_prob, right_edge_prob
from .entropy import ExcursionBound, min_entropy_average, min_entropy_worst_case
from .noise import NoiseModel

ROOT_XTOL = 1e-12
GOLDEN_XTOL = 1e-7
INV_PHI = (math.sqrt(5) - 1) / 2
R_FLOOR = 1e-6


class OptimizationError(ArithmeticError):
    """The optimizer could not bracket or isolate a maximum.

    ``detail`` carries the bracket endpoints or the coarse-scan trace.
    """

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal range and the entropy reached there.

    For the worst case ``residual`` is the edge-minus-interior probability at
    the root; for the average case it is the width of the final golden-section
    bracket.
    """

    optimal_r: float
    achieved_entropy: float
    residual: float
    iterations: int
    mode: str = "worst"
    trace: tuple = field(default=(), repr=False, compare=False)


def _log_interior(r: float, n_bits: int) -> float:
    delta = r / 2 ** (n_bits - 1)
    return math.log(math.erf(delta / (2 * math.sqrt(2))))


def optimize_r_worst_case(model: NoiseModel, n_bits: int, bound: ExcursionBound) -> OptimizationResult:
    """Range at which the saturated top bin (at the largest allowed shift) equals
    the best interior bin.

    The top-bin mass falls with ``R`` while the interior mass grows, so the root
    is unique whenever it exists. Infinite classical noise or an unbounded
    window gives zero entropy for every ``R``; ``optimal_r`` is then NaN.
    """
    AdcConfig(n_bits, 1.0)  # validates n_bits
    shift = bound.shift_max(model) if model.is_finite else math.inf
    if not math.isfinite(shift):
        return OptimizationResult(math.nan, 0.0, 0.0, 0, "worst")
    scale = 1.5 / 2 ** (n_bits - 1) - 1.0
    if scale >= 0:
        # with a single interior-free pair of bins the top bin only grows with R
        raise OptimizationError(f"no edge/interior crossing exists for n_bits={n_bits}", (R_FLOOR, math.inf))

    def g(r):
        return float(log_ndtr(shift + scale * r)) - _log_interior(r, n_bits)

    lo, hi = R_FLOOR, max(1.0, 2 * (shift + 8.0))
    if not g(lo) > 0:
        raise OptimizationError("worst-case objective not positive at the lower bracket", (lo, hi))
    for _ in range(60):
        if g(hi) < 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise OptimizationError(
            f"could not bracket the worst-case optimum for n_bits={n_bits}", (R_FLOOR, hi)
        )
    r, info = brentq(g, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, full_output=True)
    adc = AdcConfig(n_bits, r)
    residual = abs(float(right_edge_prob(adc, shift)) - interior_prob(adc))
    return OptimizationResult(r, min_entropy_worst_case(model, adc, bound), residual, info.iterations, "worst")


def solve_crossovers(model: NoiseModel, adc: AdcConfig) -> tuple[float, float]:
    """Shifts ``e + offset`` at which the lowest / highest bin overtakes the interior bin.

    Each crossover is found by bracketed root solving on the log-probability
    difference. If no interior region exists the two edges cross first and the
    pair collapses to that single crossing point, ``-delta/2``.
    """
    if model.sigma_e == 0.0:
        raise ValueError("crossovers are only defined for sigma_e > 0")
    log_c = math.log(interior_prob(adc))
    d, r = adc.bin_width, adc.range_r
    span = 40.0

    def f_left(e):
        return float(log_ndtr(-(e + r - d / 2))) - log_c

    def f_right(e):
        return float(log_ndtr(e - r + 1.5 * d)) - log_c

    e1 = brentq(f_left, -r + d / 2 - span, -r + d / 2 + span, xtol=ROOT_XTOL)
    e2 = brentq(f_right, r - 1.5 * d - span, r - 1.5 * d + span, xtol=ROOT_XTOL)
    if e1 >= e2:
        return -d / 2, -d / 2
    return e1, e2


def crossovers_closed_form(adc: AdcConfig) -> tuple[float, float]:
    """Same crossovers via the inverse normal CDF (no root solving)."""
    z = float(ndtri(interior_prob(adc)))
    d, r = adc.bin_width, adc.range_r
    e1, e2 = -z - r + d / 2, z + r - 1.5 * d
    if e1 >= e2:
        return -d / 2, -d / 2
    return e1, e2


def _scan(objective, grid):
    values = np.array([objective(r) for r in grid])
    best = int(np.argmax(values))  # first index wins ties: smallest R
    peaks = [
        i
        for i in range(len(values))
        if (i == 0 or values[i] > values[i - 1] + 1e-12)
        and (i == len(values) - 1 or values[i] > values[i + 1] + 1e-12)
    ]
    return values, best, peaks


def _golden_max(objective, a: float, b: float, xtol: float):
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = objective(x1), objective(x2)
    evals = 2
    while b - a > xtol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = objective(x2)
        evals += 1
    return (x1, f1, b - a, evals) if f1 >= f2 else (x2, f2, b - a, evals)


def optimize_r_average(model: NoiseModel, n_bits: int) -> OptimizationResult:
    """Range maximizing the average conditional min-entropy.

    A coarse scan over ``R = 0.5, 1.0, ...`` up to ``max(10, 5*sigma_e + |offset| + 8)``
    brackets the maximum, then golden-section search refines it. If the scan
    shows more than one peak or peaks at its upper end, it is retried once on a
    doubled, finer grid before giving up.
    """
    AdcConfig(n_bits, 1.0)
    if not model.is_finite:
        return OptimizationResult(math.nan, 0.0, 0.0, 0, "average")

    def objective(r):
        return min_entropy_average(model, AdcConfig(n_bits, r))

    e_eff = 5 * model.sigma_e + abs(model.delta_offset)
    upper, step = max(10.0, e_eff + 8.0), 0.5
    trace = []
    for attempt in range(2):
        grid = np.arange(step, upper + step / 2, step)
        values, best, peaks = _scan(objective, grid)
        trace.append((tuple(grid), tuple(values)))
        if len(peaks) == 1 and best < len(grid) - 1:
            break
        upper, step = 2 * upper, step / 2
    else:
        raise OptimizationError("average-case objective is not unimodal on the scan grid", tuple(trace))

    a = grid[best - 1] if best > 0 else R_FLOOR
    b = grid[best + 1]
    r, h, width, evals = _golden_max(objective, a, b, GOLDEN_XTOL)
    return OptimizationResult(r, h, width, len(grid) + evals, "average", tuple(trace))
