"""Min-entropy of the digitized output, unconditional and conditioned on classical noise.

Two adversary models are covered:

* worst case: the adversary may set the classical noise anywhere inside an
  excursion window ``|e| <= k * sigma_e`` (plus a bounded dc offset) and we
  take the most favourable value for them;
* average case: the adversary only observes the classical noise, so the
  per-value guessing probability is averaged over its Gaussian distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .adc import (
    AdcConfig,
    discretize_marginal,
    interior_prob,
    left_edge_prob,
    max_conditional_prob,
    right_edge_prob,
)
from .noise import DegenerateModelError, NoiseModel

# Gaussian truncation of the classical-noise integrals, in units of sigma_e.
K_TRUNC = 12.0
QUAD_EPSABS = 1e-15
QUAD_EPSREL = 1e-11
P_FLOOR = np.finfo(float).tiny


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, abserr: float):
        super().__init__(f"{message} (achieved error estimate {abserr:.3e})")
        self.abserr = abserr


def _entropy(p: float) -> float:
    p = min(max(float(p), P_FLOOR), 1.0)
    return 0.0 if p == 1.0 else -math.log2(p)


@dataclass(frozen=True)
class ExcursionBound:
    """Assumed window on the adversary-controlled classical noise.

    ``|e| <= k_sigma * sigma_e`` and ``|offset| <= delta_max``.
    """

    k_sigma: float = 5.0
    delta_max: float = 0.0

    def __post_init__(self):
        if math.isnan(self.k_sigma) or self.k_sigma < 0:
            raise ValueError(f"k_sigma must be >= 0, got {self.k_sigma}")
        if not (math.isfinite(self.delta_max) and self.delta_max >= 0):
            raise ValueError(f"delta_max must be finite and >= 0, got {self.delta_max}")

    def e_max(self, model: NoiseModel) -> float:
        if model.sigma_e == 0.0:
            return 0.0
        return self.k_sigma * model.sigma_e

    def shift_max(self, model: NoiseModel) -> float:
        """Largest total shift ``|e + offset|``; a known model offset is always covered."""
        return self.e_max(model) + max(self.delta_max, abs(model.delta_offset))


def min_entropy_unconditional(model: NoiseModel, adc: AdcConfig) -> float:
    return _entropy(discretize_marginal(model, adc).max_prob)


def min_entropy_worst_case(model: NoiseModel, adc: AdcConfig, bound: ExcursionBound) -> float:
    """Worst-case conditional min-entropy over the excursion window, in bits.

    An unbounded window (``k_sigma = inf`` with noisy classical channel) or
    infinite classical noise gives exactly 0.
    """
    if not model.is_finite:
        return 0.0
    shift = bound.shift_max(model)
    if not math.isfinite(shift):
        return 0.0
    c_edge = float(right_edge_prob(adc, shift))
    return _entropy(max(c_edge, interior_prob(adc)))


class AverageGuess(NamedTuple):
    probability: float
    abserr: float
    e1: Optional[float]
    e2: Optional[float]


def average_guess_details(model: NoiseModel, adc: AdcConfig) -> AverageGuess:
    """Average guessing probability plus quadrature error and branch crossovers.

    The total shift ``e + offset`` seen by the ADC is ``N(offset, sigma_e**2)``.
    Below ``e1`` the lowest bin is the adversary's best guess, above ``e2`` the
    highest bin, and in between an interior bin. The middle region is closed
    form; the two tails are integrated adaptively in standardized coordinates,
    truncated at ``K_TRUNC`` standard deviations (the neglected mass is added
    to the error estimate).
    """
    if not model.is_finite:
        return AverageGuess(1.0, 0.0, None, None)
    mu, sigma = model.delta_offset, model.sigma_e
    if sigma == 0.0:
        return AverageGuess(max_conditional_prob(adc, mu), 0.0, None, None)

    from .optimize import solve_crossovers

    e1, e2 = solve_crossovers(model, adc)
    z1, z2 = (e1 - mu) / sigma, (e2 - mu) / sigma
    c = interior_prob(adc)
    middle = (ndtr(z2) - ndtr(z1)) * c if z2 > z1 else 0.0

    def left(z):
        return math.exp(-0.5 * z * z) * float(left_edge_prob(adc, mu + sigma * z))

    def right(z):
        return math.exp(-0.5 * z * z) * float(right_edge_prob(adc, mu + sigma * z))

    norm_const = 1.0 / math.sqrt(2 * math.pi)
    total, abserr = middle, 2 * float(ndtr(-K_TRUNC))
    for func, a, b in ((left, -K_TRUNC, min(z1, K_TRUNC)), (right, max(z2, -K_TRUNC), K_TRUNC)):
        if b <= a:
            continue
        points = [0.0] if a < 0.0 < b else None
        val, err, info, *rest = integrate.quad(
            func, a, b, points=points, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200, full_output=1
        )
        if rest and rest[0] and err > max(1e-12, 1e-8 * abs(val)):
            raise QuadratureError(f"tail integral on [{a:.3g}, {b:.3g}] did not converge", err * norm_const)
        total += val * norm_const
        abserr += err * norm_const
    return AverageGuess(min(max(total, P_FLOOR), 1.0), abserr, e1, e2)


def guess_prob_average(model: NoiseModel, adc: AdcConfig) -> float:
    """Adversary's expected optimal guessing probability when it only observes ``e``."""
    return average_guess_details(model, adc).probability


def min_entropy_average(model: NoiseModel, adc: AdcConfig) -> float:
    return _entropy(guess_prob_average(model, adc))


def photon_entropy_ceiling(mean_photon_number: float) -> float:
    """Min-entropy ceiling set by the local-oscillator photon number per sample.

    ``-log2(1 / (sqrt(2*pi) * |alpha|))`` with ``|alpha|**2`` the mean photon number.
    """
    if not mean_photon_number > 0:
        raise ValueError(f"mean photon number must be > 0, got {mean_photon_number}")
    return 0.5 * math.log2(2 * math.pi * mean_photon_number)


def nyquist_rate(bandwidth_hz: float, bits_per_sample: float) -> float:
    """Bit rate for sampling at twice the bandwidth with the given entropy per sample."""
    if not bandwidth_hz > 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth_hz}")
    if bits_per_sample < 0:
        raise ValueError(f"bits per sample must be >= 0, got {bits_per_sample}")
    return 2.0 * bandwidth_hz * bits_per_sample


def secure_rate(bandwidth_hz: float, bits_per_sample: float, channels: int = 1, keep_fraction: float = 1.0) -> float:
    """Aggregate output rate over independent channels after extraction.

    ``keep_fraction`` is the share of certified entropy kept by the extractor
    (0.5 for the keep-half policy).
    """
    if channels < 1:
        raise ValueError("channels must be >= 1")
    if not 0 < keep_fraction <= 1:
        raise ValueError("keep_fraction must be in (0, 1]")
    return channels * keep_fraction * nyquist_rate(bandwidth_hz, bits_per_sample)


REPORT_FIELDS = (
    "n_bits",
    "qcnr_db",
    "sigma_e",
    "delta_offset",
    "k_sigma",
    "delta_max",
    "range_r",
    "h_min_unconditional",
    "h_min_worst",
    "h_min_avg",
    "optimal_r_worst",
    "optimal_r_avg",
    "h_per_bit_worst",
    "h_per_bit_avg",
    "crossover_e1",
    "crossover_e2",
)


def _json_number(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


@dataclass(frozen=True)
class EntropyReport:
    """Flat record of entropy figures for one configuration.

    ``range_r`` is the range the figures were evaluated at when it was fixed by
    the caller; after optimization it is ``None`` and the two ``optimal_r_*``
    fields hold the range each figure was evaluated at.
    """

    n_bits: int
    qcnr_db: float
    sigma_e: float
    delta_offset: float
    k_sigma: float
    delta_max: float
    range_r: Optional[float]
    h_min_unconditional: Optional[float]
    h_min_worst: float
    h_min_avg: float
    optimal_r_worst: Optional[float]
    optimal_r_avg: Optional[float]
    h_per_bit_worst: float
    h_per_bit_avg: float
    crossover_e1: Optional[float]
    crossover_e2: Optional[float]

    @property
    def crossovers(self):
        return self.crossover_e1, self.crossover_e2

    def to_dict(self) -> dict:
        return {k: _json_number(v) for k, v in asdict(self).items()}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def csv_header() -> list[str]:
        return list(REPORT_FIELDS)

    def csv_row(self) -> list:
        d = self.to_dict()
        return ["" if d[k] is None else d[k] for k in REPORT_FIELDS]
