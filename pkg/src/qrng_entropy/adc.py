"""Saturating n-bit ADC: bin geometry and discretized distributions.

Bin ``i`` (``-2**(n-1) <= i <= 2**(n-1) - 1``) is centred at ``i * delta`` with
``delta = R / 2**(n-1)``. The analog acceptance window is
``[-R + delta/2, R - 3*delta/2]``; anything below it lands in the lowest bin and
anything above it lands in the highest bin.

All bin masses are differences of the standard normal CDF. A dc offset moves
the signal relative to the fixed ADC grid; the grid itself never moves.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .noise import DegenerateModelError, NoiseModel

MAX_BITS = 24
TINY_MASS = 1e-300


@dataclass(frozen=True)
class AdcConfig:
    n_bits: int
    range_r: float

    def __post_init__(self):
        if isinstance(self.n_bits, bool) or int(self.n_bits) != self.n_bits:
            raise ValueError(f"n_bits must be an integer, got {self.n_bits!r}")
        object.__setattr__(self, "n_bits", int(self.n_bits))
        if not 1 <= self.n_bits <= MAX_BITS:
            raise ValueError(f"n_bits must be in [1, {MAX_BITS}], got {self.n_bits}")
        r = float(self.range_r)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"range_r must be finite and > 0, got {self.range_r}")
        object.__setattr__(self, "range_r", r)

    @property
    def bin_width(self) -> float:
        return self.range_r / 2 ** (self.n_bits - 1)

    @property
    def i_min(self) -> int:
        return -(2 ** (self.n_bits - 1))

    @property
    def i_max(self) -> int:
        return 2 ** (self.n_bits - 1) - 1

    @property
    def n_levels(self) -> int:
        return 2**self.n_bits

    @property
    def acceptance(self) -> tuple[float, float]:
        """Analog input window outside of which the end bins saturate."""
        d = self.bin_width
        return -self.range_r + d / 2, self.range_r - 1.5 * d

    def bin_indices(self) -> np.ndarray:
        return np.arange(self.i_min, self.i_max + 1)

    def bin_centers(self) -> np.ndarray:
        return self.bin_indices() * self.bin_width

    def cut_points(self) -> np.ndarray:
        """The ``2**n - 1`` boundaries between adjacent bins."""
        k = np.arange(self.i_min, self.i_max)
        return (k + 0.5) * self.bin_width

    def digitize(self, m) -> np.ndarray:
        """Map analog values to (saturating) bin indices."""
        idx = np.floor(np.asarray(m, dtype=float) / self.bin_width + 0.5)
        return np.clip(idx, self.i_min, self.i_max).astype(np.int64)


@dataclass(frozen=True)
class DiscreteDistribution:
    probabilities: np.ndarray = field(repr=False)
    config: AdcConfig

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.shape != (self.config.n_levels,):
            raise ValueError(f"expected {self.config.n_levels} probabilities, got shape {p.shape}")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __getitem__(self, i: int) -> float:
        """Probability of bin index ``i`` (signed, not positional)."""
        if not self.config.i_min <= i <= self.config.i_max:
            raise IndexError(f"bin index {i} out of range")
        return float(self.probabilities[i - self.config.i_min])

    @property
    def bin_centers(self) -> np.ndarray:
        return self.config.bin_centers()

    @property
    def max_prob(self) -> float:
        return float(self.probabilities.max())

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.probabilities)) + self.config.i_min

    def min_entropy(self) -> float:
        return -math.log2(self.max_prob)

    def to_csv(self, dest=None) -> str:
        """Write ``bin_center,probability`` rows; returns the CSV text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bin_center", "probability"])
        for c, p in zip(self.bin_centers, self.probabilities):
            writer.writerow([repr(float(c)), repr(float(p))])
        text = buf.getvalue()
        if dest is not None:
            if isinstance(dest, (str, os.PathLike)):
                with open(dest, "w", newline="") as fh:
                    fh.write(text)
            else:
                dest.write(text)
        return text


def _bin_masses(cuts: np.ndarray) -> np.ndarray:
    """Masses of the standard normal between consecutive standardized cut points.

    Bins left of zero use CDF differences and bins right of zero use survival
    differences, so far-tail masses keep their relative precision.
    """
    lo = np.concatenate(([-np.inf], cuts))
    hi = np.concatenate((cuts, [np.inf]))
    left = ndtr(hi) - ndtr(lo)
    right = ndtr(-lo) - ndtr(-hi)
    mid = 0.5 * (lo + hi)
    mid[0], mid[-1] = hi[0], lo[-1]
    p = np.where(mid <= 0, left, right)
    p = np.clip(p, 0.0, 1.0)
    p[p < TINY_MASS] = 0.0
    return p


def discretize_marginal(model: NoiseModel, adc: AdcConfig) -> DiscreteDistribution:
    if not model.is_finite:
        raise DegenerateModelError("degenerate model: classical noise is infinite")
    z = (adc.cut_points() - model.delta_offset) / model.sigma_m
    return DiscreteDistribution(_bin_masses(z), adc)


def discretize_conditional(model: NoiseModel, adc: AdcConfig, e: float) -> DiscreteDistribution:
    """Bin masses of the measurement given classical-noise value ``e``."""
    e = float(e)
    if not math.isfinite(e):
        raise ValueError(f"e must be finite, got {e}")
    z = adc.cut_points() - e - model.delta_offset
    return DiscreteDistribution(_bin_masses(z), adc)


def interior_prob(adc: AdcConfig) -> float:
    """Largest mass a single interior bin can hold: ``erf(delta / (2*sqrt(2)))``."""
    return math.erf(adc.bin_width / (2 * math.sqrt(2)))


def left_edge_prob(adc: AdcConfig, e_shifted):
    """Mass of the lowest (saturating) bin for a signal centred at ``e_shifted``."""
    return ndtr(-(np.asarray(e_shifted, dtype=float) + adc.range_r - adc.bin_width / 2))


def right_edge_prob(adc: AdcConfig, e_shifted):
    """Mass of the highest (saturating) bin for a signal centred at ``e_shifted``."""
    return ndtr(np.asarray(e_shifted, dtype=float) - adc.range_r + 1.5 * adc.bin_width)


def max_conditional_prob(adc: AdcConfig, e_shifted):
    """Guessing probability of the digitized output for a known shift ``e + offset``.

    The maximum of the lowest-bin mass, the best-case interior bin mass and the
    highest-bin mass. Accepts scalars or arrays.
    """
    c = interior_prob(adc)
    out = np.maximum(np.maximum(left_edge_prob(adc, e_shifted), c), right_edge_prob(adc, e_shifted))
    return float(out) if np.ndim(out) == 0 else out
