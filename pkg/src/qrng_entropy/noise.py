"""Gaussian quantum/classical noise model in quantum-noise units.

The quantum (vacuum) quadrature noise has unit variance by construction, so
every other quantity (classical noise, dc offset, ADC range) is measured in
multiples of the quantum standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

SIGMA_Q = 1.0


class DegenerateModelError(ValueError):
    """Raised when a density is requested from a model with infinite classical noise."""


def qcnr_to_sigma_e(qcnr_db: float) -> float:
    """Classical-noise standard deviation for a quantum-to-classical noise ratio.

    ``+inf`` dB maps to 0 and ``-inf`` dB maps to ``math.inf``.
    """
    qcnr_db = float(qcnr_db)
    if math.isnan(qcnr_db):
        raise ValueError("qcnr_db is NaN")
    if qcnr_db == math.inf:
        return 0.0
    if qcnr_db == -math.inf:
        return math.inf
    return math.sqrt(10.0 ** (-qcnr_db / 10.0))


def sigma_e_to_qcnr(sigma_e: float) -> float:
    sigma_e = float(sigma_e)
    if sigma_e < 0 or math.isnan(sigma_e):
        raise ValueError(f"sigma_e must be >= 0, got {sigma_e}")
    if sigma_e == 0.0:
        return math.inf
    if sigma_e == math.inf:
        return -math.inf
    return 10.0 * math.log10(SIGMA_Q**2 / sigma_e**2)


@dataclass(frozen=True)
class NoiseModel:
    """Measured quadrature ``M = Q + E`` with ``Q ~ N(0, 1)`` and ``E ~ N(offset, sigma_e**2)``.

    Parameters
    ----------
    sigma_e : float
        Classical-noise standard deviation in quantum-noise units. ``0`` means
        no classical noise, ``math.inf`` means the classical noise swamps the
        quantum signal.
    delta_offset : float
        dc offset of the measured signal, in quantum-noise units.
    """

    sigma_e: float = 0.0
    delta_offset: float = 0.0

    def __post_init__(self):
        sigma_e = float(self.sigma_e)
        if math.isnan(sigma_e) or sigma_e < 0:
            raise ValueError(f"sigma_e must be >= 0, got {self.sigma_e}")
        if not math.isfinite(self.delta_offset):
            raise ValueError(f"delta_offset must be finite, got {self.delta_offset}")
        object.__setattr__(self, "sigma_e", sigma_e)
        object.__setattr__(self, "delta_offset", float(self.delta_offset))

    @classmethod
    def from_qcnr(cls, qcnr_db: float, delta_offset: float = 0.0) -> "NoiseModel":
        return cls(qcnr_to_sigma_e(qcnr_db), delta_offset)

    @property
    def sigma_q(self) -> float:
        return SIGMA_Q

    @property
    def qcnr_db(self) -> float:
        return sigma_e_to_qcnr(self.sigma_e)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.sigma_e)

    @property
    def sigma_m(self) -> float:
        """Standard deviation of the measured signal."""
        return math.sqrt(SIGMA_Q**2 + self.sigma_e**2)


def measurement_pdf(model: NoiseModel, m):
    """Density of the measured (undigitized) signal, ``N(offset, 1 + sigma_e**2)``."""
    if not model.is_finite:
        raise DegenerateModelError("degenerate model: classical noise is infinite")
    return norm.pdf(m, loc=model.delta_offset, scale=model.sigma_m)


def conditional_pdf(model: NoiseModel, m, e):
    """Density of the measurement given the classical-noise value ``e``.

    This is the unit-variance quantum noise shifted by ``e`` and the dc offset.
    """
    return norm.pdf(np.asarray(m) - np.asarray(e) - model.delta_offset)
