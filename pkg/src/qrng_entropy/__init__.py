"""Secure-randomness accounting for Gaussian-noise QRNGs read out by a saturating ADC.

Everything is expressed in quantum-noise units (vacuum quadrature variance 1).
"""

from .adc import (
    AdcConfig,
    DiscreteDistribution,
    discretize_conditional,
    discretize_marginal,
    max_conditional_prob,
)
from .entropy import (
    EntropyReport,
    ExcursionBound,
    QuadratureError,
    guess_prob_average,
    min_entropy_average,
    min_entropy_unconditional,
    min_entropy_worst_case,
    nyquist_rate,
    photon_entropy_ceiling,
    secure_rate,
)
from .noise import (
    DegenerateModelError,
    NoiseModel,
    conditional_pdf,
    measurement_pdf,
    qcnr_to_sigma_e,
    sigma_e_to_qcnr,
)
from .optimize import (
    OptimizationError,
    OptimizationResult,
    optimize_r_average,
    optimize_r_worst_case,
    solve_crossovers,
)

__version__ = "0.1.0"
