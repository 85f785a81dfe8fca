"""Assembly of EntropyReport records at a fixed or optimized ADC range."""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Optional

from .adc import AdcConfig
from .entropy import (
    EntropyReport,
    ExcursionBound,
    average_guess_details,
    min_entropy_unconditional,
    min_entropy_worst_case,
    _entropy,
)
from .noise import NoiseModel
from .optimize import optimize_r_average, optimize_r_worst_case


def _unconditional(model: NoiseModel, adc: Optional[AdcConfig]) -> Optional[float]:
    if adc is None or not model.is_finite:
        return None
    return min_entropy_unconditional(model, adc)


def _report(model, n_bits, bound, range_r, h_unc, h_worst, h_avg, r_worst, r_avg, crossovers):
    e1, e2 = crossovers
    return EntropyReport(
        n_bits=n_bits,
        qcnr_db=round(model.qcnr_db, 10),  # strip dB -> sigma -> dB round-off
        sigma_e=model.sigma_e,
        delta_offset=model.delta_offset,
        k_sigma=bound.k_sigma,
        delta_max=bound.delta_max,
        range_r=range_r,
        h_min_unconditional=h_unc,
        h_min_worst=h_worst,
        h_min_avg=h_avg,
        optimal_r_worst=r_worst,
        optimal_r_avg=r_avg,
        h_per_bit_worst=h_worst / n_bits,
        h_per_bit_avg=h_avg / n_bits,
        crossover_e1=e1,
        crossover_e2=e2,
    )


def analyze(model: NoiseModel, n_bits: int, range_r: float, bound: ExcursionBound) -> EntropyReport:
    """Both conditional min-entropies at a caller-chosen range."""
    adc = AdcConfig(n_bits, range_r)
    avg = average_guess_details(model, adc)
    return _report(
        model,
        n_bits,
        bound,
        adc.range_r,
        _unconditional(model, adc),
        min_entropy_worst_case(model, adc, bound),
        _entropy(avg.probability),
        None,
        None,
        (avg.e1, avg.e2),
    )


def optimize(model: NoiseModel, n_bits: int, bound: ExcursionBound) -> EntropyReport:
    """Each conditional min-entropy at its own optimal range.

    The unconditional figure is evaluated at the average-case range.
    """
    worst = optimize_r_worst_case(model, n_bits, bound)
    avg = optimize_r_average(model, n_bits)
    crossovers = (None, None)
    adc_avg = None
    if math.isfinite(avg.optimal_r):
        adc_avg = AdcConfig(n_bits, avg.optimal_r)
        details = average_guess_details(model, adc_avg)
        crossovers = (details.e1, details.e2)
    return _report(
        model,
        n_bits,
        bound,
        None,
        _unconditional(model, adc_avg),
        worst.achieved_entropy,
        avg.achieved_entropy,
        None if math.isnan(worst.optimal_r) else worst.optimal_r,
        None if math.isnan(avg.optimal_r) else avg.optimal_r,
        crossovers,
    )


def report_schema() -> dict:
    """JSON schema for :meth:`EntropyReport.to_dict` output."""
    text = resources.files(__package__).joinpath("schemas", "entropy_report.schema.json").read_text()
    return json.loads(text)
