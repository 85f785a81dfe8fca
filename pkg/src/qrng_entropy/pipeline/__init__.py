"""Sample handling: simulation, calibration, bit discard, extraction and checks."""

from .extractor import (
    ExtractionRun,
    ExtractorConfig,
    ExtractorConfigError,
    discarded_entropy_bound,
    extract,
    hash_bits,
    keep_half_length,
    lhl_output_length,
    pack_bits,
    run_extraction,
    seed_bits_from_material,
    toeplitz_hash,
    toeplitz_matrix,
)
from .samples import (
    Calibration,
    CalibrationError,
    CalibrationWarning,
    SampleBlock,
    calibrate,
    calibration_stats,
    discard_msbs,
    read_raw,
    samples_to_bits,
    simulate_samples,
    write_raw,
)
from .stats import Autocorrelation, UniformityReport, autocorrelation, uniformity_checks
