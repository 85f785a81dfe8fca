"""Digitized sample blocks: simulation, raw-file I/O, calibration and MSB discard."""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..adc import AdcConfig
from ..noise import NoiseModel

MIN_CALIBRATION_SAMPLES = 10_000
_DTYPES = {1: "<i1", 2: "<i2", 4: "<i4"}


class CalibrationError(ValueError):
    pass


class CalibrationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Calibration:
    """Variance/mean statistics in raw ADC code units."""

    sigma_m2: float
    sigma_e2: float
    mean: float

    def __post_init__(self):
        if not self.sigma_m2 >= self.sigma_e2 >= 0:
            raise ValueError("calibration requires sigma_m2 >= sigma_e2 >= 0")

    @property
    def sigma_q_raw(self) -> float:
        """Quantum-noise standard deviation in ADC codes."""
        return math.sqrt(self.sigma_m2 - self.sigma_e2)

    @property
    def qcnr_db(self) -> float:
        if self.sigma_e2 == 0:
            return math.inf
        return 10 * math.log10((self.sigma_m2 - self.sigma_e2) / self.sigma_e2)

    def to_model(self) -> NoiseModel:
        sq = self.sigma_q_raw
        return NoiseModel(math.sqrt(self.sigma_e2) / sq, self.mean / sq)


@dataclass(frozen=True)
class SampleBlock:
    """Signed ADC codes in ``[-2**(n-1), 2**(n-1) - 1]`` plus their provenance."""

    samples: np.ndarray = field(repr=False)
    adc: AdcConfig
    provenance: str = "simulated"
    calibration: Optional[Calibration] = None

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if s.size and not np.issubdtype(s.dtype, np.integer):
            raise TypeError(f"samples must be integers, got {s.dtype}")
        s = s.astype(np.int64, copy=False)
        if s.size and (s.min() < self.adc.i_min or s.max() > self.adc.i_max):
            raise ValueError(f"samples fall outside the {self.adc.n_bits}-bit code range")
        if self.provenance not in ("simulated", "ingested"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "samples", s)

    @property
    def n_bits(self) -> int:
        return self.adc.n_bits

    def __len__(self) -> int:
        return self.samples.size


def simulate_samples(
    model: NoiseModel,
    adc: AdcConfig,
    count: int,
    rng_seed: int,
    *,
    quantum: bool = True,
) -> SampleBlock:
    """Draw ``m = q + e`` with ``q ~ N(0, 1)`` and ``e ~ N(offset, sigma_e**2)``, then digitize.

    ``quantum=False`` gives the blocked-signal record (classical noise only).
    """
    if int(count) != count or count <= 0:
        raise ValueError(f"count must be a positive integer, got {count}")
    if not model.is_finite:
        raise ValueError("cannot simulate infinite classical noise")
    rng = np.random.default_rng(rng_seed)
    m = rng.normal(model.delta_offset, model.sigma_e, size=int(count)) if model.sigma_e else np.full(
        int(count), model.delta_offset
    )
    if quantum:
        m += rng.standard_normal(int(count))
    return SampleBlock(adc.digitize(m), adc, "simulated")


def calibration_stats(signal_on: SampleBlock, signal_blocked: SampleBlock) -> Calibration:
    if len(signal_on) == 0 or len(signal_blocked) == 0:
        raise CalibrationError("calibration blocks must be nonempty")
    if signal_on.adc != signal_blocked.adc:
        raise CalibrationError("calibration blocks were recorded with different ADC settings")
    if min(len(signal_on), len(signal_blocked)) < MIN_CALIBRATION_SAMPLES:
        warnings.warn(
            f"calibration block shorter than {MIN_CALIBRATION_SAMPLES} samples", CalibrationWarning, stacklevel=3
        )
    on = signal_on.samples.astype(float)
    off = signal_blocked.samples.astype(float)
    sigma_m2, sigma_e2 = float(on.var()), float(off.var())
    if sigma_m2 <= sigma_e2:
        raise CalibrationError(f"no quantum clearance: signal variance {sigma_m2:g} <= blocked variance {sigma_e2:g}")
    return Calibration(sigma_m2, sigma_e2, float(on.mean()))


def calibrate(signal_on: SampleBlock, signal_blocked: SampleBlock) -> NoiseModel:
    """Noise model in quantum-noise units from a signal record and a blocked-signal record."""
    return calibration_stats(signal_on, signal_blocked).to_model()


def discard_msbs(block: SampleBlock, keep_bits: int) -> SampleBlock:
    """Keep only the ``keep_bits`` least significant bits of every sample.

    The kept bits are reinterpreted as a signed ``keep_bits``-wide code. The bin
    width is preserved, so the new ADC range shrinks accordingly.
    """
    n = block.n_bits
    if not 1 <= keep_bits <= n:
        raise ValueError(f"keep_bits must be in [1, {n}], got {keep_bits}")
    if keep_bits == n:
        return block
    mask = (1 << keep_bits) - 1
    low = block.samples & mask
    signed = np.where(low >= 1 << (keep_bits - 1), low - (1 << keep_bits), low)
    adc = AdcConfig(keep_bits, block.adc.bin_width * 2 ** (keep_bits - 1))
    return replace(block, samples=signed, adc=adc)


def samples_to_bits(samples: np.ndarray, width: int, chunk: int = 1 << 20) -> np.ndarray:
    """Two's-complement bits of each sample, least significant first, samples in order."""
    if not 1 <= width <= 32:
        raise ValueError("width must be in [1, 32]")
    samples = np.asarray(samples, dtype=np.int64)
    out = np.empty(samples.size * width, dtype=np.uint8)
    word = "<u2" if width <= 16 else "<u4"
    nbits = 16 if width <= 16 else 32
    for start in range(0, samples.size, chunk):
        part = (samples[start : start + chunk] & ((1 << width) - 1)).astype(word)
        bits = np.unpackbits(part.view(np.uint8), bitorder="little").reshape(-1, nbits)[:, :width]
        out[start * width : (start + part.size) * width] = bits.ravel()
    return out


def write_raw(
    block: SampleBlock,
    path,
    *,
    sample_rate: float = 0.0,
    channel_id: int = 0,
    width_bytes: int = 2,
) -> Path:
    """Headerless little-endian two's-complement stream plus a ``<path>.json`` sidecar."""
    if width_bytes not in _DTYPES:
        raise ValueError(f"width_bytes must be one of {sorted(_DTYPES)}")
    if block.n_bits > 8 * width_bytes:
        raise ValueError(f"{block.n_bits}-bit samples do not fit in {width_bytes} bytes")
    path = Path(path)
    block.samples.astype(_DTYPES[width_bytes]).tofile(path)
    sidecar = {
        "n_bits": block.n_bits,
        "sample_rate": sample_rate,
        "channel_id": channel_id,
        "width_bytes": width_bytes,
        "range_r": block.adc.range_r,
        "provenance": block.provenance,
        "count": len(block),
    }
    sidecar_path = Path(os.fspath(path) + ".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    return sidecar_path


def read_raw(path, sidecar=None, *, range_r: Optional[float] = None) -> SampleBlock:
    """Load a raw sample stream; ADC settings come from the JSON sidecar."""
    path = Path(path)
    sidecar = Path(sidecar) if sidecar else Path(os.fspath(path) + ".json")
    meta = json.loads(sidecar.read_text())
    width = int(meta.get("width_bytes", 2))
    if width not in _DTYPES:
        raise ValueError(f"unsupported sample width {width} bytes")
    r = range_r if range_r is not None else meta.get("range_r")
    if r is None:
        raise ValueError("ADC range unknown: pass range_r or record it in the sidecar")
    data = np.fromfile(path, dtype=_DTYPES[width])
    return SampleBlock(data.astype(np.int64), AdcConfig(int(meta["n_bits"]), float(r)), "ingested")
