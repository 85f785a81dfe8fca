"""Seeded randomness extraction sized by the leftover hash lemma.

The default family is Toeplitz hashing over GF(2): an ``out x in`` Toeplitz
matrix fixed by ``in + out - 1`` seed bits, applied independently to each
input block. A keyed BLAKE2b extractor is available behind the same
interface; it is sized with the keep-half policy and carries no
information-theoretic guarantee.

Bit conventions: samples are unpacked least significant bit first and
concatenated in stream order; output bits are packed into bytes least
significant bit first.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .samples import SampleBlock, samples_to_bits

MODES = ("information_theoretic", "keep_half")
FAMILIES = ("toeplitz", "blake2b")
_FFT_CHUNK_ELEMS = 1 << 24


class ExtractorConfigError(ValueError):
    pass


def lhl_output_length(total_min_entropy_bits: float, epsilon: float) -> int:
    """Largest output length that is ``epsilon``-close to uniform for a universal hash."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return max(0, math.floor(total_min_entropy_bits - 2 * math.log2(1 / epsilon)))


def keep_half_length(total_min_entropy_bits: float) -> int:
    return max(0, math.floor(total_min_entropy_bits / 2))


def discarded_entropy_bound(h_per_sample: float, n_bits: int, keep_bits: int) -> float:
    """Min-entropy left in the ``keep_bits`` low bits of an ``n_bits`` sample.

    Dropping ``n_bits - keep_bits`` bits can raise any outcome's probability by
    at most ``2**(n_bits - keep_bits)``.
    """
    if not 1 <= keep_bits <= n_bits:
        raise ValueError("keep_bits must be in [1, n_bits]")
    return min(float(keep_bits), max(0.0, h_per_sample - (n_bits - keep_bits)))


def seed_bits_from_material(material: bytes | str | int, length: int) -> np.ndarray:
    """Expand seed material into ``length`` bits with SHAKE-256.

    Deterministic and implementation-independent; the material itself must
    carry enough entropy for the intended use.
    """
    if isinstance(material, int):
        material = material.to_bytes(max(1, (material.bit_length() + 7) // 8), "little", signed=material < 0)
    elif isinstance(material, str):
        material = material.encode()
    raw = hashlib.shake_256(material).digest((length + 7) // 8)
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length].copy()


def seed_fingerprint(seed: np.ndarray) -> str:
    return hashlib.sha256(np.packbits(seed, bitorder="little").tobytes()).hexdigest()


@dataclass(frozen=True)
class ExtractorConfig:
    """Extractor parameters.

    ``block_min_entropy`` is the certified min-entropy of one input block; when
    given, the output length is checked against the sizing rule of ``mode``.
    """

    input_block_bits: int
    output_bits: int
    epsilon: float
    seed: np.ndarray = field(repr=False)
    mode: str = "information_theoretic"
    family: str = "toeplitz"
    block_min_entropy: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ExtractorConfigError(f"unknown mode {self.mode!r}")
        if self.family not in FAMILIES:
            raise ExtractorConfigError(f"unknown extractor family {self.family!r}")
        if self.input_block_bits < 1 or self.output_bits < 1:
            raise ExtractorConfigError("block sizes must be positive")
        if not 0 < self.epsilon < 1:
            raise ExtractorConfigError("epsilon must be in (0, 1)")
        seed = np.asarray(self.seed, dtype=np.uint8)
        if seed.ndim != 1 or np.any(seed > 1):
            raise ExtractorConfigError("seed must be a 1-D array of bits")
        if self.family == "toeplitz":
            need = self.input_block_bits + self.output_bits - 1
            if seed.size != need:
                raise ExtractorConfigError(f"Toeplitz seed must have {need} bits, got {seed.size}")
        elif not (seed.size % 8 == 0 and 128 <= seed.size <= 512):
            raise ExtractorConfigError("keyed-hash seed must be 128..512 bits, a multiple of 8")
        if self.block_min_entropy is not None:
            if self.mode == "information_theoretic":
                limit = lhl_output_length(self.block_min_entropy, self.epsilon)
                if self.output_bits > limit:
                    raise ExtractorConfigError(f"output_bits {self.output_bits} exceeds the hashing bound {limit}")
            elif self.output_bits != keep_half_length(self.block_min_entropy):
                raise ExtractorConfigError("keep_half mode requires output_bits = floor(min-entropy / 2)")
        seed.setflags(write=False)
        object.__setattr__(self, "seed", seed)

    @classmethod
    def sized(
        cls,
        block_min_entropy: float,
        input_block_bits: int,
        epsilon: float,
        seed_material,
        mode: str = "information_theoretic",
        family: str = "toeplitz",
    ) -> "ExtractorConfig":
        if mode == "information_theoretic":
            out = lhl_output_length(block_min_entropy, epsilon)
        elif mode == "keep_half":
            out = keep_half_length(block_min_entropy)
        else:
            raise ExtractorConfigError(f"unknown mode {mode!r}")
        if out < 1:
            raise ExtractorConfigError(
                f"block min-entropy {block_min_entropy:.2f} bits leaves no output at epsilon={epsilon:g}"
            )
        seed_len = input_block_bits + out - 1 if family == "toeplitz" else 256
        seed = seed_bits_from_material(seed_material, seed_len)
        return cls(input_block_bits, out, epsilon, seed, mode, family, block_min_entropy)

    @property
    def fingerprint(self) -> str:
        return seed_fingerprint(self.seed)


def toeplitz_matrix(seed: np.ndarray, n_in: int, n_out: int) -> np.ndarray:
    """Dense ``n_out x n_in`` matrix with ``T[i, j] = seed[i - j + n_in - 1]``."""
    i = np.arange(n_out)[:, None]
    j = np.arange(n_in)[None, :]
    return np.asarray(seed, dtype=np.uint8)[i - j + n_in - 1]


def toeplitz_hash(blocks: np.ndarray, seed: np.ndarray, n_out: int) -> np.ndarray:
    """GF(2) product of the seed's Toeplitz matrix with each row of ``blocks``.

    Uses FFT convolution: row ``i`` of the product is entry ``i + n_in - 1`` of
    the linear convolution of the seed with the input block.
    """
    blocks = np.atleast_2d(np.asarray(blocks, dtype=np.uint8))
    n_in = blocks.shape[1]
    seed = np.asarray(seed, dtype=float)
    if seed.size != n_in + n_out - 1:
        raise ExtractorConfigError("seed length does not match block shape")
    nfft = fft.next_fast_len(n_in + seed.size - 1, real=True)
    s_hat = fft.rfft(seed, nfft)
    out = np.empty((blocks.shape[0], n_out), dtype=np.uint8)
    rows = max(1, _FFT_CHUNK_ELEMS // nfft)
    for start in range(0, blocks.shape[0], rows):
        x = blocks[start : start + rows].astype(float)
        conv = fft.irfft(fft.rfft(x, nfft, axis=1) * s_hat, nfft, axis=1)[:, n_in - 1 : n_in - 1 + n_out]
        counts = np.rint(conv)
        if np.max(np.abs(conv - counts), initial=0.0) > 0.25:
            raise ArithmeticError("FFT convolution lost integer precision")
        out[start : start + rows] = counts.astype(np.int64) & 1
    return out


def keyed_hash(blocks: np.ndarray, key_bits: np.ndarray, n_out: int) -> np.ndarray:
    """Keyed BLAKE2b of each block, expanded with a counter to ``n_out`` bits."""
    blocks = np.atleast_2d(np.asarray(blocks, dtype=np.uint8))
    key = np.packbits(key_bits, bitorder="little").tobytes()
    n_digests = -(-n_out // 512)
    out = np.empty((blocks.shape[0], n_out), dtype=np.uint8)
    for r, row in enumerate(blocks):
        data = np.packbits(row, bitorder="little").tobytes()
        digest = b"".join(
            hashlib.blake2b(ctr.to_bytes(8, "little") + data, key=key, digest_size=64).digest()
            for ctr in range(n_digests)
        )
        out[r] = np.unpackbits(np.frombuffer(digest, dtype=np.uint8), bitorder="little")[:n_out]
    return out


def hash_bits(bits: np.ndarray, cfg: ExtractorConfig) -> np.ndarray:
    """Split a bit stream into whole input blocks (tail dropped) and hash each one."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size < cfg.input_block_bits:
        raise ExtractorConfigError(f"need at least {cfg.input_block_bits} input bits, got {bits.size}")
    n_blocks = bits.size // cfg.input_block_bits
    blocks = bits[: n_blocks * cfg.input_block_bits].reshape(n_blocks, cfg.input_block_bits)
    if cfg.family == "toeplitz":
        out = toeplitz_hash(blocks, cfg.seed, cfg.output_bits)
    else:
        out = keyed_hash(blocks, cfg.seed, cfg.output_bits)
    return out.ravel()


def extract(block: SampleBlock, cfg: ExtractorConfig) -> np.ndarray:
    """Extracted bits (0/1 array) from a sample block."""
    return hash_bits(samples_to_bits(block.samples, block.n_bits), cfg)


def pack_bits(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


@dataclass(frozen=True)
class ExtractionRun:
    bits: np.ndarray = field(repr=False)
    manifest: dict


def run_extraction(
    block: SampleBlock,
    h_min_per_sample: float,
    *,
    raw_bits: int | None = None,
    samples_per_block: int = 1024,
    epsilon: float = 2.0**-32,
    seed_material=0,
    mode: str = "information_theoretic",
    family: str = "toeplitz",
) -> ExtractionRun:
    """Size the extractor from certified per-sample entropy and hash the block.

    ``h_min_per_sample`` refers to samples of ``raw_bits`` width (defaults to the
    block width); when the block holds truncated samples the entropy is reduced
    by the number of discarded bits before sizing.
    """
    raw_bits = block.n_bits if raw_bits is None else raw_bits
    h_kept = discarded_entropy_bound(h_min_per_sample, raw_bits, block.n_bits)
    if samples_per_block < 1:
        raise ExtractorConfigError("samples_per_block must be >= 1")
    t = samples_per_block * h_kept
    cfg = ExtractorConfig.sized(t, samples_per_block * block.n_bits, epsilon, seed_material, mode, family)
    bits = extract(block, cfg)
    n_blocks = len(block) // samples_per_block
    manifest = {
        "family": family,
        "mode": mode,
        "epsilon": epsilon,
        "log2_inv_epsilon": math.log2(1 / epsilon),
        "seed_sha256": cfg.fingerprint,
        "seed_bits": int(cfg.seed.size),
        "raw_bits_per_sample": raw_bits,
        "kept_bits_per_sample": block.n_bits,
        "h_min_per_sample_raw": h_min_per_sample,
        "h_min_per_sample_kept": h_kept,
        "samples_per_block": samples_per_block,
        "input_block_bits": cfg.input_block_bits,
        "block_min_entropy": t,
        "output_bits_per_block": cfg.output_bits,
        "blocks": n_blocks,
        "input_samples": len(block),
        "unused_samples": len(block) - n_blocks * samples_per_block,
        "total_output_bits": int(bits.size),
        "bit_order": "lsb-first",
    }
    return ExtractionRun(bits, manifest)
