"""Sample autocorrelation and lightweight uniformity checks on extracted bits.

These are sanity checks, not a replacement for a full statistical battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import erfc

from .samples import SampleBlock

MIN_TEST_BITS = 10_000


@dataclass(frozen=True)
class Autocorrelation:
    lags: np.ndarray
    coefficients: np.ndarray
    reference: float  # 1/sqrt(N), the i.i.d. standard deviation

    def within(self, n_sigma: float = 4.0) -> bool:
        return bool(np.all(np.abs(self.coefficients) <= n_sigma * self.reference))


def autocorrelation(block, max_lag: int) -> Autocorrelation:
    """Normalized autocorrelation ``r_k`` for ``k = 1..max_lag``.

    ``r_k = sum((x_i - mu) * (x_{i+k} - mu)) / ((N - k) * s**2)`` with ``mu`` and
    ``s**2`` the block mean and (population) variance.
    """
    x = block.samples if isinstance(block, SampleBlock) else np.asarray(block)
    x = x.astype(float)
    n = x.size
    if max_lag < 1 or n <= max_lag:
        raise ValueError(f"need 1 <= max_lag < N, got max_lag={max_lag}, N={n}")
    x = x - x.mean()
    var = float(np.dot(x, x)) / n
    if var == 0.0:
        raise ValueError("constant input: autocorrelation undefined")
    lags = np.arange(1, max_lag + 1)
    r = np.array([np.dot(x[:-k], x[k:]) / ((n - k) * var) for k in lags])
    return Autocorrelation(lags, r, 1 / math.sqrt(n))


@dataclass(frozen=True)
class UniformityReport:
    n_bits: int
    alpha: float
    monobit_z: float
    monobit_p: float
    chi2_stat: float
    chi2_p: float
    autocorr_max_abs_z: float
    autocorr_worst_lag: int
    autocorr_min_p: float
    max_lag: int

    @property
    def monobit_pass(self) -> bool:
        return self.monobit_p >= self.alpha

    @property
    def chi2_pass(self) -> bool:
        return self.chi2_p >= self.alpha

    @property
    def autocorr_pass(self) -> bool:
        # Bonferroni over the lags so the family-wise level stays at alpha
        return self.autocorr_min_p >= self.alpha / self.max_lag

    @property
    def passed(self) -> bool:
        return self.monobit_pass and self.chi2_pass and self.autocorr_pass

    def lines(self) -> list[str]:
        def mark(ok):
            return "PASS" if ok else "FAIL"

        return [
            f"monobit      z={self.monobit_z:+.3f} p={self.monobit_p:.4g} {mark(self.monobit_pass)}",
            f"byte chi2    X2={self.chi2_stat:.1f} p={self.chi2_p:.4g} {mark(self.chi2_pass)}",
            f"bit autocorr max|z|={self.autocorr_max_abs_z:.3f} (lag {self.autocorr_worst_lag}) "
            f"min p={self.autocorr_min_p:.4g} {mark(self.autocorr_pass)}",
        ]


def uniformity_checks(bits, alpha: float = 1e-3, max_lag: int = 100) -> UniformityReport:
    """Monobit, byte-frequency chi-square and lag-1..max_lag bit autocorrelation."""
    b = np.asarray(bits, dtype=np.uint8)
    n = b.size
    if n < MIN_TEST_BITS:
        raise ValueError(f"need at least {MIN_TEST_BITS} bits, got {n}")
    if np.any(b > 1):
        raise ValueError("bits must be 0 or 1")

    ones = int(np.count_nonzero(b))
    z = (2 * ones - n) / math.sqrt(n)
    p_mono = float(erfc(abs(z) / math.sqrt(2)))

    nbytes = n // 8
    counts = np.bincount(np.packbits(b[: nbytes * 8], bitorder="little"), minlength=256)
    chi2_stat, chi2_p = stats.chisquare(counts)

    # agreements - disagreements between b_i and b_{i+k} is N(0, N-k) under independence
    zs = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        m = n - k
        disagree = int(np.count_nonzero(b[:-k] != b[k:]))
        zs[k - 1] = (m - 2 * disagree) / math.sqrt(m)
    worst = int(np.argmax(np.abs(zs)))
    return UniformityReport(
        n_bits=n,
        alpha=alpha,
        monobit_z=z,
        monobit_p=p_mono,
        chi2_stat=float(chi2_stat),
        chi2_p=float(chi2_p),
        autocorr_max_abs_z=float(abs(zs[worst])),
        autocorr_worst_lag=worst + 1,
        autocorr_min_p=float(erfc(abs(zs[worst]) / math.sqrt(2))),
        max_lag=max_lag,
    )
