"""Acceptance criteria, one PASS/FAIL line each.

The lines are collected in ``RESULTS`` and echoed in the pytest terminal
summary (see conftest.py); running this file directly prints them as well.
"""

import math
import time

import numpy as np
import pytest

from oracles import guess_prob_grid
from qrng_entropy import (
    AdcConfig,
    ExcursionBound,
    NoiseModel,
    discretize_conditional,
    discretize_marginal,
    guess_prob_average,
    min_entropy_average,
    min_entropy_unconditional,
    min_entropy_worst_case,
    nyquist_rate,
    optimize_r_average,
    optimize_r_worst_case,
    photon_entropy_ceiling,
    secure_rate,
)
from qrng_entropy.adc import interior_prob, right_edge_prob
from qrng_entropy.pipeline import (
    autocorrelation,
    discard_msbs,
    run_extraction,
    seed_bits_from_material,
    simulate_samples,
    toeplitz_hash,
    uniformity_checks,
)
from qrng_entropy.tables import build_table
from reference_tables import AVERAGE, WORST_8, WORST_16

RESULTS = []


def record(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _table_misses(entries, ref, tol_h, tol_r):
    worst_h = worst_r = 0.0
    misses = []
    for e in entries:
        key = (e.qcnr_db, e.n_bits) if e.k_sigma is None else (e.qcnr_db, e.n_bits, e.k_sigma)
        h, r = ref[key]
        dh = abs(e.h_min - h)
        dr = 0.0 if r is None else abs(e.optimal_r - r)
        worst_h, worst_r = max(worst_h, dh), max(worst_r, dr)
        if dh > tol_h or dr > tol_r or (r is None) != (e.optimal_r is None):
            misses.append((key, e.h_min, e.optimal_r))
    return misses, worst_h, worst_r


def test_c1_table_i():
    start = time.perf_counter()
    entries = build_table("I")
    elapsed = time.perf_counter() - start
    misses, dh, dr = _table_misses(entries, AVERAGE, 0.01, 0.01)
    ok = not misses and len(entries) == 10 and elapsed < 60
    record("C1 Table I", ok, f"{len(entries)} entries, max |dH|={dh:.4f}, max |dR|={dr:.4f}, {elapsed:.2f} s, misses={misses}")


def test_c2_tables_ii_iii():
    all_misses, n, dh_max, dr_max = [], 0, 0.0, 0.0
    for which, ref in (("II", WORST_8), ("III", WORST_16)):
        entries = build_table(which)
        misses, dh, dr = _table_misses(entries, ref, 0.01, 0.02)
        all_misses += misses
        n += sum(e.optimal_r is not None for e in entries)
        dh_max, dr_max = max(dh_max, dh), max(dr_max, dr)
    record("C2 Tables II-III", not all_misses, f"{n} finite entries, max |dH|={dh_max:.4f}, max |dR|={dr_max:.4f}, misses={all_misses}")


def test_c3_fig3_branch_equality():
    model = NoiseModel.from_qcnr(10.0)
    res = optimize_r_worst_case(model, 8, ExcursionBound(10.0))
    adc = AdcConfig(8, res.optimal_r)
    gap = abs(float(right_edge_prob(adc, 10 * model.sigma_e)) - interior_prob(adc))
    ok = abs(res.optimal_r - 5.35) <= 0.01 and gap <= 1e-6
    record("C3 Fig. 3 optimum", ok, f"R={res.optimal_r:.4f}, |edge - interior|={gap:.2e}")


def test_c4_lab_operating_point():
    model = NoiseModel.from_qcnr(13.52, -0.02)
    avg = optimize_r_average(model, 16)
    ok_avg = abs(avg.achieved_entropy - 14.19) <= 0.02 and abs(avg.optimal_r - 4.32) <= 0.05
    record("C4a average case at 13.52 dB", ok_avg, f"H={avg.achieved_entropy:.4f} bits at R={avg.optimal_r:.4f}")

    worst5 = optimize_r_worst_case(model, 16, ExcursionBound(5.0))
    if abs(worst5.achieved_entropy - 13.76) <= 0.05:
        record("C4b worst case at 13.52 dB", True, f"k=5: H={worst5.achieved_entropy:.4f} bits")
        return
    scan = []
    for k in np.round(np.arange(3.0, 10.0 + 1e-9, 0.1), 1):
        res = optimize_r_worst_case(model, 16, ExcursionBound(float(k)))
        scan.append((float(k), res.achieved_entropy, res.optimal_r))
    hits = [s for s in scan if abs(s[1] - 13.76) <= 0.05]
    best = min(scan, key=lambda s: abs(s[1] - 13.76))
    ch1 = optimize_r_worst_case(NoiseModel.from_qcnr(13.32, -0.02), 16, ExcursionBound(best[0]))
    detail = (
        f"k=5 gives {worst5.achieved_entropy:.4f} (off by {worst5.achieved_entropy - 13.76:+.3f}); "
        f"scan k in [3,10]: {len(hits)} k values within 0.05, closest k={best[0]:.1f} -> "
        f"H={best[1]:.4f} at R={best[2]:.4f}; same k at 13.32 dB -> {ch1.achieved_entropy:.4f}"
    )
    record("C4b worst case at 13.52 dB (k scan)", bool(hits), detail)


def test_c5_photon_ceiling():
    h = photon_entropy_ceiling(1.6e8)
    record("C5a photon ceiling", abs(h - 14.9) <= 0.05, f"{h:.4f} bits at 1.6e8 photons (target 14.9 +/- 0.05)")


def test_c5_nyquist():
    rate = nyquist_rate(2.5e9, 14.11)
    record("C5b Nyquist projection", abs(rate - 70.6e9) <= 0.2e9, f"{rate / 1e9:.3f} Gbit/s")


def test_c5_two_channel():
    rate = secure_rate(125e6, 14.19, channels=2, keep_fraction=0.5)
    record("C5c two-channel rate", abs(rate - 3.55e9) <= 0.01e9, f"{rate / 1e9:.4f} Gbit/s (2 x 125 MHz x 2 x 14.19 bits, half kept)")


def test_c6_oracle_equivalence():
    worst = 0.0
    for n in (2, 3, 4):
        for q in (0.0, 10.0, 20.0):
            model = NoiseModel.from_qcnr(q)
            r = optimize_r_average(model, n).optimal_r
            diff = abs(guess_prob_average(model, AdcConfig(n, r)) - guess_prob_grid(n, r, model.sigma_e))
            worst = max(worst, diff)
    record("C6 quadrature vs e-grid oracle", worst <= 1e-6, f"max |dP|={worst:.2e} over 9 cases")


def test_c7_property_suite():
    rng = np.random.default_rng(20261016)
    chain_gap = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 17))
        model = NoiseModel.from_qcnr(float(rng.uniform(-5, 30)), float(rng.uniform(-0.1, 0.1)))
        adc = AdcConfig(n, float(rng.uniform(0.5, 12.0)))
        hw = min_entropy_worst_case(model, adc, ExcursionBound(float(rng.uniform(5, 20))))
        ha = min_entropy_average(model, adc)
        hu = min_entropy_unconditional(model, adc)
        chain_gap = max(chain_gap, hw - ha, ha - hu, hu - n, -hw)
    ok_chain = chain_gap <= 1e-9

    norm_err = sym_err = 0.0
    for n, r, s, e in [(1, 1.0, 0.3, 0.0), (4, 2.0, 0.1, 0.0), (8, 2.93, 0.316, 0.0), (16, 4.32, 0.21, 0.0)]:
        model = NoiseModel(s)
        adc = AdcConfig(n, r)
        d = discretize_conditional(model, adc, e)
        norm_err = max(norm_err, abs(d.probabilities.sum() - 1), abs(discretize_marginal(model, adc).probabilities.sum() - 1))
        for i in range(1, adc.i_max):
            sym_err = max(sym_err, abs(d[i] - d[-i]))
    ok_dist = norm_err <= 1e-10 and sym_err <= 1e-15

    n_in, n_out = 512, 256
    seed = seed_bits_from_material("acceptance", n_in + n_out - 1)
    a = rng.integers(0, 2, (1000, n_in), dtype=np.uint8)
    b = rng.integers(0, 2, (1000, n_in), dtype=np.uint8)
    ok_lin = np.array_equal(toeplitz_hash(a ^ b, seed, n_out), toeplitz_hash(a, seed, n_out) ^ toeplitz_hash(b, seed, n_out))

    tvs = []
    model = NoiseModel.from_qcnr(10.0, 0.05)
    adc = AdcConfig(4, 2.0)
    expected = discretize_marginal(model, adc).probabilities
    for count in (10**6, 10**7):
        block = simulate_samples(model, adc, count, rng_seed=count)
        freq = np.bincount(block.samples - adc.i_min, minlength=adc.n_levels) / count
        tvs.append((count, 0.5 * np.abs(freq - expected).sum(), 5 / math.sqrt(count)))
    ok_tv = all(tv <= bound for _, tv, bound in tvs)

    detail = (
        f"ordering max violation={chain_gap:.1e}; normalization err={norm_err:.1e}, mirror err={sym_err:.1e}; "
        f"linearity on 1000 pairs={'ok' if ok_lin else 'broken'}; "
        + ", ".join(f"TV({c:.0e})={tv:.2e}<={b:.2e}" for c, tv, b in tvs)
    )
    record("C7 property suite", ok_chain and ok_dist and ok_lin and ok_tv, detail)


def test_c8_pipeline_statistics():
    model = NoiseModel.from_qcnr(13.5)
    r = optimize_r_average(model, 16).optimal_r
    block = simulate_samples(model, AdcConfig(16, r), 10**7, rng_seed=8)
    kept = discard_msbs(block, 12)
    ac = autocorrelation(kept, 100)
    max_abs = float(np.max(np.abs(ac.coefficients)))
    ok_ac = ac.within(4.0)

    h = min_entropy_average(model, AdcConfig(16, r))
    run = run_extraction(kept, h, raw_bits=16, epsilon=2.0**-32, seed_material="acceptance-c8")
    rep = uniformity_checks(run.bits, alpha=1e-3, max_lag=100)
    detail = (
        f"raw max|r_k|={max_abs:.2e} vs 4/sqrt(N)={4 * ac.reference:.2e}; "
        f"{rep.n_bits} extracted bits: monobit p={rep.monobit_p:.3g}, chi2 p={rep.chi2_p:.3g}, "
        f"autocorr min p={rep.autocorr_min_p:.3g} (lag {rep.autocorr_worst_lag})"
    )
    record("C8 pipeline statistics", ok_ac and rep.passed, detail)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
