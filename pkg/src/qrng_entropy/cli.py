"""Command-line entry point: ``qrng-entropy <subcommand> ...``.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical failures.
Relative output paths are resolved against ``$QRNG_ENTROPY_OUTPUT_DIR`` when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import report, tables
from .adc import AdcConfig
from .entropy import ExcursionBound, min_entropy_average, min_entropy_worst_case
from .noise import NoiseModel
from .optimize import optimize_r_average, optimize_r_worst_case
from .pipeline import (
    Calibration,
    calibration_stats,
    discard_msbs,
    pack_bits,
    read_raw,
    run_extraction,
    simulate_samples,
    uniformity_checks,
    write_raw,
)

OUTPUT_DIR_ENV = "QRNG_ENTROPY_OUTPUT_DIR"
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        _resolve(output).write_text(text)


def _load_calibration(path) -> Calibration:
    d = json.loads(Path(path).read_text())
    return Calibration(d["sigma_m2"], d["sigma_e2"], d["mean"])


def _model(args) -> NoiseModel:
    cal = _load_calibration(args.calibration) if args.calibration else None
    given = [x is not None for x in (args.qcnr, args.sigma_e)]
    if sum(given) > 1:
        raise ConfigError("qcnr/sigma_e: give exactly one of --qcnr, --sigma-e")
    if args.raw_units and cal is None:
        raise ConfigError("raw_units: --raw-units requires --calibration")
    scale = cal.sigma_q_raw if args.raw_units else 1.0
    offset = args.offset / scale
    if args.qcnr is not None:
        return NoiseModel.from_qcnr(args.qcnr, offset)
    if args.sigma_e is not None:
        if args.sigma_e < 0:
            raise ConfigError("sigma_e: must be >= 0")
        return NoiseModel(args.sigma_e / scale, offset)
    if cal is not None:
        base = cal.to_model()
        return NoiseModel(base.sigma_e, offset if args.offset else base.delta_offset)
    raise ConfigError("qcnr/sigma_e: give exactly one of --qcnr, --sigma-e")


def _range(args) -> float | None:
    r = getattr(args, "r", None)
    if r is None:
        return None
    if args.raw_units:
        r = r / _load_calibration(args.calibration).sigma_q_raw
    if not r > 0:
        raise ConfigError("r: must be > 0")
    return r


def _bound(args) -> ExcursionBound:
    try:
        return ExcursionBound(args.k, args.delta_max)
    except ValueError as exc:
        raise ConfigError(f"k/delta_max: {exc}") from exc


def _noise_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("noise model")
    g.add_argument("--qcnr", type=_float, help="quantum-to-classical noise ratio in dB (inf/-inf allowed)")
    g.add_argument("--sigma-e", type=_float, help="classical-noise std dev in quantum-noise units")
    g.add_argument("--offset", type=_float, default=0.0, help="dc offset (quantum-noise units)")
    g.add_argument("--raw-units", action="store_true", help="--r/--offset/--sigma-e are in calibrated ADC codes")
    g.add_argument("--calibration", help="calibration JSON written by 'calibrate'")


def _bound_options(p: argparse.ArgumentParser):
    p.add_argument("--k", type=_float, default=5.0, help="excursion bound |e| <= k*sigma_e (default 5)")
    p.add_argument("--delta-max", type=_float, default=0.0, help="bound on |offset| for the worst case")


def _output_options(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="output file (default: stdout)")


def _report_text(rep, fmt: str) -> str:
    if fmt == "json":
        return rep.to_json(indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rep.csv_header())
    w.writerow(rep.csv_row())
    return buf.getvalue()


def cmd_analyze(args) -> int:
    model = _model(args)
    r = _range(args)
    if (r is None) == (not args.auto):
        raise ConfigError("r/auto: give exactly one of --r, --auto")
    bound = _bound(args)
    rep = report.optimize(model, args.bits, bound) if args.auto else report.analyze(model, args.bits, r, bound)
    _emit(_report_text(rep, args.format), args.output)
    if args.mode in ("worst", "both"):
        print(f"h_min_worst = {rep.h_min_worst:.4f} bits", file=sys.stderr)
    if args.mode in ("average", "both"):
        print(f"h_min_avg = {rep.h_min_avg:.4f} bits", file=sys.stderr)
    return 0


def _parse_sweep(var: str, range_text: str) -> list[float]:
    """``a..b`` (inclusive, step 1) or ``a..b:step``."""
    try:
        span, _, step = range_text.strip().partition(":")
        lo, hi = (float(x) for x in span.split(".."))
        step = float(step) if step else 1.0
    except ValueError:
        raise ConfigError(f"sweep: cannot parse range {range_text!r}; expected a..b or a..b:step")
    if step <= 0 or hi < lo:
        raise ConfigError("sweep: need step > 0 and a <= b")
    values = list(np.round(np.arange(lo, hi + step / 2, step), 10))
    if var == "bits":
        if any(v != int(v) for v in values):
            raise ConfigError("sweep: bit counts must be integers")
        values = [int(v) for v in values]
    return values


def _optimize_one(model, n_bits, bound, mode):
    out = []
    if mode in ("worst", "both"):
        out.append(optimize_r_worst_case(model, n_bits, bound))
    if mode in ("average", "both"):
        out.append(optimize_r_average(model, n_bits))
    return out


def cmd_optimize(args) -> int:
    bound = _bound(args)
    if args.sweep:
        var, range_text = args.sweep
        values = _parse_sweep(var, range_text)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["qcnr_db", "n_bits", "mode", "k_sigma", "delta_offset", "optimal_r", "h_min", "h_per_bit"])
        for v in values:
            if var == "bits":
                model, n_bits = _model(args), v
            else:
                if args.bits is None:
                    raise ConfigError("bits: --bits is required for a QCNR sweep")
                model, n_bits = NoiseModel.from_qcnr(v, args.offset), args.bits
            qcnr = round(model.qcnr_db, 10)
            for res in _optimize_one(model, n_bits, bound, args.mode):
                r = "" if math.isnan(res.optimal_r) else f"{res.optimal_r:.6f}"
                w.writerow(
                    [qcnr, n_bits, res.mode, bound.k_sigma if res.mode == "worst" else "",
                     model.delta_offset, r, f"{res.achieved_entropy:.6f}", f"{res.achieved_entropy / n_bits:.6f}"]
                )
        _emit(buf.getvalue(), args.output)
        return 0

    if args.bits is None:
        raise ConfigError("bits: --bits is required")
    model = _model(args)
    results = _optimize_one(model, args.bits, bound, args.mode)
    rep = report.optimize(model, args.bits, bound)
    if args.format == "csv":
        _emit(_report_text(rep, "csv"), args.output)
    else:
        payload = {
            "results": [
                {k: v for k, v in asdict(res).items() if k != "trace"} for res in results
            ],
            "report": rep.to_dict(),
        }
        _emit(json.dumps(_jsonable(payload), indent=2) + "\n", args.output)
    for res in results:
        print(f"{res.mode}: R = {res.optimal_r:.4f}, H = {res.achieved_entropy:.4f} bits", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    if args.count <= 0:
        raise ConfigError("count: must be a positive integer")
    model = _model(args)
    r = _range(args)
    if r is None:
        r = optimize_r_average(model, args.bits).optimal_r
    block = simulate_samples(model, AdcConfig(args.bits, r), args.count, args.seed, quantum=not args.blocked)
    sidecar = write_raw(
        block, _resolve(args.output), sample_rate=args.sample_rate, channel_id=args.channel, width_bytes=args.width
    )
    print(f"wrote {len(block)} samples (R = {r:.6f}); sidecar {sidecar}", file=sys.stderr)
    return 0


def cmd_calibrate(args) -> int:
    on = read_raw(args.signal, range_r=args.r)
    off = read_raw(args.blocked, range_r=args.r)
    cal = calibration_stats(on, off)
    model = cal.to_model()
    payload = {
        **asdict(cal),
        "sigma_q_raw": cal.sigma_q_raw,
        "qcnr_db": cal.qcnr_db,
        "sigma_e": model.sigma_e,
        "delta_offset": model.delta_offset,
        "samples_signal": len(on),
        "samples_blocked": len(off),
    }
    _emit(json.dumps(_jsonable(payload), indent=2) + "\n", args.output)
    return 0


def cmd_extract(args) -> int:
    block = read_raw(args.input)
    raw_bits = block.n_bits
    keep = args.keep_bits if args.keep_bits is not None else max(1, raw_bits - 4)
    if args.entropy_per_sample is not None:
        h = args.entropy_per_sample
    else:
        model = _model(args)
        adc = block.adc
        if args.entropy_mode == "worst":
            h = min_entropy_worst_case(model, adc, _bound(args))
        else:
            h = min_entropy_average(model, adc)
    kept = discard_msbs(block, keep)
    run = run_extraction(
        kept,
        h,
        raw_bits=raw_bits,
        samples_per_block=args.samples_per_block,
        epsilon=args.epsilon,
        seed_material=args.seed_material,
        mode=args.mode,
        family=args.family,
    )
    manifest = dict(run.manifest, entropy_source=("given" if args.entropy_per_sample is not None else args.entropy_mode))
    if args.check:
        rep = uniformity_checks(run.bits)
        manifest["uniformity"] = {**asdict(rep), "passed": rep.passed}
    out = _resolve(args.output)
    out.write_bytes(pack_bits(run.bits))
    manifest_path = Path(os.fspath(out) + ".json")
    manifest_path.write_text(json.dumps(_jsonable(manifest), indent=2) + "\n")
    print(f"wrote {run.bits.size} bits; manifest {manifest_path}", file=sys.stderr)
    return 0


def cmd_tables(args) -> int:
    which = ("I", "II", "III") if args.which == "all" else (args.which,)
    entries = [e for w in which for e in tables.build_table(w)]
    _emit(tables.to_csv(entries), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrng-entropy", description="Conditional min-entropy and ADC range optimization for Gaussian QRNGs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="entropy figures at a given ADC range")
    _noise_options(p)
    _bound_options(p)
    _output_options(p)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--r", type=_float, help="ADC range parameter R")
    p.add_argument("--auto", action="store_true", help="optimize R instead of giving it")
    p.add_argument("--mode", choices=("worst", "average", "both"), default="both")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", help="optimal ADC range, optionally swept over QCNR or bits")
    _noise_options(p)
    _bound_options(p)
    _output_options(p)
    p.add_argument("--bits", type=int)
    p.add_argument("--mode", choices=("worst", "average", "both"), default="both")
    p.add_argument("--sweep", nargs=2, metavar=("VAR", "RANGE"), help="VAR is 'bits' or 'qcnr'; RANGE is a..b[:step]")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="simulate a raw digitized record")
    _noise_options(p)
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--r", type=_float, help="ADC range (default: average-case optimum)")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocked", action="store_true", help="classical noise only (signal blocked)")
    p.add_argument("--sample-rate", type=_float, default=250e6)
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--width", type=int, choices=(1, 2, 4), default=2, help="bytes per sample")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="noise model from signal and blocked-signal records")
    p.add_argument("--signal", required=True)
    p.add_argument("--blocked", required=True)
    p.add_argument("--r", type=_float, help="ADC range if the sidecars lack it")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("extract", help="discard MSBs and hash a raw record")
    _noise_options(p)
    _bound_options(p)
    p.add_argument("--input", required=True)
    p.add_argument("--keep-bits", type=int, help="low bits kept per sample (default: n_bits - 4)")
    p.add_argument("--entropy-per-sample", type=_float, help="certified min-entropy per raw sample")
    p.add_argument("--entropy-mode", choices=("average", "worst"), default="average")
    p.add_argument("--epsilon", type=_float, default=2.0**-32)
    p.add_argument("--seed-material", default="0", help="string expanded into the extractor seed")
    p.add_argument("--mode", choices=("information_theoretic", "keep_half"), default="information_theoretic")
    p.add_argument("--family", choices=("toeplitz", "blake2b"), default="toeplitz")
    p.add_argument("--samples-per-block", type=int, default=1024)
    p.add_argument("--check", action="store_true", help="run uniformity checks on the output")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("tables", help="regenerate the optimized-entropy tables as CSV")
    p.add_argument("--which", choices=("I", "II", "III", "all"), default="all")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--sweep" in argv:
        # a range such as -5..5 would otherwise be taken for an option
        i = argv.index("--sweep") + 2
        if i < len(argv) and argv[i].startswith("-") and ".." in argv[i]:
            argv[i] = " " + argv[i]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
