#!/usr/bin/env python3
"""
l0deblur: blind motion deblurring with l0-l2 regularized image and kernel estimation.

Main entry point for deblurring, synthetic blurring, evaluation sweeps and ablations.
Usage: python l0deblur.py deblur --input blurred.png --kernel-size 27 --out-dir results/
"""
import argparse
import dataclasses
import io
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv

# Set UTF-8 encoding for Windows console
if sys.platform == "win32":
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

# Load .env from project root
load_dotenv(dotenv_path=Path(__file__).parent / ".env")

from evaluation.synthetic import builtin_corpus, load_corpus_dir, make_trajectory_kernel, synth_blur
from evaluation.trials import (
    build_trial_specs,
    cumulative_histogram,
    run_trials,
    summarize,
    write_histogram_csv,
    write_trials_csv,
)
from imaging.errors import DeblurError, ImageIOError, InvalidConfigError
from imaging.image_io import load_kernel_text, read_image, save_kernel_png, save_kernel_text, write_image
from imaging.raster import to_grayscale
from pipeline.multiscale import deblur_blind
from pipeline.params import Variant, default_jobs, load_params
from records.run_context import RunContext

logger = logging.getLogger("l0deblur")

SOLVER_FLAGS = ("kernel_size", "variant", "scales", "outer_iters", "inner_iters_x", "inner_iters_k",
                "lam", "pyramid_factor", "continuation_mode")
NONBLIND_FLAGS = ("prior_exponent", "fidelity_weight")


def format_output(title: str, lines: Sequence[str], footer: str) -> str:
    """
    Format a run summary in a readable way.

    Args:
        title: Banner title
        lines: Body lines
        footer: Closing line

    Returns:
        Formatted string representation
    """
    output_lines = []
    output_lines.append("\n" + "=" * 70)
    output_lines.append(title)
    output_lines.append("=" * 70 + "\n")
    output_lines.extend(lines)
    output_lines.append("")
    output_lines.append("=" * 70)
    output_lines.append(footer)
    output_lines.append("=" * 70 + "\n")
    return "\n".join(output_lines)


def _check_odd(flag: str, value: Optional[int]):
    if value is not None and (value < 3 or value % 2 == 0):
        raise InvalidConfigError(f"{flag} must be an odd integer >= 3, got {value}")


def _resolve_params(args: argparse.Namespace):
    _check_odd("--kernel-size", getattr(args, "kernel_size", None))
    solver = {name: getattr(args, name, None) for name in SOLVER_FLAGS}
    nonblind = {name: getattr(args, name, None) for name in NONBLIND_FLAGS}
    return load_params(args.params, solver, nonblind)


def _require_file(path: Optional[str], flag: str) -> Path:
    if path is None:
        raise InvalidConfigError(f"{flag} is required")
    resolved = Path(path)
    if not resolved.is_file():
        raise ImageIOError(f"{flag} file not found: {resolved}")
    return resolved


def cmd_deblur(args: argparse.Namespace) -> int:
    """Estimate the kernel of one blurred image and restore it."""
    input_path = _require_file(args.input, "--input")
    solver, nonblind = _resolve_params(args)
    out_dir = Path(args.out_dir)
    blurred = read_image(input_path)

    result = deblur_blind(blurred, solver, nonblind)

    save_kernel_text(out_dir / "kernel.txt", result.kernel)
    save_kernel_png(out_dir / "kernel.png", result.kernel, zoom=args.zoom)
    write_image(out_dir / "intermediate.png", result.intermediate)
    write_image(out_dir / "restored.png", result.restored)

    trace = RunContext(out_dir / "trace.json", command="deblur")
    trace.set_inputs(input=str(input_path))
    trace.set_params(solver=solver.to_dict(), nonblind=dataclasses.asdict(nonblind))
    trace.set_result("estimation", result.trace_summary())

    print(format_output(
        "🎯 BLIND DEBLURRING COMPLETE",
        [f"📥 Input: {input_path}",
         f"🧩 Kernel: {result.kernel.shape[0]}x{result.kernel.shape[0]} ({solver.variant.value})",
         f"🗻 Scales: {len(result.energy_traces)}",
         f"⏱️  Elapsed: {result.elapsed:.2f} s"],
        f"✅ Results written to {out_dir}"))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    """Blur a sharp image with a known kernel plus Gaussian noise."""
    input_path = _require_file(args.input, "--input")
    if args.noise_sigma < 0:
        raise InvalidConfigError(f"--noise-sigma must be >= 0, got {args.noise_sigma}")
    if args.kernel is not None:
        kernel_path = _require_file(args.kernel, "--kernel")
        kernel = load_kernel_text(kernel_path)
        kernel_source: Dict[str, Any] = {"kernel_file": str(kernel_path)}
    else:
        _check_odd("--kernel-size", args.kernel_size)
        size = args.kernel_size or 13
        length = args.length if args.length is not None else 0.7 * (size - 1)
        kernel = make_trajectory_kernel(size, length, args.curvature, args.seed, args.angle)
        kernel_source = {"kernel_size": size, "length": length,
                         "curvature": args.curvature, "angle": args.angle}
    out_dir = Path(args.out_dir)
    sharp = to_grayscale(read_image(input_path))

    blurred = synth_blur(sharp, kernel, args.noise_sigma, args.seed)

    write_image(out_dir / "blurred.png", blurred, bit_depth=16)
    save_kernel_text(out_dir / "kernel.txt", kernel)
    save_kernel_png(out_dir / "kernel.png", kernel, zoom=args.zoom)
    meta = RunContext(out_dir / "meta.json", command="synth")
    meta.set_inputs(input=str(input_path), seed=args.seed, noise_sigma=args.noise_sigma, **kernel_source)

    print(format_output(
        "🌀 SYNTHETIC BLUR GENERATED",
        [f"📥 Input: {input_path}",
         f"🧩 Kernel: {kernel.shape[0]}x{kernel.shape[0]}",
         f"🎲 Seed: {args.seed}, noise sigma {args.noise_sigma}"],
        f"✅ Results written to {out_dir}"))
    return 0


def _parse_list(raw: str, flag: str) -> List[str]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise InvalidConfigError(f"{flag} must name at least one value")
    return items


def _run_sweep(args: argparse.Namespace, command: str, variants: List[Variant]) -> int:
    solver, nonblind = _resolve_params(args)
    settings = _parse_list(args.settings, "--settings")
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise InvalidConfigError(f"--jobs must be >= 1, got {jobs}")
    if args.noise_sigma < 0:
        raise InvalidConfigError(f"--noise-sigma must be >= 0, got {args.noise_sigma}")
    corpus = load_corpus_dir(args.corpus) if args.corpus else builtin_corpus()
    if len(corpus) == 0:
        raise InvalidConfigError("corpus holds no (image, kernel) pairs")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    specs = build_trial_specs(corpus, solver, nonblind, variants, settings,
                              noise_sigma=args.noise_sigma, seed=args.seed,
                              oracle_kernel=args.oracle_kernel)
    logger.info("🚀 running %d trials on %d worker(s)", len(specs), jobs)
    records = run_trials(specs, jobs=jobs)

    summary = RunContext(out_dir / "summary.json", command=command)
    summary.set_inputs(corpus=args.corpus or "builtin", settings=settings, seed=args.seed,
                       noise_sigma=args.noise_sigma, oracle_kernel=args.oracle_kernel, jobs=jobs)
    summary.set_params(solver=solver.to_dict(), nonblind=dataclasses.asdict(nonblind))

    lines = []
    per_variant = command == "ablate" or len(variants) > 1
    for variant in variants:
        subset = [r for r in records if r.variant == variant.value]
        suffix = f"_{variant.value}" if per_variant else ""
        write_trials_csv(subset, out_dir / f"trials{suffix}.csv")
        write_histogram_csv(cumulative_histogram(subset, args.max_bin), out_dir / f"histogram{suffix}.csv")
        stats = summarize(subset)
        summary.set_result(variant.value, stats)
        lines.append(f"📊 {variant.value}: mean ratio {stats['mean_ratio']:.3f}, "
                     f"success {stats['success_count']}/{stats['trials']}")

    print(format_output(f"📈 {command.upper()} COMPLETE ({len(records)} trials)", lines,
                        f"✅ Tables written to {out_dir}"))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    """Score one or more variants over a corpus."""
    variants = [Variant.parse(v) for v in _parse_list(args.variants, "--variants")]
    return _run_sweep(args, "eval", variants)


def cmd_ablate(args: argparse.Namespace) -> int:
    """Score every regularizer variant over a corpus."""
    variants = [Variant.parse(v) for v in _parse_list(args.variants, "--variants")]
    return _run_sweep(args, "ablate", variants)


def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--params", type=str, default=None,
                        help="JSON file overriding solver/nonblind parameters")
    parser.add_argument("--variant", type=str, default=None, help="Regularizer variant R1, R2 or R3")
    parser.add_argument("--scales", type=int, default=None, help="Pyramid levels (default: 4)")
    parser.add_argument("--outer-iters", dest="outer_iters", type=int, default=None,
                        help="Outer alternating iterations per scale (default: 10)")
    parser.add_argument("--inner-iters-x", dest="inner_iters_x", type=int, default=None,
                        help="Inner image-solver iterations (default: 10)")
    parser.add_argument("--inner-iters-k", dest="inner_iters_k", type=int, default=None,
                        help="Inner kernel-solver iterations (default: 10)")
    parser.add_argument("--lam", type=float, default=None, help="Fidelity weight (default: 100)")
    parser.add_argument("--pyramid-factor", dest="pyramid_factor", type=float, default=None,
                        help="Downsampling factor between levels (default: 2)")
    parser.add_argument("--continuation-mode", dest="continuation_mode", choices=["fidelity", "weights"],
                        default=None, help="Apply continuation to the fidelity or the regularizer weights "
                                           "(default: fidelity)")
    parser.add_argument("--prior-exponent", dest="prior_exponent", type=float, default=None,
                        help="Non-blind prior exponent: 0.5, 0.6667, 1 or 2 (default: 2/3)")
    parser.add_argument("--fidelity-weight", dest="fidelity_weight", type=float, default=None,
                        help="Non-blind fidelity weight (default: 2000)")


def _add_sweep_flags(parser: argparse.ArgumentParser, default_variants: str):
    _add_solver_flags(parser)
    parser.add_argument("--corpus", type=str, default=None,
                        help="Directory of sharp images and kernel .txt files (default: built-in corpus)")
    parser.add_argument("--out-dir", dest="out_dir", type=str, required=True, help="Output directory")
    parser.add_argument("--variants", type=str, default=default_variants,
                        help=f"Comma-separated variants (default: {default_variants})")
    parser.add_argument("--settings", type=str, default="true",
                        help="Comma-separated kernel-size settings: true, medium, large (default: true)")
    parser.add_argument("--jobs", type=int, default=None,
                        help="Worker processes (default: L0DEBLUR_JOBS or 1)")
    parser.add_argument("--oracle-kernel", dest="oracle_kernel", action="store_true",
                        help="Score the ground-truth kernel instead of estimating one")
    parser.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=0.005,
                        help="Gaussian noise level of the synthetic blur (default: 0.005)")
    parser.add_argument("--seed", type=int, default=0, help="Base noise seed (default: 0)")
    parser.add_argument("--max-bin", dest="max_bin", type=int, default=5,
                        help="Largest cumulative-histogram bin (default: 5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="l0deblur: blind motion deblurring with l0-l2 regularization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python l0deblur.py deblur --input blurred.png --kernel-size 27 --out-dir results/
  python l0deblur.py synth --input sharp.png --kernel-size 13 --seed 3 --out-dir synth/
  python l0deblur.py eval --out-dir sweep/ --jobs 4
  python l0deblur.py ablate --out-dir ablation/ --settings true,medium

Exit codes: 0 ok, 1 I/O, 2 invalid configuration, 3 numerical divergence, 4 degenerate kernel
        """
    )
    parser.add_argument("--verbosity", choices=["quiet", "info", "debug"], default="info",
                        help="Log level on stderr (default: info)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    deblur = subparsers.add_parser("deblur", help="Blindly deblur one image")
    deblur.add_argument("--input", type=str, required=True, help="Blurred PNG/PGM image")
    deblur.add_argument("--out-dir", dest="out_dir", type=str, required=True, help="Output directory")
    deblur.add_argument("--kernel-size", dest="kernel_size", type=int, default=None,
                        help="Odd kernel size in pixels (default: 27)")
    deblur.add_argument("--zoom", type=int, default=5, help="Kernel PNG enlargement (default: 5)")
    _add_solver_flags(deblur)
    deblur.set_defaults(handler=cmd_deblur)

    synth = subparsers.add_parser("synth", help="Blur a sharp image with a known kernel")
    synth.add_argument("--input", type=str, required=True, help="Sharp PNG/PGM image")
    synth.add_argument("--out-dir", dest="out_dir", type=str, required=True, help="Output directory")
    synth.add_argument("--kernel", type=str, default=None, help="Kernel .txt file (else a trajectory kernel)")
    synth.add_argument("--kernel-size", dest="kernel_size", type=int, default=None,
                       help="Odd trajectory kernel size (default: 13)")
    synth.add_argument("--length", type=float, default=None,
                       help="Trajectory length in pixels (default: 0.7 * (size - 1))")
    synth.add_argument("--curvature", type=float, default=0.8, help="Trajectory curvature (default: 0.8)")
    synth.add_argument("--angle", type=float, default=None, help="Initial heading in radians (default: random)")
    synth.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=0.005,
                       help="Gaussian noise standard deviation (default: 0.005)")
    synth.add_argument("--seed", type=int, default=0, help="Noise and trajectory seed (default: 0)")
    synth.add_argument("--zoom", type=int, default=5, help="Kernel PNG enlargement (default: 5)")
    synth.set_defaults(handler=cmd_synth)

    evaluate = subparsers.add_parser("eval", help="Run an evaluation sweep")
    _add_sweep_flags(evaluate, "R1")
    evaluate.set_defaults(handler=cmd_eval)

    ablate = subparsers.add_parser("ablate", help="Compare the R1/R2/R3 variants")
    _add_sweep_flags(ablate, "R1,R2,R3")
    ablate.set_defaults(handler=cmd_ablate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for l0deblur."""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}[args.verbosity]
    logging.basicConfig(stream=sys.stderr, level=level, format="%(message)s")

    try:
        return args.handler(args)
    except KeyboardInterrupt:
        print("\n\n⚠️  Run interrupted by user.", file=sys.stderr)
        return 1
    except DeblurError as e:
        print(f"\n❌ Error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
