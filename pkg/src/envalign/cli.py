"""Command line front end.

Subcommands: run (full pipeline), segment, align, average, synth. Every
analysis subcommand accepts an optional JSON config file; explicit flags
override config file values, which override the built-in defaults.

Exit codes: 0 success, 2 unreadable input, 3 invalid configuration or
parameters, 4 no segments found, 5 no feasible anchor.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .alignment import AlignmentConfig, AnchorStrategy, anchor_by_extremum, optimize_anchor
from .errors import (
    DegenerateSignalError,
    EmptyInputError,
    InputFormatError,
    InsufficientDataError,
    InsufficientOverlapError,
    InvalidParameterError,
    NoFeasibleAnchorError,
    NoSegmentsError,
)
from .io import read_input, write_wav
from .pipeline import (
    PipelineConfig,
    analyze_series,
    run_pipeline,
    write_aligned_csv,
    write_plots,
    write_template_csv,
)
from .plots import decimate_minmax, svg_line_plot
from .segmentation import SegmentationConfig, find_cut_indices, segment_series
from .envelope import burly_envelope
from .synth import BurstSpec, BurstWindow, render_burst_train

EXIT_OK = 0
EXIT_PARSE_ERROR = 2
EXIT_INVALID_CONFIG = 3
EXIT_NO_SEGMENTS = 4
EXIT_NO_ANCHOR = 5

_FMT = ".9g"

_CONFIG_KEYS = {
    "segmentation",
    "alignment",
    "strategy",
    "template_length",
    "smoothing_cutoff_hz",
    "channel",
    "rate_hz",
}
_SEGMENTATION_KEYS = {"cutoff_hz", "silence_fraction", "min_duration_s"}
_ALIGNMENT_KEYS = {"grid_step", "margin_frames", "min_overlap_fraction"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envalign",
        description=(
            "Segment a 1-D signal into repeated pattern instances, align them "
            "at envelope anchor points, and average them into a template."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input .wav or .csv file")
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument(
        "--cut-freq", type=float, help="burly envelope cutoff in Hz (default 30)"
    )
    common.add_argument(
        "--silence-fraction",
        type=float,
        help="silence threshold as a fraction of the envelope peak (default 0.05)",
    )
    common.add_argument(
        "--min-duration-ms",
        type=float,
        help="minimum segment duration in milliseconds (default 10)",
    )
    common.add_argument(
        "--strategy",
        choices=[s.value for s in AnchorStrategy],
        help="anchor strategy (default mse-opt)",
    )
    common.add_argument(
        "--grid-step", type=float, help="anchor threshold grid step (default 0.05)"
    )
    common.add_argument(
        "--margin-frames",
        type=int,
        help="window margin in samples on each side (default 100)",
    )
    common.add_argument(
        "--min-overlap",
        type=float,
        help="minimum overlap as a fraction of the shortest envelope (default 0.5)",
    )
    common.add_argument(
        "--length", type=int, help="template length in positions (default 1000)"
    )
    common.add_argument(
        "--smooth-freq",
        type=float,
        help="true envelope smoothing cutoff in Hz (default 150)",
    )
    common.add_argument(
        "--channel", type=int, help="channel to read from a multi-channel WAV"
    )
    common.add_argument(
        "--rate", type=float, help="sample rate in Hz for single-column CSV input"
    )
    common.add_argument("--plots", action="store_true", help="also write SVG plots")
    common.add_argument(
        "--out", default="envalign_out", help="output directory (default envalign_out)"
    )

    p_run = sub.add_parser(
        "run", parents=[common], help="full pipeline: segment, align, average, write"
    )
    p_run.set_defaults(handler=_cmd_run)

    p_segment = sub.add_parser(
        "segment", parents=[common], help="segmentation only; writes segments.csv"
    )
    p_segment.set_defaults(handler=_cmd_segment)

    p_align = sub.add_parser(
        "align",
        parents=[common],
        help="segment and pick anchors; writes anchors.csv and the MSE curve",
    )
    p_align.set_defaults(handler=_cmd_align)

    p_average = sub.add_parser(
        "average",
        parents=[common],
        help="full analysis; writes template.csv and aligned.csv",
    )
    p_average.set_defaults(handler=_cmd_average)

    p_synth = sub.add_parser(
        "synth", help="render a synthetic burst train WAV with ground truth"
    )
    p_synth.add_argument("output", help="output .wav path")
    p_synth.add_argument("--n-bursts", type=int, default=5)
    p_synth.add_argument("--burst-ms", type=float, default=80.0)
    p_synth.add_argument("--gap-ms", type=float, default=150.0)
    p_synth.add_argument("--carrier", type=float, default=2000.0)
    p_synth.add_argument("--amplitude", type=float, default=0.8)
    p_synth.add_argument(
        "--window", choices=[w.value for w in BurstWindow], default="gaussian"
    )
    p_synth.add_argument("--rate", type=float, default=44100.0)
    p_synth.add_argument("--noise-rms", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(handler=_cmd_synth)

    return parser


def _load_config_file(path) -> dict:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except FileNotFoundError as exc:
        raise InvalidParameterError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidParameterError(f"{path}: config must be a JSON object")
    return data


def _check_keys(section: dict, allowed: set, label: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise InvalidParameterError(
            f"unknown {label} config keys: {', '.join(sorted(unknown))}"
        )


def _override(section: dict, key: str, value) -> None:
    if value is not None:
        section[key] = value


def build_config(args) -> PipelineConfig:
    """Merge defaults, config file, and flags into a PipelineConfig."""
    file_cfg = _load_config_file(args.config) if args.config else {}
    _check_keys(file_cfg, _CONFIG_KEYS, "top-level")

    seg = dict(file_cfg.get("segmentation") or {})
    _check_keys(seg, _SEGMENTATION_KEYS, "segmentation")
    _override(seg, "cutoff_hz", args.cut_freq)
    _override(seg, "silence_fraction", args.silence_fraction)
    if args.min_duration_ms is not None:
        seg["min_duration_s"] = args.min_duration_ms / 1000.0

    ali = dict(file_cfg.get("alignment") or {})
    _check_keys(ali, _ALIGNMENT_KEYS, "alignment")
    _override(ali, "grid_step", args.grid_step)
    _override(ali, "margin_frames", args.margin_frames)
    _override(ali, "min_overlap_fraction", args.min_overlap)

    strategy_value = args.strategy or file_cfg.get("strategy") or "mse-opt"
    try:
        strategy = AnchorStrategy(strategy_value)
    except ValueError as exc:
        raise InvalidParameterError(f"unknown strategy {strategy_value!r}") from exc

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return file_cfg.get(key, default)

    try:
        return PipelineConfig(
            input_path=args.input,
            out_dir=args.out,
            segmentation=SegmentationConfig(**seg),
            alignment=AlignmentConfig(**ali),
            strategy=strategy,
            template_length=pick(args.length, "template_length", 1000),
            smoothing_cutoff_hz=pick(args.smooth_freq, "smoothing_cutoff_hz", 150.0),
            channel=pick(args.channel, "channel", None),
            rate_hz=pick(args.rate, "rate_hz", None),
            plots=args.plots,
        )
    except TypeError as exc:
        raise InvalidParameterError(f"invalid configuration: {exc}") from exc


def _cmd_run(args) -> None:
    config = build_config(args)
    manifest = run_pipeline(config)
    print(f"segments: {manifest.n_segments}")
    if manifest.threshold_a is not None:
        print(f"anchor threshold: {manifest.threshold_a:{_FMT}}")
    print(f"strategy: {manifest.strategy}  mse: {manifest.alignment_mse:{_FMT}}")
    print(f"mean duration: {manifest.mean_duration_s:{_FMT}} s")
    print(f"wrote manifest.json, segments.csv, aligned.csv, template.csv to {config.out_dir}")


def _cmd_segment(args) -> None:
    config = build_config(args)
    series = read_input(config.input_path, channel=config.channel, rate_hz=config.rate_hz)
    segments = segment_series(series, config.segmentation, config.smoothing_cutoff_hz)
    if not segments:
        raise NoSegmentsError("segmentation produced no usable segments")
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "segments.csv")
    with open(path, "w", newline="\n") as handle:
        handle.write("index,start_index,end_index,duration_s\n")
        for i, seg in enumerate(segments):
            handle.write(
                f"{i},{seg.start_index},{seg.end_index},{seg.duration_s:{_FMT}}\n"
            )
    if config.plots:
        burly = burly_envelope(series, config.segmentation.cutoff_hz)
        cuts = find_cut_indices(burly, config.segmentation)
        sig_x, sig_y = decimate_minmax(series.samples)
        burly_x, burly_y = decimate_minmax(burly.values)
        svg = svg_line_plot(
            [(sig_x, sig_y, "signal"), (burly_x, burly_y, "burly envelope")],
            title="Segmentation cuts",
            x_label="sample index",
            y_label="amplitude",
            v_marks=[float(c) for c in cuts],
        )
        with open(os.path.join(config.out_dir, "segmentation.svg"), "w", newline="\n") as handle:
            handle.write(svg)
    print(f"segments: {len(segments)}")
    print(f"wrote segments.csv to {config.out_dir}")


def _cmd_align(args) -> None:
    config = build_config(args)
    series = read_input(config.input_path, channel=config.channel, rate_hz=config.rate_hz)
    segments = segment_series(series, config.segmentation, config.smoothing_cutoff_hz)
    if not segments:
        raise NoSegmentsError("segmentation produced no usable segments")
    if config.strategy is AnchorStrategy.MSE_OPTIMAL:
        solution = optimize_anchor(segments, config.alignment, config.smoothing_cutoff_hz)
    else:
        solution = anchor_by_extremum(
            segments,
            config.strategy,
            burly_cutoff_hz=config.segmentation.cutoff_hz,
            config=config.alignment,
            smoothing_cutoff_hz=config.smoothing_cutoff_hz,
        )
    os.makedirs(config.out_dir, exist_ok=True)
    with open(os.path.join(config.out_dir, "anchors.csv"), "w", newline="\n") as handle:
        handle.write("index,anchor_time_s\n")
        for i, t in enumerate(solution.anchor_times_s):
            handle.write(f"{i},{t:{_FMT}}\n")
    if solution.mse_curve is not None:
        with open(os.path.join(config.out_dir, "mse_curve.csv"), "w", newline="\n") as handle:
            handle.write("threshold_a,mse\n")
            for a, mse in solution.mse_curve:
                handle.write(f"{a:{_FMT}},{mse:{_FMT}}\n")
        if config.plots:
            svg = svg_line_plot(
                [(solution.mse_curve[:, 0], solution.mse_curve[:, 1], "alignment MSE")],
                title="Anchor threshold scan",
                x_label="normalized amplitude threshold",
                y_label="mse",
                v_marks=[solution.threshold_a],
            )
            with open(os.path.join(config.out_dir, "mse_curve.svg"), "w", newline="\n") as handle:
                handle.write(svg)
    if solution.threshold_a is not None:
        print(f"anchor threshold: {solution.threshold_a:{_FMT}}")
    print(f"strategy: {solution.strategy.value}  mse: {solution.mse:{_FMT}}")
    print(f"wrote anchors.csv to {config.out_dir}")


def _cmd_average(args) -> None:
    config = build_config(args)
    series = read_input(config.input_path, channel=config.channel, rate_hz=config.rate_hz)
    result = analyze_series(series, config)
    os.makedirs(config.out_dir, exist_ok=True)
    write_template_csv(result.template, os.path.join(config.out_dir, "template.csv"))
    write_aligned_csv(result.aligned, os.path.join(config.out_dir, "aligned.csv"))
    if config.plots:
        write_plots(series, result, config, config.out_dir)
    print(f"segments: {len(result.segments)}")
    print(f"mean duration: {result.template.mean_duration_s:{_FMT}} s")
    print(f"wrote template.csv and aligned.csv to {config.out_dir}")


def _cmd_synth(args) -> None:
    if args.n_bursts < 1:
        raise InvalidParameterError(f"need at least one burst, got {args.n_bursts}")
    duration = args.burst_ms / 1000.0
    gap = args.gap_ms / 1000.0
    specs = [
        BurstSpec(
            carrier_hz=args.carrier,
            duration_s=duration,
            onset_s=gap + i * (duration + gap),
            amplitude=args.amplitude,
            window=BurstWindow(args.window),
        )
        for i in range(args.n_bursts)
    ]
    total = gap + args.n_bursts * (duration + gap)
    series, truth = render_burst_train(
        specs, args.rate, total, noise_rms=args.noise_rms, seed=args.seed
    )
    write_wav(args.output, series)
    truth_path = f"{args.output}.truth.csv"
    with open(truth_path, "w", newline="\n") as handle:
        handle.write("onset_s,duration_s,amplitude,carrier_hz,window\n")
        for spec in truth:
            handle.write(
                f"{spec.onset_s:{_FMT}},{spec.duration_s:{_FMT}},"
                f"{spec.amplitude:{_FMT}},{spec.carrier_hz:{_FMT}},{spec.window.value}\n"
            )
    print(f"wrote {args.output} ({series.duration_s:{_FMT}} s at {args.rate:{_FMT}} Hz)")
    print(f"wrote ground truth to {truth_path}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except FileNotFoundError as exc:
        print(f"error: input not found: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except NoSegmentsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SEGMENTS
    except NoFeasibleAnchorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ANCHOR
    except (
        InvalidParameterError,
        InsufficientDataError,
        DegenerateSignalError,
        EmptyInputError,
        InsufficientOverlapError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
