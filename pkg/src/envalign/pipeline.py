"""End-to-end orchestration: read, segment, anchor, align, average, write.

All output files are written deterministically: stable key order in the
manifest, fixed numeric formatting in the CSVs, no timestamps anywhere. Two
runs over the same input and configuration produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .alignment import (
    AlignmentConfig,
    AnchorSolution,
    AnchorStrategy,
    anchor_by_extremum,
    optimize_anchor,
)
from .averaging import (
    DEFAULT_TEMPLATE_LENGTH,
    AlignedSet,
    Template,
    average_template,
    build_aligned_set,
    template_distance,
)
from .core import TimeSeries
from .envelope import DEFAULT_SMOOTHING_CUTOFF_HZ, burly_envelope, true_envelope
from .errors import InvalidParameterError, NoSegmentsError
from .io import read_input
from .plots import decimate_minmax, svg_line_plot
from .segmentation import Segment, SegmentationConfig, find_cut_indices, segment_series

# Formatting used for every numeric CSV cell: up to 9 significant digits.
CSV_FLOAT_FORMAT = ".9g"

MANIFEST_NAME = "manifest.json"
TEMPLATE_CSV_NAME = "template.csv"
ALIGNED_CSV_NAME = "aligned.csv"
SEGMENTS_CSV_NAME = "segments.csv"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one run needs besides the input samples themselves."""

    input_path: str | None = None
    out_dir: str = "."
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    strategy: AnchorStrategy = AnchorStrategy.MSE_OPTIMAL
    template_length: int = DEFAULT_TEMPLATE_LENGTH
    smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ
    channel: int | None = None
    rate_hz: float | None = None
    plots: bool = False

    def __post_init__(self):
        if self.template_length < 2:
            raise InvalidParameterError(
                f"template_length must be at least 2, got {self.template_length}"
            )
        if not self.smoothing_cutoff_hz > 0:
            raise InvalidParameterError(
                f"smoothing_cutoff_hz must be positive, got {self.smoothing_cutoff_hz}"
            )
        if self.rate_hz is not None and not self.rate_hz > 0:
            raise InvalidParameterError(
                f"rate_hz must be positive, got {self.rate_hz}"
            )
        if self.channel is not None and self.channel < 0:
            raise InvalidParameterError(
                f"channel must be non-negative, got {self.channel}"
            )


@dataclass(frozen=True)
class SegmentRecord:
    """Per-segment summary row for the manifest and segments.csv."""

    index: int
    start_index: int
    end_index: int
    duration_s: float
    anchor_time_s: float
    template_distance: float


@dataclass(frozen=True, eq=False)
class RunManifest:
    """Summary of one pipeline run, serializable as stable JSON."""

    input_path: str
    sample_rate: float
    n_samples: int
    strategy: str
    threshold_a: float | None
    alignment_mse: float
    margin_frames: int
    mse_curve: tuple[tuple[float, float | None], ...] | None
    n_segments: int
    segments: tuple[SegmentRecord, ...]
    template_length: int
    mean_duration_s: float
    anchor_position: float

    def __post_init__(self):
        if self.n_segments != len(self.segments):
            raise InvalidParameterError(
                f"manifest lists {len(self.segments)} segments but claims "
                f"{self.n_segments}"
            )

    def to_dict(self) -> dict:
        return {
            "input": {
                "path": self.input_path,
                "sample_rate": self.sample_rate,
                "n_samples": self.n_samples,
            },
            "anchor": {
                "strategy": self.strategy,
                "threshold_a": self.threshold_a,
                "mse": _json_float(self.alignment_mse),
                "margin_frames": self.margin_frames,
                "mse_curve": None
                if self.mse_curve is None
                else [[a, _json_float(m)] for a, m in self.mse_curve],
            },
            "segments": [
                {
                    "index": rec.index,
                    "start_index": rec.start_index,
                    "end_index": rec.end_index,
                    "duration_s": rec.duration_s,
                    "anchor_time_s": rec.anchor_time_s,
                    "template_distance": rec.template_distance,
                }
                for rec in self.segments
            ],
            "template": {
                "length": self.template_length,
                "n_segments": self.n_segments,
                "mean_duration_s": self.mean_duration_s,
                "anchor_position": self.anchor_position,
            },
        }


@dataclass(frozen=True, eq=False)
class PipelineResult:
    """Intermediate products of a run, for callers that want more than files."""

    segments: list[Segment]
    solution: AnchorSolution
    aligned: AlignedSet
    template: Template
    distances: tuple[float, ...]


def _json_float(value: float) -> float | None:
    return None if value is None or np.isnan(value) else float(value)


def analyze_series(series: TimeSeries, config: PipelineConfig) -> PipelineResult:
    """Run the processing chain on an in-memory series.

    Raises:
        NoSegmentsError: segmentation found nothing usable.
    """
    segments = segment_series(series, config.segmentation, config.smoothing_cutoff_hz)
    if not segments:
        raise NoSegmentsError("segmentation produced no usable segments")
    if config.strategy is AnchorStrategy.MSE_OPTIMAL:
        solution = optimize_anchor(
            segments, config.alignment, config.smoothing_cutoff_hz
        )
    else:
        solution = anchor_by_extremum(
            segments,
            config.strategy,
            burly_cutoff_hz=config.segmentation.cutoff_hz,
            config=config.alignment,
            smoothing_cutoff_hz=config.smoothing_cutoff_hz,
        )
    aligned = build_aligned_set(
        segments, solution, config.template_length, config.smoothing_cutoff_hz
    )
    template = average_template(aligned)
    distances = tuple(template_distance(row, template) for row in aligned.envelopes)
    return PipelineResult(segments, solution, aligned, template, distances)


def build_manifest(
    input_path: str, series: TimeSeries, result: PipelineResult
) -> RunManifest:
    records = tuple(
        SegmentRecord(
            index=i,
            start_index=seg.start_index,
            end_index=seg.end_index,
            duration_s=seg.duration_s,
            anchor_time_s=float(t),
            template_distance=d,
        )
        for i, (seg, t, d) in enumerate(
            zip(result.segments, result.solution.anchor_times_s, result.distances)
        )
    )
    curve = None
    if result.solution.mse_curve is not None:
        curve = tuple(
            (float(a), float(m)) for a, m in result.solution.mse_curve
        )
    return RunManifest(
        input_path=str(input_path),
        sample_rate=series.sample_rate,
        n_samples=len(series),
        strategy=result.solution.strategy.value,
        threshold_a=result.solution.threshold_a,
        alignment_mse=result.solution.mse,
        margin_frames=result.solution.margin_frames,
        mse_curve=curve,
        n_segments=len(result.segments),
        segments=records,
        template_length=result.aligned.length,
        mean_duration_s=result.template.mean_duration_s,
        anchor_position=result.aligned.anchor_position,
    )


def _fmt(value: float) -> str:
    return format(float(value), CSV_FLOAT_FORMAT)


def write_manifest_file(manifest: RunManifest, path) -> None:
    with open(path, "w", newline="\n") as handle:
        json.dump(manifest.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_template_csv(template: Template, path) -> None:
    with open(path, "w", newline="\n") as handle:
        handle.write("position,mean_envelope,std_envelope\n")
        for i in range(template.length):
            handle.write(
                f"{i},{_fmt(template.mean_envelope[i])},{_fmt(template.std_envelope[i])}\n"
            )


def write_aligned_csv(aligned: AlignedSet, path) -> None:
    # A bare matrix: one row per segment, no header.
    with open(path, "w", newline="\n") as handle:
        for row in aligned.envelopes:
            handle.write(",".join(_fmt(v) for v in row))
            handle.write("\n")


def write_segments_csv(manifest: RunManifest, path) -> None:
    with open(path, "w", newline="\n") as handle:
        handle.write(
            "index,start_index,end_index,duration_s,anchor_time_s,template_distance\n"
        )
        for rec in manifest.segments:
            handle.write(
                f"{rec.index},{rec.start_index},{rec.end_index},"
                f"{_fmt(rec.duration_s)},{_fmt(rec.anchor_time_s)},"
                f"{_fmt(rec.template_distance)}\n"
            )


def write_outputs(
    manifest: RunManifest,
    aligned: AlignedSet,
    template: Template,
    out_dir,
) -> dict[str, str]:
    """Write manifest and CSV files into ``out_dir``; returns name -> path."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        MANIFEST_NAME: os.path.join(out_dir, MANIFEST_NAME),
        TEMPLATE_CSV_NAME: os.path.join(out_dir, TEMPLATE_CSV_NAME),
        ALIGNED_CSV_NAME: os.path.join(out_dir, ALIGNED_CSV_NAME),
        SEGMENTS_CSV_NAME: os.path.join(out_dir, SEGMENTS_CSV_NAME),
    }
    write_manifest_file(manifest, paths[MANIFEST_NAME])
    write_template_csv(template, paths[TEMPLATE_CSV_NAME])
    write_aligned_csv(aligned, paths[ALIGNED_CSV_NAME])
    write_segments_csv(manifest, paths[SEGMENTS_CSV_NAME])
    return paths


def write_plots(
    series: TimeSeries,
    result: PipelineResult,
    config: PipelineConfig,
    out_dir,
) -> dict[str, str]:
    """Write the optional SVG plots into ``out_dir``; returns name -> path."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    burly = burly_envelope(series, config.segmentation.cutoff_hz)
    fine = true_envelope(series, config.smoothing_cutoff_hz)
    sig_x, sig_y = decimate_minmax(series.samples)
    env_x, env_y = decimate_minmax(fine.values)
    burly_x, burly_y = decimate_minmax(burly.values)
    cuts = find_cut_indices(burly, config.segmentation)
    paths["segmentation.svg"] = _write_svg(
        out_dir,
        "segmentation.svg",
        svg_line_plot(
            [
                (sig_x, sig_y, "signal"),
                (env_x, env_y, "true envelope"),
                (burly_x, burly_y, "burly envelope"),
            ],
            title="Segmentation cuts",
            x_label="sample index",
            y_label="amplitude",
            v_marks=[float(c) for c in cuts],
        ),
    )

    if result.solution.mse_curve is not None:
        curve = result.solution.mse_curve
        paths["mse_curve.svg"] = _write_svg(
            out_dir,
            "mse_curve.svg",
            svg_line_plot(
                [(curve[:, 0], curve[:, 1], "alignment MSE")],
                title="Anchor threshold scan",
                x_label="normalized amplitude threshold",
                y_label="mse",
                v_marks=[result.solution.threshold_a],
            ),
        )

    positions = np.arange(result.aligned.length, dtype=np.float64)
    aligned_curves = [
        (positions, row, "") for row in result.aligned.envelopes
    ]
    paths["aligned.svg"] = _write_svg(
        out_dir,
        "aligned.svg",
        svg_line_plot(
            aligned_curves,
            title="Aligned envelopes",
            x_label="position",
            y_label="normalized amplitude",
        ),
    )

    template = result.template
    lower = np.maximum(template.mean_envelope - template.std_envelope, 0.0)
    upper = template.mean_envelope + template.std_envelope
    paths["template.svg"] = _write_svg(
        out_dir,
        "template.svg",
        svg_line_plot(
            [(positions, template.mean_envelope, "mean")],
            title="Template (mean and one standard deviation)",
            x_label="position",
            y_label="normalized amplitude",
            band=(positions, lower, upper),
        ),
    )
    return paths


def _write_svg(out_dir, name: str, content: str) -> str:
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="\n") as handle:
        handle.write(content)
    return path


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Execute a full run: read input, analyze, write output files.

    Returns the manifest that was written to ``out_dir``.
    """
    if config.input_path is None:
        raise InvalidParameterError("config.input_path is required for run_pipeline")
    series = read_input(config.input_path, channel=config.channel, rate_hz=config.rate_hz)
    result = analyze_series(series, config)
    manifest = build_manifest(config.input_path, series, result)
    write_outputs(manifest, result.aligned, result.template, config.out_dir)
    if config.plots:
        write_plots(series, result, config, config.out_dir)
    return manifest
