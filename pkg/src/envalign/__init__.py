"""Segment, align and average repeated pattern instances in 1-D signals.

The package cuts a semi-periodic series into individual pattern instances at
deep minima of a heavily smoothed envelope, aligns the instances at envelope
anchor points (by default the normalized amplitude threshold whose crossing
times minimize the spread between envelopes), and averages the aligned,
length-normalized envelopes into a template with positionwise spread and a
mean duration.
"""

from .alignment import (
    AlignmentConfig,
    AnchorSolution,
    AnchorStrategy,
    alignment_mse,
    anchor_by_extremum,
    anchor_time,
    extract_aligned_window,
    normalized_true_envelope,
    optimize_anchor,
    optimize_anchor_for_envelopes,
    threshold_grid,
)
from .averaging import (
    DEFAULT_TEMPLATE_LENGTH,
    AlignedSet,
    Template,
    average_template,
    build_aligned_set,
    resample_to_length,
    template_distance,
)
from .core import FilterSpec, TimeSeries, low_pass, normalize_peak
from .envelope import (
    DEFAULT_BURLY_CUTOFF_HZ,
    DEFAULT_SMOOTHING_CUTOFF_HZ,
    Envelope,
    EnvelopeKind,
    burly_envelope,
    true_envelope,
)
from .errors import (
    DegenerateSignalError,
    EmptyInputError,
    EnvAlignError,
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
    PipelineResult,
    RunManifest,
    SegmentRecord,
    analyze_series,
    run_pipeline,
    write_outputs,
)
from .segmentation import (
    Segment,
    SegmentationConfig,
    find_cut_indices,
    segment_series,
)
from .synth import BurstSpec, BurstWindow, render_burst_train

__version__ = "0.1.0"

__all__ = [
    "AlignedSet",
    "AlignmentConfig",
    "AnchorSolution",
    "AnchorStrategy",
    "BurstSpec",
    "BurstWindow",
    "DEFAULT_BURLY_CUTOFF_HZ",
    "DEFAULT_SMOOTHING_CUTOFF_HZ",
    "DEFAULT_TEMPLATE_LENGTH",
    "DegenerateSignalError",
    "EmptyInputError",
    "EnvAlignError",
    "Envelope",
    "EnvelopeKind",
    "FilterSpec",
    "InputFormatError",
    "InsufficientDataError",
    "InsufficientOverlapError",
    "InvalidParameterError",
    "NoFeasibleAnchorError",
    "NoSegmentsError",
    "PipelineConfig",
    "PipelineResult",
    "RunManifest",
    "Segment",
    "SegmentRecord",
    "SegmentationConfig",
    "Template",
    "TimeSeries",
    "alignment_mse",
    "analyze_series",
    "anchor_by_extremum",
    "anchor_time",
    "average_template",
    "build_aligned_set",
    "burly_envelope",
    "extract_aligned_window",
    "find_cut_indices",
    "low_pass",
    "normalize_peak",
    "normalized_true_envelope",
    "optimize_anchor",
    "optimize_anchor_for_envelopes",
    "read_input",
    "render_burst_train",
    "resample_to_length",
    "run_pipeline",
    "segment_series",
    "template_distance",
    "threshold_grid",
    "true_envelope",
    "write_outputs",
    "write_wav",
]
