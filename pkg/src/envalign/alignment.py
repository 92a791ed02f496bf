"""Anchor-point selection and alignment scoring for segment envelopes.

Each segment gets an anchor time. Shifting every envelope so its anchor sits
at time zero and measuring the spread between the shifted envelopes gives a
single alignment score: the mean squared deviation from the pointwise mean
envelope over the common support,

    mse = (1 / (N * M)) * sum_i sum_t (e_i(t) - mean(t)) ** 2

for N envelopes evaluated at the M positions where all shifted supports
overlap. The preferred anchor is the earliest crossing of a normalized
amplitude threshold ``a``; the threshold itself is chosen by scanning a
uniform grid and keeping the value with the lowest score. Envelope extrema
are available as cheaper alternative anchor features.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .envelope import (
    DEFAULT_BURLY_CUTOFF_HZ,
    DEFAULT_SMOOTHING_CUTOFF_HZ,
    Envelope,
    burly_envelope,
    true_envelope,
)
from .errors import (
    EmptyInputError,
    InsufficientOverlapError,
    InvalidParameterError,
    NoFeasibleAnchorError,
)
from .segmentation import Segment

DEFAULT_GRID_STEP = 0.05
DEFAULT_MARGIN_FRAMES = 100
DEFAULT_MIN_OVERLAP_FRACTION = 0.5


class AnchorStrategy(Enum):
    """How to pick each segment's anchor point."""

    MSE_OPTIMAL = "mse-opt"
    TRUE_ENVELOPE_MAX = "env-max"
    TRUE_ENVELOPE_MIN = "env-min"
    BURLY_ENVELOPE_MAX = "burly-max"


@dataclass(frozen=True)
class AlignmentConfig:
    """Knobs for anchor optimization and window extraction."""

    grid_step: float = DEFAULT_GRID_STEP
    margin_frames: int = DEFAULT_MARGIN_FRAMES
    min_overlap_fraction: float = DEFAULT_MIN_OVERLAP_FRACTION

    def __post_init__(self):
        if not 0.0 < self.grid_step <= 1.0:
            raise InvalidParameterError(
                f"grid_step must lie in (0, 1], got {self.grid_step}"
            )
        if self.margin_frames < 0:
            raise InvalidParameterError(
                f"margin_frames must be non-negative, got {self.margin_frames}"
            )
        if not 0.0 < self.min_overlap_fraction <= 1.0:
            raise InvalidParameterError(
                f"min_overlap_fraction must lie in (0, 1], got "
                f"{self.min_overlap_fraction}"
            )


@dataclass(frozen=True, eq=False)
class AnchorSolution:
    """A per-segment anchor assignment and its alignment score.

    ``threshold_a`` is set only for the MSE_OPTIMAL strategy; ``mse_curve``
    then holds the full scan as rows of (a, mse), with NaN marking thresholds
    rejected for insufficient overlap. ``mse`` may be NaN for extremum
    strategies whose diagnostic score could not be evaluated.
    """

    strategy: AnchorStrategy
    anchor_times_s: np.ndarray
    mse: float
    margin_frames: int
    threshold_a: float | None = None
    mse_curve: np.ndarray | None = None

    def __post_init__(self):
        from .core import as_readonly_f64

        object.__setattr__(self, "anchor_times_s", as_readonly_f64(self.anchor_times_s))
        if self.anchor_times_s.size < 1:
            raise InvalidParameterError("an anchor solution needs at least one anchor")
        if np.any(self.anchor_times_s < 0):
            raise InvalidParameterError("anchor times must be non-negative")
        if not (np.isnan(self.mse) or self.mse >= 0):
            raise InvalidParameterError(f"mse must be non-negative, got {self.mse}")
        if self.margin_frames < 0:
            raise InvalidParameterError(
                f"margin_frames must be non-negative, got {self.margin_frames}"
            )
        if self.strategy is AnchorStrategy.MSE_OPTIMAL:
            if self.threshold_a is None or not 0.0 < self.threshold_a <= 1.0:
                raise InvalidParameterError(
                    f"threshold_a must lie in (0, 1], got {self.threshold_a}"
                )
        elif self.threshold_a is not None:
            raise InvalidParameterError(
                "threshold_a only applies to the MSE_OPTIMAL strategy"
            )
        if self.mse_curve is not None:
            curve = np.asarray(self.mse_curve, dtype=np.float64)
            if curve.ndim != 2 or curve.shape[1] != 2:
                raise InvalidParameterError("mse_curve must have shape (K, 2)")
            curve.setflags(write=False)
            object.__setattr__(self, "mse_curve", curve)


def anchor_time(envelope: Envelope, a: float) -> float:
    """Time of the earliest sample whose normalized amplitude reaches ``a``.

    Args:
        envelope: a peak-normalized envelope (maximum value exactly 1).
        a: threshold in (0, 1]; a crossing always exists since the peak is 1.

    Returns:
        Anchor time in seconds relative to the envelope's first sample.
    """
    if not 0.0 < a <= 1.0:
        raise InvalidParameterError(f"threshold must lie in (0, 1], got {a}")
    if abs(envelope.peak - 1.0) > 1e-9:
        raise InvalidParameterError(
            f"envelope must be normalized to peak 1, peak is {envelope.peak}"
        )
    index = int(np.argmax(envelope.values >= a))
    return index / envelope.sample_rate


def normalized_true_envelope(
    segment: Segment, smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ
) -> Envelope:
    """Peak-normalized true envelope of a segment."""
    return true_envelope(segment.series, smoothing_cutoff_hz).normalized()


def _anchor_sample_indices(
    envelopes: Sequence[Envelope], anchor_times_s
) -> tuple[float, list[int]]:
    """Validate envelopes plus anchors and return (rate, per-envelope indices)."""
    if len(envelopes) == 0:
        raise EmptyInputError("need at least one envelope")
    rate = envelopes[0].sample_rate
    for env in envelopes:
        if env.sample_rate != rate:
            raise InvalidParameterError(
                f"envelopes must share one sample rate, got {env.sample_rate} "
                f"and {rate}"
            )
    anchors = np.asarray(anchor_times_s, dtype=np.float64)
    if anchors.shape != (len(envelopes),):
        raise InvalidParameterError(
            f"need exactly one anchor time per envelope, got shape {anchors.shape} "
            f"for {len(envelopes)} envelopes"
        )
    indices = []
    for env, t in zip(envelopes, anchors):
        idx = int(round(float(t) * rate))
        if not 0 <= idx < len(env):
            raise InvalidParameterError(
                f"anchor time {t} s falls outside an envelope of "
                f"{len(env)} samples at {rate} Hz"
            )
        indices.append(idx)
    return rate, indices


def alignment_mse(
    envelopes: Sequence[Envelope],
    anchor_times_s,
    min_overlap_fraction: float = DEFAULT_MIN_OVERLAP_FRACTION,
) -> float:
    """Alignment score of envelopes shifted so their anchors coincide.

    Anchors are sample-aligned, so the shifted envelopes share one sample
    lattice; the score is evaluated on the intersection of their shifted
    supports:

        mse = (1 / (N * M)) * sum_i sum_t (e_i(t) - mean(t)) ** 2

    Args:
        envelopes: at least one envelope, all at the same rate.
        anchor_times_s: one anchor time per envelope, inside its support.
        min_overlap_fraction: reject overlaps shorter than this fraction of
            the shortest envelope.

    Returns:
        Non-negative score; exactly 0.0 for a single envelope.

    Raises:
        InsufficientOverlapError: common support shorter than the allowed
            minimum.
    """
    envs = list(envelopes)
    _, indices = _anchor_sample_indices(envs, anchor_times_s)
    # Anchor-relative sample offsets available to envelope i: [-a_i, L_i-1-a_i].
    lo = max(-idx for idx in indices)
    hi = min(len(env) - 1 - idx for env, idx in zip(envs, indices))
    overlap = hi - lo + 1
    shortest = min(len(env) for env in envs)
    if overlap < min_overlap_fraction * shortest:
        raise InsufficientOverlapError(
            f"shifted envelopes overlap on {max(overlap, 0)} samples, need at "
            f"least {min_overlap_fraction} of the shortest envelope "
            f"({shortest} samples)"
        )
    rows = np.stack(
        [env.values[idx + lo : idx + hi + 1] for env, idx in zip(envs, indices)]
    )
    mean = rows.mean(axis=0)
    return float(np.mean((rows - mean) ** 2))


def threshold_grid(grid_step: float) -> np.ndarray:
    """Ascending grid of thresholds {grid_step, 2*grid_step, ...} ending at 1."""
    if not 0.0 < grid_step <= 1.0:
        raise InvalidParameterError(f"grid_step must lie in (0, 1], got {grid_step}")
    n = max(1, round(1.0 / grid_step))
    if n * grid_step < 1.0 - 1e-9:
        n += 1
    return np.unique(np.minimum(np.arange(1, n + 1) * grid_step, 1.0))


def optimize_anchor_for_envelopes(
    envelopes: Sequence[Envelope], config: AlignmentConfig
) -> AnchorSolution:
    """Scan the threshold grid and keep the anchor threshold with lowest MSE.

    Thresholds whose shifted envelopes overlap too little are skipped and
    recorded as NaN in the returned curve. Ties go to the smaller threshold.

    Raises:
        NoFeasibleAnchorError: every grid threshold was rejected.
    """
    envs = list(envelopes)
    if not envs:
        raise EmptyInputError("need at least one envelope")
    grid = threshold_grid(config.grid_step)
    curve = np.full((grid.size, 2), np.nan)
    curve[:, 0] = grid
    best_mse = None
    best_a = None
    best_anchors = None
    for j, a in enumerate(grid):
        anchors = np.array([anchor_time(env, float(a)) for env in envs])
        try:
            mse = alignment_mse(envs, anchors, config.min_overlap_fraction)
        except InsufficientOverlapError:
            continue
        curve[j, 1] = mse
        if best_mse is None or mse < best_mse:
            best_mse, best_a, best_anchors = mse, float(a), anchors
    if best_mse is None:
        raise NoFeasibleAnchorError(
            "every threshold on the grid left the envelopes with insufficient "
            "overlap"
        )
    return AnchorSolution(
        strategy=AnchorStrategy.MSE_OPTIMAL,
        anchor_times_s=best_anchors,
        mse=best_mse,
        margin_frames=config.margin_frames,
        threshold_a=best_a,
        mse_curve=curve,
    )


def optimize_anchor(
    segments: Sequence[Segment],
    config: AlignmentConfig,
    smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ,
) -> AnchorSolution:
    """Pick the MSE-optimal anchor threshold for a set of segments.

    Computes each segment's normalized true envelope, then delegates to
    optimize_anchor_for_envelopes.
    """
    if len(segments) == 0:
        raise EmptyInputError("need at least one segment")
    envs = [normalized_true_envelope(seg, smoothing_cutoff_hz) for seg in segments]
    return optimize_anchor_for_envelopes(envs, config)


def anchor_by_extremum(
    segments: Sequence[Segment],
    strategy: AnchorStrategy,
    burly_cutoff_hz: float = DEFAULT_BURLY_CUTOFF_HZ,
    config: AlignmentConfig | None = None,
    smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ,
) -> AnchorSolution:
    """Anchor each segment at an envelope extremum.

    Supported strategies: TRUE_ENVELOPE_MAX (earliest global maximum of the
    true envelope), TRUE_ENVELOPE_MIN (its interior minimum, endpoints
    excluded), BURLY_ENVELOPE_MAX (maximum of the segment's burly envelope at
    ``burly_cutoff_hz``). The alignment score is still evaluated on the true
    envelopes for diagnostics; it is NaN when the overlap guard rejects it.
    """
    if strategy is AnchorStrategy.MSE_OPTIMAL:
        raise InvalidParameterError(
            "MSE_OPTIMAL anchors come from optimize_anchor, not an extremum"
        )
    if len(segments) == 0:
        raise EmptyInputError("need at least one segment")
    config = config if config is not None else AlignmentConfig()
    envs = [normalized_true_envelope(seg, smoothing_cutoff_hz) for seg in segments]
    times = []
    for seg, env in zip(segments, envs):
        if strategy is AnchorStrategy.TRUE_ENVELOPE_MAX:
            index = int(np.argmax(env.values))
        elif strategy is AnchorStrategy.TRUE_ENVELOPE_MIN:
            # Interior minimum: the segment's edges do not count.
            index = 1 + int(np.argmin(env.values[1:-1]))
        elif strategy is AnchorStrategy.BURLY_ENVELOPE_MAX:
            index = int(np.argmax(burly_envelope(seg.series, burly_cutoff_hz).values))
        else:
            raise InvalidParameterError(f"unsupported anchor strategy {strategy}")
        times.append(index / seg.sample_rate)
    anchors = np.array(times)
    try:
        mse = alignment_mse(envs, anchors, config.min_overlap_fraction)
    except InsufficientOverlapError:
        mse = float("nan")
    return AnchorSolution(
        strategy=strategy,
        anchor_times_s=anchors,
        mse=mse,
        margin_frames=config.margin_frames,
    )


def extract_aligned_window(
    segment: Segment, anchor_time_s: float, margin_frames: int
) -> Segment:
    """Extend a segment by ``margin_frames`` samples on each side.

    The extension takes real samples from the parent series where available
    and zero-pads past the parent's bounds, so every window keeps the same
    length budget relative to its anchor. The window's indices describe its
    position on the parent grid and may reach outside the parent.

    Args:
        segment: the segment to extend.
        anchor_time_s: anchor time within the segment (validated only).
        margin_frames: non-negative number of samples to add per side; 0
            returns the segment unchanged.
    """
    if margin_frames < 0:
        raise InvalidParameterError(
            f"margin_frames must be non-negative, got {margin_frames}"
        )
    anchor_index = int(round(anchor_time_s * segment.sample_rate))
    if not 0 <= anchor_index < len(segment):
        raise InvalidParameterError(
            f"anchor time {anchor_time_s} s falls outside the segment"
        )
    if margin_frames == 0:
        return segment
    m = int(margin_frames)
    if segment.parent is not None:
        source = segment.parent.samples
        offset = segment.start_index
    else:
        source = segment.samples
        offset = 0
    lo = offset - m
    hi = offset + len(segment) + m
    window = np.zeros(hi - lo)
    src_lo = max(lo, 0)
    src_hi = min(hi, source.size)
    if src_lo < src_hi:
        window[src_lo - lo : src_hi - lo] = source[src_lo:src_hi]
    return Segment(
        start_index=segment.start_index - m,
        end_index=segment.end_index + m,
        samples=window,
        sample_rate=segment.sample_rate,
        parent=segment.parent,
    )
