"""Fixed-length resampling of aligned windows and template statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alignment import AnchorSolution, extract_aligned_window, normalized_true_envelope
from .core import as_readonly_f64
from .envelope import DEFAULT_SMOOTHING_CUTOFF_HZ, Envelope
from .errors import EmptyInputError, InsufficientDataError, InvalidParameterError
from .segmentation import Segment

DEFAULT_TEMPLATE_LENGTH = 1000


@dataclass(frozen=True, eq=False)
class AlignedSet:
    """A stack of anchor-aligned, length-normalized envelope rows.

    All rows share one layout: the anchor sits at the same relative position
    (``anchor_position``, as a fraction of the row) in every row.
    ``durations_s`` keeps each source segment's physical duration.
    """

    envelopes: np.ndarray
    durations_s: np.ndarray
    anchor_position: float

    def __post_init__(self):
        envelopes = np.asarray(self.envelopes, dtype=np.float64)
        if envelopes.ndim != 2:
            raise InvalidParameterError(
                f"envelopes must be a 2-D row stack, got shape {envelopes.shape}"
            )
        if envelopes.shape[0] < 1:
            raise EmptyInputError("an aligned set needs at least one row")
        if envelopes.shape[1] < 2:
            raise InvalidParameterError(
                f"rows need at least 2 positions, got {envelopes.shape[1]}"
            )
        if not np.all(np.isfinite(envelopes)):
            raise InvalidParameterError("aligned rows contain non-finite values")
        if np.any(envelopes < 0):
            raise InvalidParameterError("aligned rows must be non-negative")
        if envelopes.flags.writeable:
            envelopes = envelopes.copy() if envelopes is self.envelopes else envelopes
            envelopes.setflags(write=False)
        object.__setattr__(self, "envelopes", envelopes)
        object.__setattr__(self, "durations_s", as_readonly_f64(self.durations_s))
        if self.durations_s.shape != (envelopes.shape[0],):
            raise InvalidParameterError(
                f"need one duration per row, got {self.durations_s.shape} for "
                f"{envelopes.shape[0]} rows"
            )
        if np.any(self.durations_s <= 0):
            raise InvalidParameterError("durations must be positive")
        if not 0.0 <= self.anchor_position <= 1.0:
            raise InvalidParameterError(
                f"anchor_position must lie in [0, 1], got {self.anchor_position}"
            )

    @property
    def n_rows(self) -> int:
        return int(self.envelopes.shape[0])

    @property
    def length(self) -> int:
        return int(self.envelopes.shape[1])


@dataclass(frozen=True, eq=False)
class Template:
    """Positionwise mean and spread of an aligned set, plus the mean duration."""

    mean_envelope: np.ndarray
    std_envelope: np.ndarray
    mean_duration_s: float
    n_segments: int

    def __post_init__(self):
        object.__setattr__(self, "mean_envelope", as_readonly_f64(self.mean_envelope))
        object.__setattr__(self, "std_envelope", as_readonly_f64(self.std_envelope))
        if self.mean_envelope.shape != self.std_envelope.shape:
            raise InvalidParameterError("mean and std must have the same length")
        if np.any(self.std_envelope < 0):
            raise InvalidParameterError("std values must be non-negative")
        if not self.mean_duration_s > 0:
            raise InvalidParameterError(
                f"mean_duration_s must be positive, got {self.mean_duration_s}"
            )
        if self.n_segments < 1:
            raise InvalidParameterError(
                f"n_segments must be at least 1, got {self.n_segments}"
            )

    @property
    def length(self) -> int:
        return int(self.mean_envelope.size)


def resample_to_length(envelope, length: int) -> np.ndarray:
    """Linearly resample values onto ``length`` evenly spaced positions.

    Accepts an Envelope or a bare value array. Endpoints are preserved
    exactly, and resampling to the input's own length is the identity.
    """
    values = envelope.values if isinstance(envelope, Envelope) else None
    if values is None:
        values = np.asarray(envelope, dtype=np.float64)
    if length < 2:
        raise InvalidParameterError(f"length must be at least 2, got {length}")
    if values.ndim != 1 or values.size < 2:
        raise InsufficientDataError("resampling needs at least 2 input values")
    positions = np.linspace(0.0, values.size - 1.0, length)
    return np.interp(positions, np.arange(values.size), values)


def build_aligned_set(
    segments: Sequence[Segment],
    solution: AnchorSolution,
    length: int = DEFAULT_TEMPLATE_LENGTH,
    smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ,
) -> AlignedSet:
    """Turn anchored segments into a stack of aligned fixed-length rows.

    Each segment is extended by the solution's margin, its normalized true
    envelope computed, and the envelopes zero-padded into one common layout
    where every anchor occupies the same offset. Rows are then resampled to
    ``length`` positions, which keeps them aligned by construction.

    Args:
        segments: the segments the solution was computed for, same order.
        solution: anchor assignment; provides anchor times and the margin.
        length: row length of the output.
        smoothing_cutoff_hz: smoothing for the window envelopes.
    """
    segments = list(segments)
    if not segments:
        raise EmptyInputError("need at least one segment")
    if solution.anchor_times_s.size != len(segments):
        raise InvalidParameterError(
            f"solution holds {solution.anchor_times_s.size} anchors for "
            f"{len(segments)} segments"
        )
    rate = segments[0].sample_rate
    for seg in segments:
        if seg.sample_rate != rate:
            raise InvalidParameterError("segments must share one sample rate")

    margin = solution.margin_frames
    window_envelopes = []
    anchor_offsets = []
    for seg, t in zip(segments, solution.anchor_times_s):
        window = extract_aligned_window(seg, float(t), margin)
        window_envelopes.append(normalized_true_envelope(window, smoothing_cutoff_hz))
        anchor_offsets.append(int(round(float(t) * rate)) + margin)

    # Common layout: pad every envelope so all anchors share one offset.
    pre = max(anchor_offsets)
    post = max(len(env) - off for env, off in zip(window_envelopes, anchor_offsets))
    span = pre + post
    rows = np.empty((len(segments), length))
    for i, (env, off) in enumerate(zip(window_envelopes, anchor_offsets)):
        padded = np.zeros(span)
        padded[pre - off : pre - off + len(env)] = env.values
        rows[i] = resample_to_length(padded, length)

    durations = np.array([seg.duration_s for seg in segments])
    # All rows share the layout, so each row's anchor fraction is pre / span.
    anchor_position = float(np.mean(np.full(len(segments), pre / span)))
    return AlignedSet(rows, durations, anchor_position)


def average_template(aligned: AlignedSet) -> Template:
    """Positionwise mean and population std of the rows, plus mean duration."""
    mean = aligned.envelopes.mean(axis=0)
    std = aligned.envelopes.std(axis=0)
    return Template(
        mean_envelope=mean,
        std_envelope=std,
        mean_duration_s=float(aligned.durations_s.mean()),
        n_segments=aligned.n_rows,
    )


def template_distance(row, template: Template) -> float:
    """Root mean square difference between a row and the template mean."""
    values = np.asarray(row, dtype=np.float64)
    if values.shape != template.mean_envelope.shape:
        raise InvalidParameterError(
            f"row length {values.shape} does not match template length "
            f"{template.mean_envelope.shape}"
        )
    return float(np.sqrt(np.mean((values - template.mean_envelope) ** 2)))
