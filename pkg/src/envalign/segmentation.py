"""Cutting a series into pattern instances at deep minima of the burly envelope."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeSeries, as_readonly_f64
from .envelope import (
    DEFAULT_BURLY_CUTOFF_HZ,
    DEFAULT_SMOOTHING_CUTOFF_HZ,
    Envelope,
    burly_envelope,
    true_envelope,
)
from .errors import InvalidParameterError

DEFAULT_SILENCE_FRACTION = 0.05
DEFAULT_MIN_DURATION_S = 0.01


@dataclass(frozen=True)
class SegmentationConfig:
    """Knobs for the cut search and the post-cut filtering."""

    cutoff_hz: float = DEFAULT_BURLY_CUTOFF_HZ
    silence_fraction: float = DEFAULT_SILENCE_FRACTION
    min_duration_s: float = DEFAULT_MIN_DURATION_S

    def __post_init__(self):
        if not self.cutoff_hz > 0:
            raise InvalidParameterError(
                f"cutoff_hz must be positive, got {self.cutoff_hz}"
            )
        if not 0.0 < self.silence_fraction < 1.0:
            raise InvalidParameterError(
                f"silence_fraction must lie in (0, 1), got {self.silence_fraction}"
            )
        if not self.min_duration_s >= 0:
            raise InvalidParameterError(
                f"min_duration_s must be non-negative, got {self.min_duration_s}"
            )


@dataclass(frozen=True, eq=False)
class Segment:
    """A contiguous run of samples cut out of a parent series.

    ``start_index`` and ``end_index`` locate the run on the parent's sample
    grid (half-open). For margin-extended windows they may reach beyond the
    parent's bounds; the samples there are zero padding.
    """

    start_index: int
    end_index: int
    samples: np.ndarray
    sample_rate: float
    parent: TimeSeries | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", as_readonly_f64(self.samples))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        if not self.sample_rate > 0:
            raise InvalidParameterError(
                f"sample_rate must be positive, got {self.sample_rate}"
            )
        if self.start_index >= self.end_index:
            raise InvalidParameterError(
                f"segment bounds must satisfy start < end, got "
                f"[{self.start_index}, {self.end_index})"
            )
        if self.samples.size != self.end_index - self.start_index:
            raise InvalidParameterError(
                f"segment holds {self.samples.size} samples but spans "
                f"{self.end_index - self.start_index} indices"
            )

    @classmethod
    def from_parent(cls, parent: TimeSeries, start_index: int, end_index: int) -> "Segment":
        """Slice ``parent[start_index:end_index]`` into a Segment."""
        if not 0 <= start_index < end_index <= len(parent):
            raise InvalidParameterError(
                f"bounds [{start_index}, {end_index}) fall outside the parent "
                f"series of length {len(parent)}"
            )
        return cls(
            start_index=start_index,
            end_index=end_index,
            samples=parent.samples[start_index:end_index],
            sample_rate=parent.sample_rate,
            parent=parent,
        )

    @classmethod
    def from_array(cls, samples, sample_rate: float, start_index: int = 0) -> "Segment":
        """Wrap a bare sample array as a standalone segment."""
        samples = as_readonly_f64(samples)
        return cls(
            start_index=start_index,
            end_index=start_index + samples.size,
            samples=samples,
            sample_rate=sample_rate,
        )

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return (self.end_index - self.start_index) / self.sample_rate

    @property
    def series(self) -> TimeSeries:
        return TimeSeries(self.samples, self.sample_rate)


def find_cut_indices(burly: Envelope, config: SegmentationConfig) -> np.ndarray:
    """Locate cut points: deep strict local minima of the burly envelope.

    A sample qualifies when its value is below both neighbours and at most
    ``silence_fraction`` of the envelope's peak. A flat valley (a run of equal
    values bounded by strictly larger ones) yields a single cut at its centre
    sample, left of centre when the run length is even.

    Returns:
        Strictly increasing array of cut indices (may be empty).
    """
    v = burly.values
    n = v.size
    if n < 3:
        return np.empty(0, dtype=np.intp)
    threshold = config.silence_fraction * float(v.max())
    change = np.flatnonzero(v[1:] != v[:-1])
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change, [n - 1]))
    interior = (starts > 0) & (ends < n - 1)
    s = starts[interior]
    e = ends[interior]
    run_values = v[s]
    deep_minimum = (
        (run_values <= threshold) & (v[s - 1] > run_values) & (v[e + 1] > run_values)
    )
    return ((s[deep_minimum] + e[deep_minimum]) // 2).astype(np.intp)


def segment_series(
    series: TimeSeries,
    config: SegmentationConfig,
    smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ,
) -> list[Segment]:
    """Split a series into pattern instances.

    Cuts at the burly envelope's deep minima (the series ends are implicit
    boundaries), then drops candidates that are too short or hold no signal:
    a candidate survives only if it lasts at least ``min_duration_s`` and its
    true-envelope peak exceeds ``silence_fraction`` times the global peak.

    Args:
        series: input series.
        config: cut and filtering settings.
        smoothing_cutoff_hz: smoothing for the true envelope used by the
            silence check.

    Returns:
        Ordered, disjoint segments (possibly empty).
    """
    burly = burly_envelope(series, config.cutoff_hz)
    cuts = find_cut_indices(burly, config)
    bounds = [0, *(int(c) for c in cuts), len(series)]

    fine = true_envelope(series, smoothing_cutoff_hz)
    global_peak = fine.peak
    silence_level = config.silence_fraction * global_peak

    segments = []
    for start, end in zip(bounds[:-1], bounds[1:]):
        if (end - start) / series.sample_rate < config.min_duration_s:
            continue
        if float(fine.values[start:end].max()) <= silence_level:
            continue
        segments.append(Segment.from_parent(series, start, end))
    return segments
