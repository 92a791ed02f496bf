"""Fine and coarse amplitude envelopes of a series.

Two envelopes drive everything downstream. The true envelope follows the
amplitude shape of each individual pulse: magnitude of the analytic signal,
lightly smoothed. The burly envelope is much heavier handed: it low-passes the
rectified signal near the pattern repetition rate, so individual pulses merge
into single humps and the deep valleys between humps mark the boundaries
between pattern instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import signal

from .core import FilterSpec, TimeSeries, as_readonly_f64, low_pass
from .errors import DegenerateSignalError, InsufficientDataError, InvalidParameterError

DEFAULT_SMOOTHING_CUTOFF_HZ = 150.0
DEFAULT_BURLY_CUTOFF_HZ = 30.0
MIN_TRUE_ENVELOPE_SAMPLES = 16


class EnvelopeKind(Enum):
    TRUE = "true"
    BURLY = "burly"


@dataclass(frozen=True, eq=False)
class Envelope:
    """A non-negative amplitude envelope sampled at the source rate."""

    values: np.ndarray
    sample_rate: float
    kind: EnvelopeKind

    def __post_init__(self):
        object.__setattr__(self, "values", as_readonly_f64(self.values))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        if not self.sample_rate > 0:
            raise InvalidParameterError(
                f"sample_rate must be positive, got {self.sample_rate}"
            )
        if self.values.size < 1:
            raise InvalidParameterError("an envelope needs at least one value")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameterError("envelope contains non-finite values")
        if np.any(self.values < 0):
            raise InvalidParameterError("envelope values must be non-negative")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def peak(self) -> float:
        return float(self.values.max())

    def normalized(self) -> "Envelope":
        """Return a copy scaled so the peak value is exactly 1."""
        peak = self.peak
        if peak == 0.0:
            raise DegenerateSignalError("cannot normalize an all-zero envelope")
        return Envelope(self.values / peak, self.sample_rate, self.kind)


def true_envelope(
    series: TimeSeries, smoothing_cutoff_hz: float = DEFAULT_SMOOTHING_CUTOFF_HZ
) -> Envelope:
    """Estimate the fine amplitude envelope of a series.

    Builds the analytic signal (negative frequencies zeroed, positive doubled,
    inverse transformed), takes its magnitude, smooths it with a zero-phase
    low-pass at ``smoothing_cutoff_hz``, and clamps at zero.

    Args:
        series: input series of at least 16 samples.
        smoothing_cutoff_hz: smoothing cutoff, strictly between 0 and Nyquist.

    Returns:
        An Envelope of kind TRUE with the input's length and rate.

    Raises:
        InsufficientDataError: fewer than 16 samples.
        InvalidParameterError: smoothing cutoff outside (0, Nyquist).
    """
    if len(series) < MIN_TRUE_ENVELOPE_SAMPLES:
        raise InsufficientDataError(
            f"true envelope needs at least {MIN_TRUE_ENVELOPE_SAMPLES} samples, "
            f"got {len(series)}"
        )
    magnitude = np.abs(signal.hilbert(series.samples))
    smoothed = low_pass(
        TimeSeries(magnitude, series.sample_rate), FilterSpec(smoothing_cutoff_hz)
    )
    return Envelope(
        np.maximum(smoothed.samples, 0.0), series.sample_rate, EnvelopeKind.TRUE
    )


def burly_envelope(
    series: TimeSeries, cutoff_hz: float = DEFAULT_BURLY_CUTOFF_HZ
) -> Envelope:
    """Estimate the coarse segmentation envelope of a series.

    Low-passes the rectified signal at ``cutoff_hz`` (zero phase) and clamps
    at zero. Deep minima of this envelope separate pattern instances.
    """
    rectified = np.abs(series.samples)
    smoothed = low_pass(TimeSeries(rectified, series.sample_rate), FilterSpec(cutoff_hz))
    return Envelope(
        np.maximum(smoothed.samples, 0.0), series.sample_rate, EnvelopeKind.BURLY
    )
