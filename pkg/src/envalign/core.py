"""Core series type, zero-phase low-pass filtering, and peak normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import (
    DegenerateSignalError,
    InsufficientDataError,
    InvalidParameterError,
)

DEFAULT_FILTER_ORDER = 4


def as_readonly_f64(values) -> np.ndarray:
    """Return ``values`` as an immutable 1-D float64 array.

    Copies only when needed so slices of already frozen arrays stay views.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidParameterError(f"expected a 1-D sequence, got shape {arr.shape}")
    if arr is values and arr.flags.writeable:
        arr = arr.copy()
    if arr.flags.writeable:
        arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A uniformly sampled 1-D amplitude sequence."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        object.__setattr__(self, "samples", as_readonly_f64(self.samples))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        if not self.sample_rate > 0:
            raise InvalidParameterError(
                f"sample_rate must be positive, got {self.sample_rate}"
            )
        if self.samples.size < 1:
            raise InvalidParameterError("a series needs at least one sample")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidParameterError("series contains non-finite samples")

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate

    @property
    def nyquist_hz(self) -> float:
        return self.sample_rate / 2.0


@dataclass(frozen=True)
class FilterSpec:
    """Low-pass settings.

    ``order`` is the effective order of the zero-phase result; the forward
    pass is designed at half that order because running it backward as well
    doubles the attenuation. It must therefore be even.
    """

    cutoff_hz: float
    order: int = DEFAULT_FILTER_ORDER

    def __post_init__(self):
        if not self.cutoff_hz > 0:
            raise InvalidParameterError(
                f"cutoff_hz must be positive, got {self.cutoff_hz}"
            )
        if self.order < 2 or self.order % 2 != 0:
            raise InvalidParameterError(
                f"order must be an even integer >= 2, got {self.order}"
            )


def low_pass(series: TimeSeries, spec: FilterSpec) -> TimeSeries:
    """Apply a zero-phase Butterworth low-pass filter.

    The series is reflect-padded by three times the effective filter order at
    each end, filtered forward and backward, then trimmed back, so the output
    has the input's length and no phase lag.

    Args:
        series: input series; must hold at least ``3 * spec.order`` samples.
        spec: cutoff and effective order; the cutoff must sit below Nyquist.

    Returns:
        A new TimeSeries of the same length and rate.

    Raises:
        InvalidParameterError: cutoff at or above the Nyquist frequency.
        InsufficientDataError: series shorter than three filter orders.
    """
    if spec.cutoff_hz >= series.nyquist_hz:
        raise InvalidParameterError(
            f"cutoff {spec.cutoff_hz} Hz must be below the Nyquist frequency "
            f"{series.nyquist_hz} Hz"
        )
    pad = 3 * spec.order
    if len(series) < pad:
        raise InsufficientDataError(
            f"need at least {pad} samples to filter, got {len(series)}"
        )
    # Second-order sections keep the design stable at very low relative cutoffs.
    sos = signal.butter(
        spec.order // 2, spec.cutoff_hz, btype="low", fs=series.sample_rate, output="sos"
    )
    padded = np.pad(series.samples, pad, mode="reflect")
    filtered = signal.sosfiltfilt(sos, padded, padlen=0)
    return TimeSeries(filtered[pad:-pad], series.sample_rate)


def normalize_peak(series: TimeSeries) -> TimeSeries:
    """Scale the series so its peak magnitude is exactly 1.

    Raises:
        DegenerateSignalError: the series is all zeros.
    """
    peak = float(np.max(np.abs(series.samples)))
    if peak == 0.0:
        raise DegenerateSignalError("cannot normalize an all-zero series")
    return TimeSeries(series.samples / peak, series.sample_rate)
