"""Reading input series from WAV and CSV files, and writing WAV output.

WAV integer samples are mapped into [-1, 1] by dividing by the sample type's
maximum magnitude (256 levels map 128 -> 0.0); float samples pass through
unchanged. CSV input is either one value per line (an explicit sample rate is
then required) or time,value pairs whose time column must be uniform to
within one part per million (the rate is inferred from it).
"""

from __future__ import annotations

import csv
import os
import wave

import numpy as np

from .core import TimeSeries
from .errors import InputFormatError, InvalidParameterError

# Relative tolerance on time-column spacing when inferring the sample rate.
UNIFORM_SPACING_TOLERANCE = 1e-6


def read_input(
    path, channel: int | None = None, rate_hz: float | None = None
) -> TimeSeries:
    """Read a series from ``path``, dispatching on the file extension.

    Args:
        path: a .wav or .csv file.
        channel: zero-based channel to take from a multi-channel WAV;
            required for anything that is not mono.
        rate_hz: sample rate for single-column CSV input.
    """
    suffix = os.path.splitext(str(path))[1].lower()
    if suffix == ".wav":
        return read_wav(path, channel)
    if suffix in (".csv", ".txt"):
        return read_csv_series(path, rate_hz)
    raise InputFormatError(
        f"{path}: unsupported input type {suffix or '(none)'}, expected .wav or .csv"
    )


def _scale_wav_samples(data: np.ndarray, path) -> np.ndarray:
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        # scipy widens 24-bit PCM into the top bytes of int32, so one divisor
        # covers both 24-bit and 32-bit integer data.
        return data.astype(np.float64) / 2147483648.0
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float64)
    raise InputFormatError(f"{path}: unsupported WAV sample format {data.dtype}")


def read_wav(path, channel: int | None = None) -> TimeSeries:
    """Read a WAV file (8/16/24-bit integer or 32-bit float PCM)."""
    from scipy.io import wavfile

    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise InputFormatError(f"{path}: not a readable WAV file ({exc})") from exc

    if data.ndim == 2:
        n_channels = data.shape[1]
        if channel is None:
            raise InputFormatError(
                f"{path}: {n_channels}-channel input needs an explicit channel"
            )
        if not 0 <= channel < n_channels:
            raise InputFormatError(
                f"{path}: channel {channel} out of range for {n_channels} channels"
            )
        data = data[:, channel]
    elif channel not in (None, 0):
        raise InputFormatError(f"{path}: channel {channel} requested from mono input")

    samples = _scale_wav_samples(data, path)
    try:
        return TimeSeries(samples, float(rate))
    except InvalidParameterError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def read_csv_series(path, rate_hz: float | None = None) -> TimeSeries:
    """Read a series from a one-column or time,value CSV file."""
    rows = []
    with open(path, "r", newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise InputFormatError(f"{path}:{line_no}: {exc}") from exc
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    width = len(rows[0])
    if width not in (1, 2) or any(len(row) != width for row in rows):
        raise InputFormatError(
            f"{path}: expected one value per line or time,value pairs"
        )

    if width == 1:
        if rate_hz is None:
            raise InputFormatError(
                f"{path}: single-column input needs an explicit sample rate"
            )
        if not rate_hz > 0:
            raise InputFormatError(f"{path}: sample rate must be positive")
        values = np.array([row[0] for row in rows])
        return _wrap_csv_series(values, float(rate_hz), path)

    data = np.array(rows)
    times, values = data[:, 0], data[:, 1]
    if times.size < 2:
        raise InputFormatError(f"{path}: need at least 2 rows to infer a sample rate")
    mean_dt = (times[-1] - times[0]) / (times.size - 1)
    if not mean_dt > 0:
        raise InputFormatError(f"{path}: time column must be strictly increasing")
    deviation = np.max(np.abs(np.diff(times) - mean_dt))
    if deviation > UNIFORM_SPACING_TOLERANCE * mean_dt:
        raise InputFormatError(
            f"{path}: time column is not uniformly spaced "
            f"(max deviation {deviation:.3g} s exceeds 1 ppm of {mean_dt:.3g} s)"
        )
    return _wrap_csv_series(values, 1.0 / mean_dt, path)


def _wrap_csv_series(values: np.ndarray, rate: float, path) -> TimeSeries:
    try:
        return TimeSeries(values, rate)
    except InvalidParameterError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def write_wav(path, series: TimeSeries) -> None:
    """Write a series as 16-bit mono PCM, clipping to [-1, 1]."""
    pcm = np.rint(np.clip(series.samples, -1.0, 1.0) * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(int(round(series.sample_rate)))
        handle.writeframes(pcm.tobytes())
