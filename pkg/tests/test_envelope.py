"""Tests for the true (fine) and burly (coarse) envelope estimators."""

import numpy as np
import pytest

from envalign import (
    BurstSpec,
    Envelope,
    EnvelopeKind,
    TimeSeries,
    burly_envelope,
    render_burst_train,
    true_envelope,
)
from envalign.errors import (
    DegenerateSignalError,
    InsufficientDataError,
    InvalidParameterError,
)

RATE = 44100.0


def central(values, fraction=0.8):
    n = values.size
    margin = int(round(n * (1.0 - fraction) / 2.0))
    return values[margin : n - margin]


def test_pure_sine_envelope_is_flat():
    t = np.arange(int(RATE)) / RATE
    series = TimeSeries(np.sin(2.0 * np.pi * 2000.0 * t), RATE)
    env = true_envelope(series, smoothing_cutoff_hz=200.0)
    mid = central(env.values)
    assert np.max(np.abs(mid - 1.0)) < 0.02
    assert np.std(mid) / np.mean(mid) < 0.03


def test_am_signal_envelope_matches_modulation():
    # The analytic magnitude of sin(2 pi 2000 t) * m(t) is |m(t)| for a
    # modulator far below the carrier; m stays positive here, so m itself is
    # the exact expected envelope.
    t = np.arange(int(RATE)) / RATE
    modulation = 1.0 + 0.5 * np.sin(2.0 * np.pi * 20.0 * t)
    series = TimeSeries(np.sin(2.0 * np.pi * 2000.0 * t) * modulation, RATE)
    env = true_envelope(series)
    err = central(env.values) - central(modulation)
    rel_rms = np.sqrt(np.mean(err**2)) / np.sqrt(np.mean(central(modulation) ** 2))
    assert rel_rms < 0.05


def test_zero_series_gives_zero_envelopes():
    series = TimeSeries(np.zeros(1000), RATE)
    np.testing.assert_array_equal(true_envelope(series).values, 0.0)
    np.testing.assert_array_equal(burly_envelope(series).values, 0.0)


def test_true_envelope_scale_equivariance():
    rng = np.random.Generator(np.random.PCG64(3))
    series = TimeSeries(rng.standard_normal(2000), RATE)
    base = true_envelope(series)
    k = 3.7
    scaled = true_envelope(TimeSeries(k * series.samples, RATE))
    np.testing.assert_allclose(scaled.values, k * base.values, rtol=1e-6, atol=1e-12)


def test_burly_envelope_sign_flip_invariance():
    rng = np.random.Generator(np.random.PCG64(4))
    series = TimeSeries(rng.standard_normal(2000), RATE)
    flipped = TimeSeries(-series.samples, RATE)
    np.testing.assert_array_equal(
        burly_envelope(series).values, burly_envelope(flipped).values
    )


def test_envelopes_are_non_negative():
    rng = np.random.Generator(np.random.PCG64(5))
    series = TimeSeries(rng.standard_normal(5000), RATE)
    assert np.all(true_envelope(series).values >= 0)
    assert np.all(burly_envelope(series).values >= 0)


def test_constant_series_burly_envelope():
    series = TimeSeries(np.full(4000, 0.75), RATE)
    env = burly_envelope(series, cutoff_hz=30.0)
    assert np.max(np.abs(central(env.values) - 0.75)) < 1e-6


def test_burly_envelope_dips_in_the_gap():
    # Two bursts with 100 ms of silence between them: the burly envelope has
    # to fall below a tenth of its peak somewhere inside the gap.
    specs = [
        BurstSpec(carrier_hz=2000.0, duration_s=0.08, onset_s=0.10, amplitude=1.0),
        BurstSpec(carrier_hz=2000.0, duration_s=0.08, onset_s=0.28, amplitude=1.0),
    ]
    series, _ = render_burst_train(specs, RATE, total_s=0.46)
    env = burly_envelope(series, cutoff_hz=30.0)
    gap = env.values[int(0.18 * RATE) : int(0.28 * RATE)]
    assert gap.min() < 0.1 * env.peak


def test_burly_merges_pulses_into_one_hump():
    # The burst's fine 2 kHz oscillation must not survive a 30 Hz cutoff: the
    # burly envelope of one burst is unimodal over the burst's support.
    specs = [BurstSpec(carrier_hz=2000.0, duration_s=0.08, onset_s=0.10)]
    series, _ = render_burst_train(specs, RATE, total_s=0.28)
    env = burly_envelope(series, cutoff_hz=30.0)
    inside = env.values[int(0.10 * RATE) : int(0.18 * RATE)]
    peak_pos = int(np.argmax(inside))
    rising = np.diff(inside[:peak_pos])
    falling = np.diff(inside[peak_pos:])
    assert np.all(rising > 0)
    assert np.all(falling < 0)


def test_true_envelope_needs_16_samples():
    with pytest.raises(InsufficientDataError):
        true_envelope(TimeSeries(np.ones(15), RATE))
    true_envelope(TimeSeries(np.sin(np.arange(16.0)), RATE))


def test_smoothing_cutoff_must_be_below_nyquist():
    series = TimeSeries(np.sin(np.arange(100.0)), RATE)
    with pytest.raises(InvalidParameterError):
        true_envelope(series, smoothing_cutoff_hz=RATE / 2.0)
    with pytest.raises(InvalidParameterError):
        burly_envelope(series, cutoff_hz=RATE)


def test_envelope_validation():
    with pytest.raises(InvalidParameterError):
        Envelope([-0.1, 0.5], RATE, EnvelopeKind.TRUE)
    with pytest.raises(InvalidParameterError):
        Envelope([0.1, np.inf], RATE, EnvelopeKind.TRUE)
    with pytest.raises(InvalidParameterError):
        Envelope([0.1, 0.5], 0.0, EnvelopeKind.TRUE)
    env = Envelope([0.1, 0.5], RATE, EnvelopeKind.TRUE)
    assert env.peak == 0.5
    assert len(env) == 2


def test_envelope_normalized():
    env = Envelope([0.0, 0.25, 0.5], RATE, EnvelopeKind.TRUE)
    normalized = env.normalized()
    assert normalized.peak == 1.0
    np.testing.assert_array_equal(normalized.values, [0.0, 0.5, 1.0])
    assert normalized.kind is EnvelopeKind.TRUE
    with pytest.raises(DegenerateSignalError):
        Envelope([0.0, 0.0], RATE, EnvelopeKind.TRUE).normalized()


def test_envelope_kinds_are_labelled():
    series = TimeSeries(np.sin(np.arange(100.0)), RATE)
    assert true_envelope(series).kind is EnvelopeKind.TRUE
    assert burly_envelope(series).kind is EnvelopeKind.BURLY
