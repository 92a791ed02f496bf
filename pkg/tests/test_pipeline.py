"""End-to-end tests for the pipeline API and the command line interface."""

import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from envalign import (
    BurstSpec,
    PipelineConfig,
    TimeSeries,
    analyze_series,
    read_input,
    render_burst_train,
    run_pipeline,
    write_outputs,
    write_wav,
)
from envalign.cli import main
from envalign.errors import NoSegmentsError

RATE = 44100.0


@pytest.fixture(scope="module")
def burst_wav(tmp_path_factory):
    """A noise-free train of three identical bursts, written as WAV."""
    specs = [
        BurstSpec(carrier_hz=2000.0, duration_s=0.08, onset_s=0.15 + 0.23 * i)
        for i in range(3)
    ]
    series, _ = render_burst_train(specs, RATE, total_s=0.95)
    path = tmp_path_factory.mktemp("input") / "bursts.wav"
    write_wav(path, series)
    return str(path)


@pytest.fixture(scope="module")
def mirrored_ramp_csv(tmp_path_factory):
    """Two chunks whose envelopes mirror each other: a fast start with a slow
    decay, then a slow rise with a fast end. Their anchor candidates sit at
    opposite ends at every threshold, so a high overlap demand cannot be met.
    """
    rate = 8000.0
    t = np.arange(int(0.4 * rate)) / rate
    down = 1.0 - 0.88 * (t / 0.4)
    up = 0.12 + 0.88 * (t / 0.4)
    m = np.concatenate([down, np.zeros(int(0.06 * rate)), up])
    x = m * np.cos(2.0 * np.pi * 997.0 * np.arange(m.size) / rate)
    path = tmp_path_factory.mktemp("input") / "mirror.csv"
    np.savetxt(path, x, fmt="%.9g")
    return str(path)


def read_lines(path):
    with open(path) as handle:
        return handle.read().splitlines()


def test_run_pipeline_writes_all_outputs(burst_wav, tmp_path):
    out = tmp_path / "out"
    manifest = run_pipeline(
        PipelineConfig(input_path=burst_wav, out_dir=str(out))
    )
    assert manifest.n_segments == 3
    for name in ("manifest.json", "template.csv", "aligned.csv", "segments.csv"):
        assert (out / name).is_file()
    lines = read_lines(out / "template.csv")
    assert lines[0] == "position,mean_envelope,std_envelope"
    assert len(lines) == 1001
    aligned = np.loadtxt(out / "aligned.csv", delimiter=",")
    assert aligned.shape == (3, 1000)
    seg_lines = read_lines(out / "segments.csv")
    assert seg_lines[0] == (
        "index,start_index,end_index,duration_s,anchor_time_s,template_distance"
    )
    assert len(seg_lines) == 4


def test_manifest_structure(burst_wav, tmp_path):
    out = tmp_path / "out"
    run_pipeline(PipelineConfig(input_path=burst_wav, out_dir=str(out)))
    with open(out / "manifest.json") as handle:
        data = json.load(handle)
    assert set(data) == {"input", "anchor", "segments", "template"}
    assert data["input"]["sample_rate"] == RATE
    assert data["anchor"]["strategy"] == "mse-opt"
    assert data["anchor"]["margin_frames"] == 100
    grid = [0.05 * k for k in range(1, 21)]
    assert min(abs(data["anchor"]["threshold_a"] - g) for g in grid) < 1e-12
    assert len(data["anchor"]["mse_curve"]) == 20
    assert len(data["segments"]) == 3
    for rec in data["segments"]:
        assert rec["end_index"] > rec["start_index"]
        assert rec["duration_s"] > 0
        assert rec["template_distance"] >= 0
    assert data["template"]["length"] == 1000
    assert 0.0 <= data["template"]["anchor_position"] <= 1.0


def test_csv_float_precision_roundtrip(burst_wav, tmp_path):
    series = read_input(burst_wav)
    result = analyze_series(series, PipelineConfig())
    from envalign.pipeline import build_manifest

    manifest = build_manifest(burst_wav, series, result)
    out = tmp_path / "out"
    write_outputs(manifest, result.aligned, result.template, str(out))
    aligned = np.loadtxt(out / "aligned.csv", delimiter=",")
    # Nine significant digits survive the trip well inside 1e-8 relative.
    np.testing.assert_allclose(
        aligned, result.aligned.envelopes, rtol=1e-8, atol=1e-12
    )
    template = np.loadtxt(out / "template.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(
        template[:, 1], result.template.mean_envelope, rtol=1e-8, atol=1e-12
    )


def test_outputs_are_byte_deterministic(burst_wav, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_pipeline(PipelineConfig(input_path=burst_wav, out_dir=str(out_a)))
    run_pipeline(PipelineConfig(input_path=burst_wav, out_dir=str(out_b)))
    for name in ("manifest.json", "template.csv", "aligned.csv", "segments.csv"):
        with open(out_a / name, "rb") as fa, open(out_b / name, "rb") as fb:
            assert fa.read() == fb.read(), name


def test_identical_bursts_align_tightly(burst_wav):
    series = read_input(burst_wav)
    result = analyze_series(series, PipelineConfig())
    assert result.solution.mse < 1e-9
    # 16-bit quantization keeps the three windows from being bit-identical,
    # but the spread across rows stays tiny.
    assert float(result.template.std_envelope.max()) < 1e-3
    assert max(result.distances) < 1e-3


def test_silent_input_has_no_segments():
    series = TimeSeries(np.zeros(44100), RATE)
    with pytest.raises(NoSegmentsError):
        analyze_series(series, PipelineConfig())


def test_cli_run_success(burst_wav, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", burst_wav, "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr()
    assert "segments: 3" in captured.out
    assert (out / "manifest.json").is_file()


def test_cli_missing_input_exits_2(tmp_path, capsys):
    code = main(["run", str(tmp_path / "nope.wav"), "--out", str(tmp_path / "o")])
    assert code == 2
    assert capsys.readouterr().err != ""


def test_cli_unreadable_input_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"not audio at all")
    code = main(["run", str(bad), "--out", str(tmp_path / "o")])
    assert code == 2
    assert capsys.readouterr().err != ""


def test_cli_invalid_parameter_exits_3(burst_wav, tmp_path, capsys):
    code = main(
        ["run", burst_wav, "--silence-fraction", "2.0", "--out", str(tmp_path / "o")]
    )
    assert code == 3
    assert capsys.readouterr().err != ""


def test_cli_silent_input_exits_4(tmp_path, capsys):
    silent = tmp_path / "silent.wav"
    write_wav(silent, TimeSeries(np.zeros(44100), RATE))
    code = main(["run", str(silent), "--out", str(tmp_path / "o")])
    assert code == 4
    assert capsys.readouterr().err != ""


def test_cli_infeasible_anchor_exits_5(mirrored_ramp_csv, tmp_path, capsys):
    code = main(
        [
            "run",
            mirrored_ramp_csv,
            "--rate",
            "8000",
            "--min-overlap",
            "0.95",
            "--out",
            str(tmp_path / "o"),
        ]
    )
    assert code == 5
    assert capsys.readouterr().err != ""


def test_cli_config_file_applies_and_flags_override(burst_wav, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"segmentation": {"min_duration_s": 0.2}}))
    # The file's minimum duration exceeds every segment, so nothing survives.
    code = main(
        ["run", burst_wav, "--config", str(config_path), "--out", str(tmp_path / "a")]
    )
    assert code == 4
    # The flag overrides the file and the run succeeds again.
    code = main(
        [
            "run",
            burst_wav,
            "--config",
            str(config_path),
            "--min-duration-ms",
            "10",
            "--out",
            str(tmp_path / "b"),
        ]
    )
    assert code == 0


def test_cli_unknown_config_key_exits_3(burst_wav, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"segmentation": {"cutof_hz": 25.0}}))
    code = main(
        ["run", burst_wav, "--config", str(config_path), "--out", str(tmp_path / "o")]
    )
    assert code == 3


def test_cli_malformed_config_exits_3(burst_wav, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text("{not json")
    code = main(
        ["run", burst_wav, "--config", str(config_path), "--out", str(tmp_path / "o")]
    )
    assert code == 3


def test_cli_extremum_strategy(burst_wav, tmp_path):
    out = tmp_path / "out"
    code = main(["run", burst_wav, "--strategy", "env-max", "--out", str(out)])
    assert code == 0
    with open(out / "manifest.json") as handle:
        data = json.load(handle)
    assert data["anchor"]["strategy"] == "env-max"
    assert data["anchor"]["threshold_a"] is None
    assert data["anchor"]["mse_curve"] is None


def test_cli_plots_are_wellformed(burst_wav, tmp_path):
    out = tmp_path / "out"
    code = main(["run", burst_wav, "--plots", "--out", str(out)])
    assert code == 0
    for name in ("segmentation.svg", "mse_curve.svg", "aligned.svg", "template.svg"):
        path = out / name
        assert path.is_file(), name
        ET.parse(path)


def test_cli_segment_subcommand(burst_wav, tmp_path):
    out = tmp_path / "out"
    code = main(["segment", burst_wav, "--out", str(out)])
    assert code == 0
    lines = read_lines(out / "segments.csv")
    assert lines[0] == "index,start_index,end_index,duration_s"
    assert len(lines) == 4


def test_cli_align_subcommand(burst_wav, tmp_path):
    out = tmp_path / "out"
    code = main(["align", burst_wav, "--out", str(out)])
    assert code == 0
    anchors = read_lines(out / "anchors.csv")
    assert anchors[0] == "index,anchor_time_s"
    assert len(anchors) == 4
    curve = read_lines(out / "mse_curve.csv")
    assert curve[0] == "threshold_a,mse"
    assert len(curve) == 21


def test_cli_average_subcommand(burst_wav, tmp_path):
    out = tmp_path / "out"
    code = main(["average", burst_wav, "--length", "256", "--out", str(out)])
    assert code == 0
    assert len(read_lines(out / "template.csv")) == 257
    aligned = np.loadtxt(out / "aligned.csv", delimiter=",")
    assert aligned.shape == (3, 256)


def test_cli_synth_subcommand(tmp_path):
    wav = tmp_path / "train.wav"
    code = main(["synth", str(wav), "--n-bursts", "4", "--seed", "11"])
    assert code == 0
    series = read_input(str(wav))
    assert series.sample_rate == 44100.0
    # gap + 4 * (burst + gap) with the default 80 ms bursts and 150 ms gaps
    assert series.duration_s == pytest.approx(1.07, abs=1e-6)
    truth = read_lines(tmp_path / "train.wav.truth.csv")
    assert truth[0] == "onset_s,duration_s,amplitude,carrier_hz,window"
    assert len(truth) == 5
    onsets = [float(line.split(",")[0]) for line in truth[1:]]
    assert onsets == sorted(onsets)


def test_cli_synth_then_run_roundtrip(tmp_path):
    wav = tmp_path / "train.wav"
    assert main(["synth", str(wav), "--n-bursts", "5"]) == 0
    out = tmp_path / "out"
    assert main(["run", str(wav), "--out", str(out)]) == 0
    with open(out / "manifest.json") as handle:
        data = json.load(handle)
    assert len(data["segments"]) == 5
