"""Tests for the dependency-free SVG plotting helpers."""

import xml.etree.ElementTree as ET

import numpy as np

from envalign.plots import decimate_minmax, svg_line_plot


def test_decimate_short_input_passes_through():
    values = np.array([0.1, 0.9, 0.4])
    xs, ys = decimate_minmax(values, max_bins=1500)
    np.testing.assert_array_equal(xs, [0, 1, 2])
    np.testing.assert_array_equal(ys, values)


def test_decimate_preserves_global_extremes():
    rng = np.random.Generator(np.random.PCG64(2))
    values = rng.normal(size=100_000)
    values[12345] = 50.0
    values[67890] = -50.0
    xs, ys = decimate_minmax(values, max_bins=200)
    assert ys.max() == 50.0
    assert ys.min() == -50.0
    assert xs.size == ys.size
    assert xs.size <= 2 * 200
    assert np.all(np.diff(xs) > 0)


def test_decimate_output_is_subset_of_input():
    rng = np.random.Generator(np.random.PCG64(4))
    values = rng.uniform(size=5000)
    xs, ys = decimate_minmax(values, max_bins=50)
    np.testing.assert_array_equal(values[xs.astype(int)], ys)


def test_svg_plot_is_wellformed_xml():
    xs = np.linspace(0.0, 1.0, 50)
    svg = svg_line_plot(
        [(xs, np.sin(xs), "wave"), (xs, xs**2, "ramp")],
        title="demo",
        x_label="t",
        y_label="v",
        v_marks=[0.25, 0.5],
        band=(xs, np.sin(xs) - 0.1, np.sin(xs) + 0.1),
    )
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    body = ET.tostring(root, encoding="unicode")
    assert "polyline" in body
    assert "wave" in body and "ramp" in body
    assert "demo" in body
    assert "polygon" in body  # the band


def test_svg_plot_handles_nan_gaps():
    xs = np.arange(10.0)
    ys = xs.copy()
    ys[4:6] = np.nan
    svg = svg_line_plot([(xs, ys, "gappy")])
    root = ET.fromstring(svg)
    polylines = [el for el in root.iter() if el.tag.endswith("polyline")]
    assert len(polylines) >= 2  # the gap splits the curve


def test_svg_plot_constant_curve_does_not_degenerate():
    xs = np.arange(5.0)
    svg = svg_line_plot([(xs, np.full(5, 0.5), "flat")])
    ET.fromstring(svg)
