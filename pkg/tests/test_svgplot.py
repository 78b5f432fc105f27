import xml.etree.ElementTree as ET

import pytest

from chilsim.errors import MetricsError, UsageError
from chilsim.svgplot import render_plot


def test_cc50_plot_structure(cc50_result, tmp_path):
    trace, _ = cc50_result
    path = tmp_path / "plot.svg"
    render_plot(trace, ["vs", "is"], path)
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    polylines = [el for el in root.iter() if el.tag.endswith("polyline")]
    assert len(polylines) == 2


def test_empty_signal_list_rejected(cc50_result, tmp_path):
    trace, _ = cc50_result
    with pytest.raises(UsageError, match="valid names"):
        render_plot(trace, [], tmp_path / "x.svg")


def test_unknown_signal_rejected(cc50_result, tmp_path):
    trace, _ = cc50_result
    with pytest.raises(UsageError, match="valid names"):
        render_plot(trace, ["vs", "bogus"], tmp_path / "x.svg")


def test_empty_trace_rejected(tmp_path):
    with pytest.raises(MetricsError, match="no samples"):
        render_plot([], ["vs"], tmp_path / "x.svg")


def test_deterministic_bytes(cc50_result, tmp_path):
    trace, _ = cc50_result
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    render_plot(trace, ["vs", "is", "duty"], a)
    render_plot(trace, ["vs", "is", "duty"], b)
    assert a.read_bytes() == b.read_bytes()
