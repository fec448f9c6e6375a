"""
Tests for the plotly trace charts.
"""

import pytest

from src.catalog import get_function
from src.charts import trace_figure, write_trace_html
from src.ray import trace


@pytest.fixture(scope="module")
def radial_trace():
    return trace(get_function("radial-a2"), [-6.0, -5.0, -4.0, -3.0, -2.0], n_theta=8, n_phi=8)


def test_trace_figure_has_four_lines(radial_trace):
    fig = trace_figure(radial_trace)
    assert len(fig.data) == 4
    names = [line.name for line in fig.data]
    assert names[:3] == ["I(t) / π", "J(t) / π", "K(t) / π"]
    assert list(fig.data[2].y) == pytest.approx([4.0] * 5, rel=1e-12)
    assert list(fig.data[3].y) == pytest.approx([2.0] * 5, rel=1e-12)
    assert "radial-a2" in fig.layout.title.text


def test_write_trace_html(radial_trace, tmp_path):
    path = write_trace_html(radial_trace, tmp_path / "charts" / "radial.html")
    assert path.exists()
    text = path.read_text(encoding="utf-8")
    assert "<html>" in text
    assert path.stat().st_size > 0
