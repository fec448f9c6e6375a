"""
Trace Charts for pshlab
Plotly figures of the fiber functionals along a ray, written as standalone HTML.
"""

import math
from pathlib import Path
from typing import Union

import plotly.graph_objects as go
from plotly.subplots import make_subplots

from src.constants import CHART_COLOR_I, CHART_COLOR_J, CHART_COLOR_K, CHART_COLOR_NU
from src.logger import setup_logger
from src.ray import RayTrace

logger = setup_logger(__name__)


def trace_figure(tr: RayTrace) -> go.Figure:
    """
    I, J and K on the left axis (in units of pi) and nu(0, r) on the right axis, against t.

    Args:
        tr: RayTrace with at least one record

    Returns:
        plotly Figure with four line traces
    """
    t = tr.t
    fig = make_subplots(specs=[[{"secondary_y": True}]])

    for name, color in (("I", CHART_COLOR_I), ("J", CHART_COLOR_J), ("K", CHART_COLOR_K)):
        fig.add_trace(
            go.Scatter(
                x=t,
                y=tr.column(name) / math.pi,
                mode="lines+markers",
                name=f"{name}(t) / π",
                line=dict(color=color, width=2),
                marker=dict(size=4),
            ),
            secondary_y=False,
        )

    fig.add_trace(
        go.Scatter(
            x=t,
            y=tr.column("nu_r"),
            mode="lines",
            name="ν(0, e^t)",
            line=dict(color=CHART_COLOR_NU, width=2, dash="dash"),
        ),
        secondary_y=True,
    )

    fig.update_layout(
        title=f"{tr.f_name}: fiber functionals along the ray",
        hovermode="x unified",
        template="plotly_white",
        legend=dict(orientation="h", yanchor="bottom", y=1.02, xanchor="right", x=1),
    )
    fig.update_xaxes(title_text="t = log r")
    fig.update_yaxes(title_text="functional / π", secondary_y=False)
    fig.update_yaxes(title_text="ν(0, r)", secondary_y=True)
    return fig


def write_trace_html(tr: RayTrace, path: Union[str, Path]) -> Path:
    """Write trace_figure(tr) as a self-contained HTML file and return its path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_figure(tr).write_html(str(path), include_plotlyjs=True, full_html=True)
    logger.info(f"Wrote chart {path}")
    return path
