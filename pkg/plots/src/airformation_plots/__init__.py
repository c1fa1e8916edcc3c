"""Figure regeneration for airformation simulator outputs.

Consumes the trajectory CSV and metrics JSON emitted by a simulation run and
redraws the planar-trajectory figure and the abscissa-vs-time figure.
"""

from .render import (
    ConsistencyError,
    InputFormatError,
    PlotSpec,
    RenderResult,
    parse_metrics,
    parse_trajectory,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "InputFormatError",
    "PlotSpec",
    "RenderResult",
    "parse_metrics",
    "parse_trajectory",
    "render",
]
