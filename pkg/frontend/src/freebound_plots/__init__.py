"""Figure renderer for freebound CSV outputs.

Pure presentation layer: it parses the versioned CSV files the solver
emits (boundary tables and wealth paths) and renders them to image files.
It accepts no model parameters and recomputes no mathematics.
"""

from .render import PlotJob, load_csv, plot_boundary, plot_paths

__all__ = ["PlotJob", "load_csv", "plot_boundary", "plot_paths"]

__version__ = "0.1.0"
