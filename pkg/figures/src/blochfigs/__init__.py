"""Figures for the Bloch-ball dynamics CLI outputs."""

from .io import FigureInputError, Table, load_json, load_table
from .regions import critical_field, cubic_band, inside_pitchfork, inside_saddle_node
from .render import KINDS, FigureJob, Style, render

__all__ = [
    "FigureInputError",
    "FigureJob",
    "KINDS",
    "Style",
    "Table",
    "critical_field",
    "cubic_band",
    "inside_pitchfork",
    "inside_saddle_node",
    "load_json",
    "load_table",
    "render",
]
