"""Standalone figure rendering for qilidar CSV outputs.

Reads the CSV files emitted by the `qilidar` command-line tool and renders
their figure analogues.  Strictly read-only over the CSVs: all statistics
come from the producing tool, this package only draws them.
"""

from .figures import FigureSpec, render
from .reader import SchemaError, read_table

__version__ = "0.1.0"
