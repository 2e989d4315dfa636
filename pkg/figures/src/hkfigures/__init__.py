"""Static figure rendering for hkprop experiment CSV outputs."""

__version__ = "0.1.0"

from .csvio import EmptyInputError, NamedColumnError, read_table
from .render import render
from .spec import KINDS, FigureSpec, FigureSpecError

__all__ = ["EmptyInputError", "NamedColumnError", "read_table", "render",
           "KINDS", "FigureSpec", "FigureSpecError"]
