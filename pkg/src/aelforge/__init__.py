"""aelforge: a desk-scale workbench for expander-redistributed linear codes
and local code properties, with exhaustive verification of every object it
constructs."""

from ._core import BACKEND as kernel_backend

__version__ = "0.1.0"
__all__ = ["kernel_backend", "__version__"]
