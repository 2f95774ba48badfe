"""Restructured-HLS kernels: simulators, cycle models, code generation, dataflow and DSE."""
from ._backend import COMPILED_AVAILABLE

__version__ = "0.1.0"

__all__ = ["COMPILED_AVAILABLE", "__version__"]
