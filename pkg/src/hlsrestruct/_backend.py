"""Kernel backend selection.

The compiled ``_core`` extension is preferred when it imports; otherwise the
pure-Python ``_pycore`` module is used. Callers may force either by name.
"""
from . import _pycore

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

COMPILED_AVAILABLE = _core is not None
DEFAULT = "compiled" if COMPILED_AVAILABLE else "python"


def get(backend="auto"):
    """Return the kernel module for ``backend`` ('auto', 'compiled' or 'python')."""
    if backend == "auto":
        backend = DEFAULT
    if backend == "python":
        return _pycore
    if backend == "compiled":
        if _core is None:
            raise RuntimeError("compiled backend requested but hlsrestruct._core is not built")
        return _core
    raise ValueError(f"unknown backend {backend!r}")
