"""Select the Reed-Solomon kernel backend at import.

The compiled ``_rs_core`` extension is used when it was built; otherwise the
pure-Python ``_rs_py`` module. Setting ``SEMLINK_PURE_PYTHON=1`` forces the
fallback.
"""
import os

from . import _rs_py

if os.environ.get("SEMLINK_PURE_PYTHON"):
    kernels = _rs_py
else:
    try:
        from . import _rs_core as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _rs_py

BACKEND = "cython" if kernels is not _rs_py else "python"

__all__ = ["kernels", "BACKEND", "_rs_py"]
