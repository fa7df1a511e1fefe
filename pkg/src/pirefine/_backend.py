"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``PIREFINE_PURE=1`` to force the pure-Python kernels.
"""

import os

from . import _pykernels

if os.environ.get("PIREFINE_PURE", "") not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"
