"""Kernel backend selection.

The compiled sweep is preferred when importable; the NumPy fallback is
used otherwise. COXMIC_BACKEND=python or =cython forces a choice (the
latter raises if the extension is unavailable).
"""

import os

from . import _sweep_py

__all__ = ["cox_sweep", "BACKEND", "available_backends"]

_requested = os.environ.get("COXMIC_BACKEND", "auto").lower()

try:
    from . import _sweep_cy
except ImportError:
    _sweep_cy = None

if _requested == "python":
    _impl, BACKEND = _sweep_py, "python"
elif _requested == "cython":
    if _sweep_cy is None:
        raise ImportError("COXMIC_BACKEND=cython but the compiled kernel is "
                          "not available; rebuild with `pip install -e .`")
    _impl, BACKEND = _sweep_cy, "cython"
elif _sweep_cy is not None:
    _impl, BACKEND = _sweep_cy, "cython"
else:
    _impl, BACKEND = _sweep_py, "python"

cox_sweep = _impl.cox_sweep


def available_backends():
    out = ["python"]
    if _sweep_cy is not None:
        out.append("cython")
    return out
