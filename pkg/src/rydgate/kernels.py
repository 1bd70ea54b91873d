"""Backend selection for the hot kernels.

The compiled extension is preferred; the numpy implementation is used when
it is missing or when ``RYDGATE_PURE=1`` is set in the environment.
"""

import os

from . import _kernels_py

if os.environ.get("RYDGATE_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

sequence_u11 = _impl.sequence_u11
rk4_evolve = _impl.rk4_evolve

__all__ = ["BACKEND", "sequence_u11", "rk4_evolve"]
