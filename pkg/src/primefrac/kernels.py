"""Backend selection for the hot loops.

The compiled extension ``primefrac._kernels`` is used when importable;
otherwise (or with ``PRIMEFRAC_PURE=1``) the numpy implementations in
``primefrac._kernels_py`` take over. ``BACKEND`` names the active one.
"""

import os

from . import _kernels_py as pure

if os.environ.get("PRIMEFRAC_PURE"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "python"

factor_segment = _impl.factor_segment
cos_series = _impl.cos_series
phase_series = _impl.phase_series
dd_cos_series = _impl.dd_cos_series

__all__ = ["BACKEND", "factor_segment", "cos_series", "phase_series", "dd_cos_series", "pure"]
