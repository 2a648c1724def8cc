"""Backend selection for the hot loops.

The compiled extension is used when it has been built; otherwise, or when
``KOROVKIN_PURE_PYTHON=1`` is set, the numpy implementations are used.
"""

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("KOROVKIN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

sliding_extrema = _impl.sliding_extrema
interval_power_sup = _impl.interval_power_sup
muckenhoupt_sup = _impl.muckenhoupt_sup

__all__ = ["BACKEND", "sliding_extrema", "interval_power_sup", "muckenhoupt_sup"]
