"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The Cython extension is picked automatically when built; set
VCKIT_PURE_PYTHON=1 to force the numpy fallback (used by the parity tests
and the benchmark).
"""

import os

if os.environ.get("VCKIT_PURE_PYTHON") == "1":
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from .. import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

overlap_add = _impl.overlap_add
resample_taps = _impl.resample_taps

__all__ = ["BACKEND", "overlap_add", "resample_taps"]
