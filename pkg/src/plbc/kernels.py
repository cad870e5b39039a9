"""Backend selection for the hot loops.

The compiled ``_kernels`` extension is used when it imports; otherwise (or
when ``PLBC_PURE_PYTHON`` is set to a non-empty value) the pure-Python
``_pykernels`` module stands in.  Both expose the same functions and give
identical results.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("PLBC_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

weight_histogram = _impl.weight_histogram
subset_deficiency_counts = _impl.subset_deficiency_counts
masking_trials = _impl.masking_trials

SCHEME_NONE = _pykernels.SCHEME_NONE
SCHEME_ONE_STEP = _pykernels.SCHEME_ONE_STEP
SCHEME_TWO_STEP = _pykernels.SCHEME_TWO_STEP
COL_U = _pykernels.COL_U
COL_UNMASKED = _pykernels.COL_UNMASKED
COL_DEFICIENCY = _pykernels.COL_DEFICIENCY
COL_DEFECT_ERRORS = _pykernels.COL_DEFECT_ERRORS
COL_NOISE = _pykernels.COL_NOISE
COL_STEP = _pykernels.COL_STEP
STEP_NAMES = {
    _pykernels.STEP_TRIVIAL: "trivial",
    _pykernels.STEP_ONE: "step1",
    _pykernels.STEP_TWO: "step2",
    _pykernels.STEP_ONE_STEP: "one-step",
}


def pack(values, nbits: int):
    """Pack Python-int bit vectors into a ``(len(values), words)`` uint64 array."""
    import numpy as np

    nw = max(1, (nbits + 63) // 64)
    out = np.zeros((len(values), nw), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(values):
        for j in range(nw):
            out[i, j] = (v >> (64 * j)) & mask
    return out
