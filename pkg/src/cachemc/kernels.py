"""Backend selection for the reachability kernel.

The compiled extension is used when it was built and the tracked set has
fewer than 64 distinct blocks; ``CACHEMC_PURE=1`` forces the Python kernel.
"""

import os
from array import array

from . import _pykernels
from ._pykernels import CeilingExceeded

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

MAX_COMPILED_BLOCKS = 64

if os.environ.get("CACHEMC_PURE") == "1":
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "python"

__all__ = ["BACKEND", "CeilingExceeded", "available_backends", "tracked_reach"]


def available_backends():
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def tracked_reach(succ_off, succ, seq_off, seq, entry, a, k, ceiling, n_blocks, backend=None):
    if backend is None:
        backend = "compiled" if _ckernels is not None and n_blocks <= MAX_COMPILED_BLOCKS else "python"
    if backend == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernel is not available")
        if n_blocks > MAX_COMPILED_BLOCKS:
            raise ValueError(f"compiled kernel handles at most {MAX_COMPILED_BLOCKS} blocks")
        arrays = [array("q", x) for x in (succ_off, succ or [0], seq_off, seq or [0])]
        return _ckernels.tracked_reach(*arrays, entry, a, k, ceiling)
    return _pykernels.tracked_reach(succ_off, succ, seq_off, seq, entry, a, k, ceiling)
