"""Backend selection for the sweep kernels.

The compiled module is used when it imports and ``GIANTWQED_PURE_PYTHON`` is
unset (or ``0``). Sweeps are split into contiguous chunks of the detuning grid
and evaluated on up to ``GIANTWQED_MAX_WORKERS`` threads; the compiled kernels
release the GIL. Chunk results are concatenated in grid order, so output does
not depend on the worker count.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from giantwqed import _pykernels

__all__ = ["backend", "BACKEND", "available_backends", "max_workers", "run_chunked"]


def _load_compiled():
    if os.environ.get("GIANTWQED_PURE_PYTHON", "0") not in ("", "0"):
        return None
    try:
        from giantwqed import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()
backend = _compiled if _compiled is not None else _pykernels
BACKEND = backend.NAME

#: Below this many grid points a sweep always runs on the calling thread.
MIN_CHUNK = 2048


def available_backends():
    """Mapping of backend name to module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from giantwqed import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


def max_workers() -> int:
    raw = os.environ.get("GIANTWQED_MAX_WORKERS")
    if raw:
        return max(1, int(raw))
    return max(1, min(8, os.cpu_count() or 1))


def run_chunked(kernel, args, deltas):
    """Evaluate ``kernel(*args, chunk)`` over ``deltas``, possibly in parallel."""
    deltas = np.ascontiguousarray(deltas, dtype=float)
    workers = max_workers()
    if workers == 1 or deltas.size < MIN_CHUNK:
        return kernel(*args, deltas)
    chunks = np.array_split(deltas, min(workers, deltas.size // (MIN_CHUNK // 2)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: kernel(*args, c), chunks))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
