"""Backend selection for the hot kernels.

The compiled Cython extension is preferred when importable; the pure numpy
backend is the fallback. Set STREAMSUBMOD_FORCE_PURE=1 to force the fallback
(used by the benchmark and the equivalence tests).
"""

import os

from . import _pure

if os.environ.get("STREAMSUBMOD_FORCE_PURE"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _pure

HAVE_COMPILED = _impl.BACKEND == "compiled"

eval_many = _impl.eval_many
brute_force = _impl.brute_force
multilinear_exact = _impl.multilinear_exact


def backend_name() -> str:
    return _impl.BACKEND
