"""Jet-evaluation kernels: compiled extension when available, numpy fallback.

Set MSURF_PURE_PYTHON=1 to force the fallback.  ``BACKEND`` names the active
implementation; both expose ``eval_tape`` and ``eval_tape_batch`` with
identical semantics.
"""

import os

from . import pyjet

if os.environ.get("MSURF_PURE_PYTHON"):
    _impl = pyjet
else:
    try:
        from . import _jetcore as _impl
    except ImportError:
        _impl = pyjet

BACKEND = _impl.BACKEND_NAME
eval_tape = _impl.eval_tape
eval_tape_batch = _impl.eval_tape_batch


def backends():
    """All importable backends, for benchmarks and cross-checks."""
    out = {"python": pyjet}
    try:
        from . import _jetcore
        out["compiled"] = _jetcore
    except ImportError:
        pass
    return out
