"""Selects the traversal kernel at import time.

The compiled ``_ckernel`` extension is preferred. Setting ``CFRPLUS_BACKEND``
to ``python`` forces the numpy fallback; ``compiled`` makes a missing
extension an import error instead of a silent fallback.
"""

from __future__ import annotations

import logging
import os

from . import _pykernel

log = logging.getLogger(__name__)

_requested = os.environ.get("CFRPLUS_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "compiled"):
    raise ImportError(f"CFRPLUS_BACKEND must be auto, python or compiled, not {_requested!r}")

kernel = _pykernel
name = "python"
if _requested != "python":
    try:
        from . import _ckernel
    except ImportError:
        if _requested == "compiled":
            raise
        log.info("compiled kernel unavailable, using numpy fallback")
    else:
        kernel = _ckernel
        name = "compiled"

BACKENDS = {"python": _pykernel}
if name == "compiled":
    BACKENDS["compiled"] = kernel
