"""Select the compiled kernels when available, the pure-Python ones otherwise.

Set ``EOMQ_PURE_PYTHON=1`` before import to force the fallback.
"""

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

_ckernels = None
if os.environ.get("EOMQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using pure Python")
        _ckernels = None

BACKENDS = {"python": _kernels_py}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

kernels = _ckernels if _ckernels is not None else _kernels_py
BACKEND = "cython" if _ckernels is not None else "python"


def use(name):
    """Switch the active kernel set (``"cython"`` or ``"python"``)."""
    global kernels, BACKEND
    try:
        kernels = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None
    BACKEND = name
