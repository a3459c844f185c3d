"""Selects the tree-kernel backend.

Default is the numba kernels; set ATTRITION_NO_NUMBA=1 (or run without
numba installed) to get the pure-numpy fallback. Both produce identical
trees, so the switch only changes speed.
"""

from __future__ import annotations

import logging
import os

from . import kernels_numpy

log = logging.getLogger(__name__)

DISABLE_ENV = "ATTRITION_NO_NUMBA"

_backend = None


def _disabled_by_env() -> bool:
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    return flag not in ("", "0", "false", "no")


def get_backend():
    """The kernel module in use. Resolved once, on first call."""
    global _backend
    if _backend is None:
        if _disabled_by_env():
            _backend = kernels_numpy
        else:
            try:
                from . import kernels_numba
                _backend = kernels_numba
            except ImportError:
                log.warning("numba unavailable, using numpy kernels")
                _backend = kernels_numpy
    return _backend


def backend_name() -> str:
    return get_backend().BACKEND_NAME


def reset_backend() -> None:
    """Forget the resolved backend so the env flag is re-read. Test hook."""
    global _backend
    _backend = None
