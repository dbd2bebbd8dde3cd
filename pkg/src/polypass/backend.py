"""Kernel backend selection.

The compiled extension is preferred when importable; ``POLYPASS_PURE_PYTHON=1``
forces the numpy fallback.  Everything above this layer is backend-agnostic.
"""

import os

from . import _purepy

if os.environ.get("POLYPASS_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _purepy
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _purepy

BACKEND = _impl.BACKEND_NAME

nl_f = _impl.nl_f
nl_fprime = _impl.nl_fprime
nl_F = _impl.nl_F
sum_F = _impl.sum_F
weighted_dot = _impl.weighted_dot


def available_backends():
    """Importable kernel implementations, keyed by backend name."""
    impls = {_purepy.BACKEND_NAME: _purepy}
    try:
        from . import _kernels
        impls[_kernels.BACKEND_NAME] = _kernels
    except ImportError:
        pass
    return impls
