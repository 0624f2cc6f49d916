"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set SEAMFORGE_PURE=1 to force the numpy fallback (useful for benchmarking
and for verifying that both backends agree bit for bit).
"""

import os

from . import _fallback

if os.environ.get("SEAMFORGE_PURE"):
    _impl = _fallback
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

cumulative_backward = _impl.cumulative_backward
cumulative_forward = _impl.cumulative_forward
buffered_match = _impl.buffered_match


def backend_name() -> str:
    """Name of the active kernel backend: 'native' or 'numpy'."""
    return "native" if _impl is not _fallback else "numpy"
