"""Pick the compiled kernels when importable, else the pure-Python ones.

Set ``SPACINGBOUND_PURE=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("SPACINGBOUND_PURE", "") not in ("", "0"):
    kernels = _fallback
    NAME = "python"
else:
    try:
        from . import _kernels as kernels
        NAME = "compiled"
    except ImportError:
        kernels = _fallback
        NAME = "python"

__all__ = ["kernels", "NAME"]
