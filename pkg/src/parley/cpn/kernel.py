"""Reachability kernel selection.

The compiled extension is preferred when it imported cleanly; the pure
Python fallback is bit-identical, just slower. Set PARLEY_PURE_KERNEL=1
to force the fallback (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("PARLEY_PURE_KERNEL") == "1":
    from . import _kernel_py as _impl

    KERNEL_KIND = "python"
else:
    try:
        from . import _kernel_c as _impl  # type: ignore[attr-defined]

        KERNEL_KIND = "c"
    except ImportError:
        from . import _kernel_py as _impl

        KERNEL_KIND = "python"

explore = _impl.explore
backward_reachable = _impl.backward_reachable
