"""Backend selector for the cut kernels.

Prefers the compiled extension; falls back to the pure-Python module when
the extension is missing or when GUIDEDGREEDY_PURE is set in the
environment. Both backends implement the same functions with identical
semantics (see _kernels_py for the reference definitions).
"""

import os

if os.environ.get("GUIDEDGREEDY_PURE"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

cut_value = _impl.cut_value
cut_deltas = _impl.cut_deltas
cut_scan_first = _impl.cut_scan_first
