"""Backend selection for the inner kernels.

The compiled extension is used when it was built for this interpreter;
otherwise the numpy fallback takes over transparently. Setting
``DRIFTBAND_BACKEND`` to ``numpy`` or ``compiled`` forces a backend
(``compiled`` raises ImportError when the extension is missing).
"""

from __future__ import annotations

import os

from . import numpy_backend

_choice = os.environ.get("DRIFTBAND_BACKEND", "auto").lower()
if _choice not in {"auto", "compiled", "numpy"}:
    raise RuntimeError(
        f"DRIFTBAND_BACKEND must be 'auto', 'compiled' or 'numpy', got {_choice!r}"
    )

if _choice == "numpy":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _ext as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = numpy_backend
        BACKEND = "numpy"

group_means = _impl.group_means
within_moments = _impl.within_moments
sliding_means = _impl.sliding_means

__all__ = ["BACKEND", "group_means", "numpy_backend", "sliding_means", "within_moments"]
