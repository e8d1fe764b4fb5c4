"""Selects the batch-kernel backend at import time.

The compiled extension (``serialt._batch_c``) is preferred when present;
otherwise the vectorized numpy fallback is used.  Set ``SERIALT_BACKEND``
to ``python`` or ``c`` to force one explicitly (the benchmark and the
cross-backend tests do this).
"""

from __future__ import annotations

import os

_requested = os.environ.get("SERIALT_BACKEND", "").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _batch_c as impl

        BACKEND = "c"
    except ImportError:
        from . import _batch_py as impl

        BACKEND = "python"
elif _requested == "python":
    from . import _batch_py as impl

    BACKEND = "python"
elif _requested == "c":
    from . import _batch_c as impl  # noqa: F811  (explicit request; let ImportError surface)

    BACKEND = "c"
else:
    raise ImportError(
        f"SERIALT_BACKEND={_requested!r} not recognized; use 'python', 'c' or 'auto'"
    )
