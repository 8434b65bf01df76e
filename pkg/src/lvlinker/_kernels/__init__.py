"""Query kernels: compiled extension when available, pure Python otherwise.

Set LVL_PURE=1 to force the pure backend (used by the benchmark and by
tests that compare both implementations).
"""

import os

if os.environ.get("LVL_PURE") == "1":
    from . import _py as _impl
else:
    try:
        from . import _ext as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _py as _impl

BACKEND = _impl.BACKEND
predecessor = _impl.predecessor
predecessor_in = _impl.predecessor_in
span = _impl.span
mask_from_codes = _impl.mask_from_codes
and_mask = _impl.and_mask
selected_ids = _impl.selected_ids
seen_codes = _impl.seen_codes


def backend() -> str:
    """Name of the active kernel backend ("compiled" or "pure")."""
    return BACKEND
