"""Pure-Python implementations of the query kernels.

Same signatures as the compiled module; used when the extension is not
built or when LVL_PURE=1. Binary searches lean on the C-backed bisect
module, the linear scans are plain Python loops.
"""

from __future__ import annotations

from array import array
from bisect import bisect_left, bisect_right

BACKEND = "pure"


def predecessor(ts, t):
    """Index of the rightmost timestamp <= t, or -1."""
    return bisect_right(ts, t) - 1


def predecessor_in(ts, ids, t):
    """Position in `ids` of the rightmost id whose timestamp is <= t, or -1.

    `ids` must be ordered so that ts[ids[j]] is non-decreasing (any
    order-preserving subset of a sorted dataset qualifies).
    """
    lo, hi = 0, len(ids)
    while lo < hi:
        mid = (lo + hi) >> 1
        if ts[ids[mid]] <= t:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


def span(ts, lo_ms, hi_ms):
    """Contiguous index range [first, last] with lo_ms <= ts[i] < hi_ms.

    Returns (-1, -1) when the range is empty.
    """
    first = bisect_left(ts, lo_ms)
    last = bisect_left(ts, hi_ms) - 1
    if first > last:
        return (-1, -1)
    return (first, last)


def mask_from_codes(codes, table, missing):
    """Row mask from a per-code lookup table.

    codes[i] < 0 means the column is absent from that row's schema and
    yields `missing` (1 keeps the row, 0 drops it).
    """
    # Shift the table by one so code -1 hits index 0.
    shifted = bytes([1 if missing else 0]) + bytes(table)
    return bytearray(shifted[c + 1] for c in codes)


def and_mask(acc, mask):
    """acc[i] &= mask[i], in place."""
    for i, m in enumerate(mask):
        if not m:
            acc[i] = 0


def selected_ids(mask):
    """Indices of nonzero mask entries, as an int64 array."""
    return array("q", (i for i, m in enumerate(mask) if m))


def seen_codes(codes, gate, n_values):
    """Flag which codes occur on rows where gate is nonzero."""
    seen = bytearray(n_values)
    for i, c in enumerate(codes):
        if c >= 0 and gate[i]:
            seen[c] = 1
    return seen
