#!/usr/bin/env python3
"""Compare the compiled query kernels against the pure-Python fallback.

Micro-benchmarks each kernel on synthetic columnar data, then times two
end-to-end paths (filter application and seek-position highlighting)
with each backend swapped in. Binary searches are near parity (bisect
is already C); the linear scans are where the extension earns its keep.

Usage: python benchmarks/bench_kernels.py [--rows N] [--repeats K]
"""

import argparse
import random
import time
from array import array

from lvlinker import _kernels
from lvlinker._kernels import _py

try:
    from lvlinker._kernels import _ext
except ImportError:
    _ext = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def fmt_row(name, pure_s, ext_s, unit_n):
    speedup = pure_s / ext_s if ext_s else float("nan")
    print(
        f"{name:<22} pure {pure_s * 1e9 / unit_n:10.1f} ns/row"
        f"   compiled {ext_s * 1e9 / unit_n:10.1f} ns/row   speedup {speedup:5.1f}x"
    )


def micro(rows, repeats):
    rng = random.Random(1)
    ts = array("q", range(0, rows * 37, 37))
    codes = array("i", (rng.randrange(-1, 40) for _ in range(rows)))
    table = bytes(rng.randint(0, 1) for _ in range(40))
    queries = [rng.randrange(rows * 37) for _ in range(100_000)]
    ids = array("q", sorted(rng.sample(range(rows), min(rows, 100_000))))

    print(f"\nmicro-kernels over {rows:,} rows (best of {repeats})")

    pure = best_of(lambda: [_py.predecessor(ts, q) for q in queries], repeats)
    ext = best_of(lambda: [_ext.predecessor(ts, q) for q in queries], repeats)
    fmt_row("predecessor", pure, ext, len(queries))

    pure = best_of(lambda: [_py.predecessor_in(ts, ids, q) for q in queries[:20_000]], repeats)
    ext = best_of(lambda: [_ext.predecessor_in(ts, ids, q) for q in queries[:20_000]], repeats)
    fmt_row("predecessor_in", pure, ext, 20_000)

    pure = best_of(lambda: _py.mask_from_codes(codes, table, 1), repeats)
    ext = best_of(lambda: _ext.mask_from_codes(codes, table, 1), repeats)
    fmt_row("mask_from_codes", pure, ext, rows)

    mask_a = _py.mask_from_codes(codes, table, 1)
    mask_b = _py.mask_from_codes(codes, table, 0)
    pure = best_of(lambda: _py.and_mask(bytearray(mask_a), mask_b), repeats)
    ext = best_of(lambda: _ext.and_mask(bytearray(mask_a), mask_b), repeats)
    fmt_row("and_mask", pure, ext, rows)

    pure = best_of(lambda: _py.selected_ids(mask_a), repeats)
    ext = best_of(lambda: _ext.selected_ids(mask_a), repeats)
    fmt_row("selected_ids", pure, ext, rows)

    pure = best_of(lambda: _py.seen_codes(codes, mask_a, 40), repeats)
    ext = best_of(lambda: _ext.seen_codes(codes, mask_a, 40), repeats)
    fmt_row("seen_codes", pure, ext, rows)


KERNEL_NAMES = (
    "predecessor",
    "predecessor_in",
    "span",
    "mask_from_codes",
    "and_mask",
    "selected_ids",
    "seen_codes",
)


def swap_backend(impl):
    for name in KERNEL_NAMES:
        setattr(_kernels, name, getattr(impl, name))


def end_to_end(rows, repeats):
    from lvlinker.filtering import FilterSpec, Predicate, apply_filter
    from lvlinker.model import KEY_LOG, KeyLogPayload, LogDataset, LogRecord, VideoMeta
    from lvlinker.sync import record_at_video_time

    rng = random.Random(2)
    packages = [f"com.app.p{i}" for i in range(25)]
    records = []
    t = 1_650_000_000_000
    for i in range(rows):
        t += rng.randint(0, 5)
        records.append(
            LogRecord(i, t, KEY_LOG, KeyLogPayload("k", 0, "App", rng.choice(packages)))
        )
    dataset = LogDataset(records, "bench")
    spec = FilterSpec(
        frozenset([KEY_LOG]),
        value_predicates=(Predicate("packageName", "oneOf", tuple(packages[:5])),),
    )
    video = VideoMeta("v", "placeholder://v", "bench", records[0].timestamp_ms, 360_000)
    queries = [rng.randrange(video.duration_ms) for _ in range(50_000)]

    print(f"\nend-to-end over {rows:,} records (best of {repeats})")
    results = {}
    for label, impl in (("pure", _py), ("compiled", _ext)):
        swap_backend(impl)
        results[label, "filter"] = best_of(lambda: apply_filter(dataset, spec), repeats)
        results[label, "seek"] = best_of(
            lambda: [record_at_video_time(dataset, video, q) for q in queries], repeats
        )
    swap_backend(_ext or _py)
    fmt_row("apply_filter", results["pure", "filter"], results["compiled", "filter"], rows)
    fmt_row(
        "record_at_video_time",
        results["pure", "seek"],
        results["compiled", "seek"],
        len(queries),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2_000_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"active backend: {_kernels.BACKEND}")
    if _ext is None:
        print("compiled extension not built; run pip install -e . first")
        return
    micro(args.rows, args.repeats)
    end_to_end(min(args.rows, 1_000_000), args.repeats)


if __name__ == "__main__":
    main()
