"""Benchmark the compiled kernel lane against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--difficulty N] [--tokens N]

Covers the three hot paths: secretbox seal/open on evidence-sized
payloads, the proof-of-work nonce search, and batched token-hash
expansion.  Outputs one table row per (kernel, lane).
"""

from __future__ import annotations

import argparse
import secrets
import time

from tapestry import _pure

try:
    from tapestry import _native
except ImportError:
    _native = None


def timeit(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_secretbox(lane, n: int = 2000, size: int = 256) -> float:
    key, nonce = secrets.token_bytes(32), secrets.token_bytes(24)
    payload = secrets.token_bytes(size)

    def run():
        for _ in range(n):
            boxed = lane.secretbox_seal(key, nonce, payload)
            lane.secretbox_open(key, nonce, boxed)

    seconds = timeit(run)
    return n / seconds  # seal+open pairs per second


def bench_pow(lane, difficulty: int) -> tuple[float, int]:
    prefix = b"benchmark-block-prefix"
    start = time.perf_counter()
    nonce = lane.pow_search(prefix, difficulty, 0, 1 << 34)
    seconds = time.perf_counter() - start
    return (nonce + 1) / seconds, nonce  # hashes per second, work done


def bench_tokens(lane, n: int) -> float:
    seed = secrets.token_bytes(32)
    tokens = [f"token{i}x".encode() for i in range(n)]

    def run():
        lane.token_material(seed, tokens, 256)

    seconds = timeit(run)
    return n / seconds  # tokens per second


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--difficulty", type=int, default=18,
                        help="proof-of-work difficulty bits (default 18)")
    parser.add_argument("--tokens", type=int, default=20000,
                        help="token batch size (default 20000)")
    args = parser.parse_args()

    lanes = [_pure] if _native is None else [_native, _pure]
    if _native is None:
        print("note: native lane not built; showing the pure lane only\n")

    rows = []
    for lane in lanes:
        box_rate = bench_secretbox(lane)
        pow_rate, nonce = bench_pow(lane, args.difficulty)
        token_rate = bench_tokens(lane, args.tokens)
        rows.append((lane.LANE, box_rate, pow_rate, token_rate))

    print(f"{'lane':<8} {'secretbox pairs/s':>18} "
          f"{'pow hashes/s (d=' + str(args.difficulty) + ')':>24} "
          f"{'token hashes/s':>16}")
    for lane_name, box_rate, pow_rate, token_rate in rows:
        print(f"{lane_name:<8} {box_rate:>18,.0f} {pow_rate:>24,.0f} "
              f"{token_rate:>16,.0f}")
    if len(rows) == 2:
        n, p = rows
        print(f"\nspeedup (native/pure): secretbox {n[1] / p[1]:.1f}x, "
              f"pow {n[2] / p[2]:.1f}x, tokens {n[3] / p[3]:.1f}x")


if __name__ == "__main__":
    main()
