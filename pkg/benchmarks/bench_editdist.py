"""Benchmark the two Levenshtein kernels: numba @njit vs the numpy fallback.

Usage: python3 benchmarks/bench_editdist.py [--pairs N] [--max-len L]

The numpy path is what MEDICO_DISABLE_NUMBA=1 selects at import time; here
both kernels are timed side by side on identical inputs. The numba kernel is
warmed before timing so JIT compilation is not counted.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from medico.correction._kernels import HAS_NUMBA
from medico.correction.editdist import levenshtein

ALPHABET = "abcdefghijklmnopqrstuvwxyz ÄÖÜß絵文字🙂"


def make_pairs(n: int, max_len: int, seed: int = 1) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    return [
        (
            "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(max_len // 2, max_len + 1))),
            "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(max_len // 2, max_len + 1))),
        )
        for _ in range(n)
    ]


def bench(backend: str, pairs: list[tuple[str, str]], repeats: int = 5) -> tuple[float, int]:
    checksum = 0
    timings = []
    for _ in range(repeats):
        started = time.perf_counter()
        checksum = sum(levenshtein(a, b, backend=backend) for a, b in pairs)
        timings.append(time.perf_counter() - started)
    return statistics.median(timings), checksum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--max-len", type=int, default=400)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.max_len)
    print(f"{args.pairs} pairs, lengths up to {args.max_len}")

    numpy_t, numpy_sum = bench("numpy", pairs)
    print(f"numpy fallback : {numpy_t:.4f}s  (checksum {numpy_sum})")

    if not HAS_NUMBA:
        print("numba kernel   : unavailable (numba not importable or disabled)")
        return
    levenshtein("warm", "up", backend="numba")  # compile outside the timing
    numba_t, numba_sum = bench("numba", pairs)
    print(f"numba @njit    : {numba_t:.4f}s  (checksum {numba_sum})")
    if numba_sum != numpy_sum:
        raise SystemExit("kernel mismatch: checksums differ")
    print(f"speedup        : {numpy_t / numba_t:.1f}x")


if __name__ == "__main__":
    main()
