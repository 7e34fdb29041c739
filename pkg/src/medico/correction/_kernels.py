"""Levenshtein distance kernels over code-point arrays.

The O(len(a) * len(b)) dynamic program is the one numeric hot loop in the
package; every correction round and the whole evaluation harness sit on it.
Two implementations share the row-update recurrence:

* a numba @njit scalar kernel (default when numba imports), and
* a vectorized numpy fallback that resolves the in-row dependency with the
  running-minimum identity cur[j] = min_i<=j (cand[i] + (j - i)).

Set MEDICO_DISABLE_NUMBA=1 to force the numpy path (also the automatic
fallback when numba is unavailable). benchmarks/bench_editdist.py compares
the two.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE_FLAG = "MEDICO_DISABLE_NUMBA"


def numpy_levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Row-vectorized DP; a and b are 1-D code-point arrays."""
    n = b.size
    steps = np.arange(n + 1, dtype=np.int64)
    prev = steps.copy()
    cand = np.empty(n + 1, dtype=np.int64)
    for i in range(a.size):
        cand[0] = i + 1
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i]), out=cand[1:])
        # Substitution/deletion candidates are fixed; insertions propagate
        # left to right, folded in via a cumulative minimum of cand[j] - j.
        prev = np.minimum.accumulate(cand - steps) + steps
    return int(prev[n])


try:
    if os.environ.get(_DISABLE_FLAG, "") not in ("", "0"):
        raise ImportError(f"{_DISABLE_FLAG} set")
    from numba import njit

    @njit(cache=True)
    def numba_levenshtein(a: np.ndarray, b: np.ndarray) -> int:  # pragma: no cover
        n = b.size
        prev = np.arange(n + 1, dtype=np.int64)
        cur = np.empty(n + 1, dtype=np.int64)
        for i in range(a.size):
            cur[0] = i + 1
            ai = a[i]
            for j in range(1, n + 1):
                best = prev[j] + 1  # deletion
                ins = cur[j - 1] + 1
                if ins < best:
                    best = ins
                sub = prev[j - 1] + (0 if b[j - 1] == ai else 1)
                if sub < best:
                    best = sub
                cur[j] = best
            prev, cur = cur, prev
        return int(prev[n])

    HAS_NUMBA = True
except ImportError:
    numba_levenshtein = None  # type: ignore[assignment]
    HAS_NUMBA = False


def active_backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"


def encode_codepoints(s: str) -> np.ndarray:
    """Unicode scalar values of s as a uint32 array."""
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).copy()
