"""Character-level edit distance and the preservation score.

Preservation gates correction acceptance: a revision keeping most of the
original's characters scores near 1, a rewrite scores near 0. Both distance
and length count Unicode scalar values, so the two sides of the ratio agree.
"""

from __future__ import annotations

from ..errors import EmptyOriginal
from . import _kernels
from ._kernels import encode_codepoints


def levenshtein(a: str, b: str, backend: str | None = None) -> int:
    """Minimum single-character insertions, deletions and substitutions
    transforming a into b.

    backend selects a kernel explicitly ("numba" or "numpy"); by default the
    numba kernel runs when available, else the numpy fallback.
    """
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    xs, ys = encode_codepoints(a), encode_codepoints(b)
    if backend is None:
        backend = _kernels.active_backend()
    if backend == "numba":
        if not _kernels.HAS_NUMBA:
            raise ValueError("numba backend requested but unavailable")
        return int(_kernels.numba_levenshtein(xs, ys))
    if backend == "numpy":
        return _kernels.numpy_levenshtein(xs, ys)
    raise ValueError(f"unknown levenshtein backend {backend!r}")


def preservation(o: str, o_prime: str) -> float:
    """max(1 - Lev(o, o') / len(o), 0): 1.0 means identical, 0.0 disjoint."""
    if len(o) == 0:
        raise EmptyOriginal("preservation is undefined for an empty original")
    return max(1.0 - levenshtein(o, o_prime) / len(o), 0.0)
