"""Pure-Python (numpy) kernel backend.

Must stay numerically interchangeable with the compiled backend in
``_core.pyx``: trigram bucket counts are integer-exact and therefore
bitwise identical; dot products may differ by float rounding only.
"""

from __future__ import annotations

import numpy as np

FNV_OFFSET = np.uint64(0xCBF29CE484222325)
FNV_PRIME = np.uint64(0x100000001B3)


def trigram_counts(codepoints: np.ndarray, dim: int) -> np.ndarray:
    """Hash windows of 3 code points into ``dim`` buckets (FNV-1a 64).

    ``codepoints`` is a uint32 array (UTF-32 code units). Texts shorter
    than 3 code points hash as a single window.
    """
    n = codepoints.shape[0]
    if n == 0:
        return np.zeros(dim, dtype=np.int64)
    if n >= 3:
        windows = np.lib.stride_tricks.sliding_window_view(codepoints, 3)
    else:
        windows = codepoints.reshape(1, n)
    h = np.full(windows.shape[0], FNV_OFFSET, dtype=np.uint64)
    mask = np.uint64(0xFF)
    for col in range(windows.shape[1]):
        v = windows[:, col].astype(np.uint64)
        for shift in (0, 8, 16, 24):
            h = (h ^ ((v >> np.uint64(shift)) & mask)) * FNV_PRIME
    buckets = (h % np.uint64(dim)).astype(np.int64)
    return np.bincount(buckets, minlength=dim).astype(np.int64)


def dot_scores(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Row-wise dot products of ``matrix`` against ``query``."""
    return matrix @ query
