"""Hot-loop kernels with a compiled core and a numpy fallback.

The compiled extension (``activitykg.kernels._core``, built from Cython)
is preferred when importable; otherwise the numpy implementation in
``_fallback`` is used. Both produce identical trigram bucket counts, so
embeddings are bitwise reproducible regardless of backend.
"""

from __future__ import annotations

import numpy as np

from . import _fallback

try:
    from . import _core  # type: ignore[attr-defined]

    _BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    _core = None
    _BACKEND = "python"


def backend() -> str:
    """Name of the active backend: ``compiled`` or ``python``."""
    return _BACKEND


def _codepoints(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype="<u4")


def trigram_counts(text: str, dim: int) -> np.ndarray:
    """Feature-hash character 3-grams of ``text`` into ``dim`` buckets."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    cp = _codepoints(text)
    if _core is not None:
        out = np.zeros(dim, dtype=np.int64)
        _core.trigram_counts(np.ascontiguousarray(cp), out)
        return out
    return _fallback.trigram_counts(cp, dim)


def embed(text: str, dim: int) -> np.ndarray:
    """Unit-norm trigram-hash embedding of ``text``.

    Raises ValueError on text with no code points (callers are expected
    to reject empty input earlier with their own error types).
    """
    counts = trigram_counts(text, dim)
    total = float(np.dot(counts, counts))
    if total == 0.0:
        raise ValueError("cannot embed empty text")
    return counts.astype(np.float64) / np.sqrt(total)


def dot_scores(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot product of every row of ``matrix`` with ``query``.

    Rows and query are expected unit-norm, making this a cosine scan.
    Always served by the numpy (BLAS) path: benchmarks/bench_kernels.py
    shows it beating the compiled loop, so the extension only carries
    the hashing kernel in production. The compiled scan stays available
    for the benchmark comparison.
    """
    if matrix.ndim != 2 or query.ndim != 1 or matrix.shape[1] != query.shape[0]:
        raise ValueError("matrix/query dimensions do not agree")
    if matrix.shape[0] == 0:
        return np.zeros(0, dtype=np.float64)
    return _fallback.dot_scores(matrix, query)
