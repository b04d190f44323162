"""Benchmark: compiled kernel backend versus the numpy fallback.

Times the two hot loops (trigram-hash embedding and the cosine scan)
over realistic workloads and prints a comparison table. Run:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import random
import string
import time

import numpy as np

from activitykg.kernels import _fallback

try:
    from activitykg.kernels import _core
except ImportError:
    _core = None

DIM = 256


def _texts(n: int, rng: random.Random) -> list[str]:
    words = ["".join(rng.choices(string.ascii_lowercase, k=rng.randint(3, 10))) for _ in range(400)]
    return [" ".join(rng.choices(words, k=rng.randint(8, 40))) for _ in range(n)]


def embed_python(text: str) -> np.ndarray:
    cp = np.frombuffer(text.encode("utf-32-le"), dtype="<u4")
    counts = _fallback.trigram_counts(cp, DIM)
    return counts.astype(np.float64) / np.sqrt(float(np.dot(counts, counts)))


def embed_compiled(text: str) -> np.ndarray:
    cp = np.ascontiguousarray(np.frombuffer(text.encode("utf-32-le"), dtype="<u4"))
    counts = np.zeros(DIM, dtype=np.int64)
    _core.trigram_counts(cp, counts)
    return counts.astype(np.float64) / np.sqrt(float(np.dot(counts, counts)))


def bench(label: str, fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    rng = random.Random(7)
    texts = _texts(2000, rng)
    rows = np.stack([embed_python(t) for t in texts[:1000]])
    rows = np.ascontiguousarray(rows)
    query = embed_python(texts[0])

    print(f"workload: {len(texts)} embeddings (dim={DIM}), {rows.shape[0]}x{DIM} cosine scan x200")
    results = []

    t = bench("embed/python", lambda: [embed_python(x) for x in texts])
    results.append(("embed (trigram hash)", "python", t))
    if _core is not None:
        t = bench("embed/compiled", lambda: [embed_compiled(x) for x in texts])
        results.append(("embed (trigram hash)", "compiled", t))

    t = bench("scan/python", lambda: [_fallback.dot_scores(rows, query) for _ in range(200)])
    results.append(("cosine scan", "python", t))
    if _core is not None:
        out = np.empty(rows.shape[0], dtype=np.float64)
        t = bench("scan/compiled", lambda: [_core.dot_scores(rows, query, out) for _ in range(200)])
        results.append(("cosine scan", "compiled", t))

    print(f"{'kernel':<24} {'backend':<10} {'best (s)':<10} speedup")
    base: dict[str, float] = {}
    for kernel, backend, seconds in results:
        base.setdefault(kernel, seconds)
        speedup = base[kernel] / seconds
        print(f"{kernel:<24} {backend:<10} {seconds:<10.4f} {speedup:.2f}x")
    if _core is None:
        print("(compiled backend not built; run `python setup.py build_ext --inplace`)")
    else:
        a = embed_python(texts[0])
        b = embed_compiled(texts[0])
        assert np.array_equal(a, b), "backends disagree"
        print("parity check: identical embeddings across backends")


if __name__ == "__main__":
    main()
