from __future__ import annotations

import numpy as np
import pytest

from activitykg import kernels
from activitykg.kernels import _fallback

try:
    from activitykg.kernels import _core
except ImportError:
    _core = None


def test_embed_unit_norm():
    v = kernels.embed("abc", 256)
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-6


def test_embed_bitwise_deterministic():
    a = kernels.embed("influencer marketing", 256)
    b = kernels.embed("influencer marketing", 256)
    assert np.array_equal(a, b)


def test_short_text_hashes_one_gram():
    assert kernels.trigram_counts("ab", 64).sum() == 1
    assert kernels.trigram_counts("a", 64).sum() == 1
    assert kernels.trigram_counts("abcd", 64).sum() == 2


def test_embed_empty_raises():
    with pytest.raises(ValueError):
        kernels.embed("", 256)


def test_dot_scores_shape_check():
    with pytest.raises(ValueError):
        kernels.dot_scores(np.zeros((2, 8)), np.zeros(9))


def test_cosine_separates_related_text():
    # The resolution thresholds rely on this embedder behavior.
    a = kernels.embed("influencer marketing", 256)
    b = kernels.embed("influencer marketing strategies", 256)
    c = kernels.embed("database migration", 256)
    assert float(a @ b) > float(a @ c)


@pytest.mark.skipif(_core is None, reason="compiled backend not built")
def test_backends_agree_exactly():
    rng = np.random.default_rng(11)
    texts = [
        "abc", "ab", "influencer marketing strategies",
        "Sarah Lee | person", "Ünïcode tëst — emoji 🙂", "x" * 500,
    ]
    for t in texts:
        cp = np.ascontiguousarray(np.frombuffer(t.encode("utf-32-le"), dtype="<u4"))
        compiled = np.zeros(128, dtype=np.int64)
        _core.trigram_counts(cp, compiled)
        python = _fallback.trigram_counts(cp, 128)
        assert np.array_equal(compiled, python), t
    mat = np.ascontiguousarray(rng.standard_normal((50, 32)))
    q = np.ascontiguousarray(rng.standard_normal(32))
    out = np.empty(50)
    _core.dot_scores(mat, q, out)
    assert np.allclose(out, mat @ q, atol=1e-12)
