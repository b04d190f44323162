"""Exact-scan vector index over unit-norm embeddings.

Search is exhaustive by design: results must equal a brute-force cosine
scan, which the acceptance suite checks. The on-disk format is a small
binary file (little-endian) with a versioned header.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DimensionMismatch, ParseError

MAGIC = b"AKGVIDX1"


class VectorIndex:
    """Key -> unit vector (+ payload string), with exact top-k search."""

    def __init__(self, dim: int) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._keys: list[str] = []
        self._payloads: list[str] = []
        self._rows: list[np.ndarray] = []
        self._slot: dict[str, int] = {}
        self._matrix: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: str) -> bool:
        return key in self._slot

    def keys(self) -> list[str]:
        return list(self._keys)

    def payload(self, key: str) -> str:
        return self._payloads[self._slot[key]]

    def vector(self, key: str) -> np.ndarray:
        return self._rows[self._slot[key]]

    def put(self, key: str, vector: np.ndarray, payload: str = "") -> None:
        """Insert or replace one entry (one entry per key)."""
        arr = np.asarray(vector, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"expected dim {self.dim}, got {arr.shape}")
        if key in self._slot:
            idx = self._slot[key]
            self._rows[idx] = arr
            self._payloads[idx] = payload
        else:
            self._slot[key] = len(self._keys)
            self._keys.append(key)
            self._payloads.append(payload)
            self._rows.append(arr)
        self._matrix = None

    def _scores(self, query: np.ndarray) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.ascontiguousarray(np.stack(self._rows)) if self._rows else np.zeros((0, self.dim))
        return kernels.dot_scores(self._matrix, query)

    def query_similar(self, vector: np.ndarray, k: int, theta: float) -> list[tuple[str, float]]:
        """Up to ``k`` entries with cosine >= theta, best first.

        Ties on cosine break by key ascending. Exhaustive scan; equals a
        brute-force comparison by construction.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if not -1.0 <= theta <= 1.0:
            raise ValueError("theta must be in [-1, 1]")
        arr = np.asarray(vector, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"expected dim {self.dim}, got {arr.shape}")
        if not self._keys:
            return []
        scores = self._scores(arr)
        order = sorted(range(len(self._keys)), key=lambda i: (-scores[i], self._keys[i]))
        out: list[tuple[str, float]] = []
        for i in order:
            if scores[i] < theta:
                break
            out.append((self._keys[i], float(scores[i])))
            if len(out) == k:
                break
        return out

    # --- persistence ----------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", 1, self.dim))
            fh.write(struct.pack("<Q", len(self._keys)))
            for key, payload, row in zip(self._keys, self._payloads, self._rows):
                kb = key.encode("utf-8")
                pb = payload.encode("utf-8")
                fh.write(struct.pack("<HH", len(kb), len(pb)))
                fh.write(kb)
                fh.write(pb)
                fh.write(np.ascontiguousarray(row, dtype="<f8").tobytes())
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        path = Path(path)
        data = path.read_bytes()
        if data[:8] != MAGIC:
            raise ParseError(f"{path}: not a vector index file")
        version, dim = struct.unpack_from("<II", data, 8)
        if version != 1:
            raise ParseError(f"{path}: unsupported version {version}")
        (count,) = struct.unpack_from("<Q", data, 16)
        index = cls(dim)
        offset = 24
        row_bytes = dim * 8
        for _ in range(count):
            klen, plen = struct.unpack_from("<HH", data, offset)
            offset += 4
            key = data[offset:offset + klen].decode("utf-8")
            offset += klen
            payload = data[offset:offset + plen].decode("utf-8")
            offset += plen
            row = np.frombuffer(data, dtype="<f8", count=dim, offset=offset).copy()
            offset += row_bytes
            index.put(key, row, payload)
        if offset != len(data):
            raise ParseError(f"{path}: trailing bytes after {count} records")
        return index
