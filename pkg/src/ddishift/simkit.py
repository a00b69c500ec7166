"""Tanimoto similarity over packed fingerprints.

Intersections are computed as exact integers (a 0/1 Gram product in float32
is exact for widths below 2**24) and every similarity is the result of one
division.  :class:`SimilarityMatrix` keeps those integers next to the rounded
float32 values, so threshold tests can be decided on the exact rational.
"""

from __future__ import annotations

import struct
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Collection, Mapping, Optional, Sequence

import numpy as np

from .core import Fingerprint
from .errors import DataError, UnknownDrug, WidthMismatch

__all__ = [
    "SimilarityMatrix",
    "tanimoto",
    "tanimoto_exact",
    "pairwise_similarity",
    "max_cross_similarity",
    "save_matrix",
    "load_matrix",
]

_BLOCK = 1024


def tanimoto_exact(a: Fingerprint, b: Fingerprint) -> Fraction:
    if a.width != b.width:
        raise WidthMismatch(f"fingerprint widths differ: {a.width} vs {b.width}")
    x, y = a.as_int(), b.as_int()
    inter = (x & y).bit_count()
    union = x.bit_count() + y.bit_count() - inter
    if union == 0:
        return Fraction(0)
    return Fraction(inter, union)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|A ∩ B| / |A ∪ B| for two equal-width fingerprints.

    Two all-zero fingerprints score 0.0 (with a ``RuntimeWarning``).
    """
    if a.width != b.width:
        raise WidthMismatch(f"fingerprint widths differ: {a.width} vs {b.width}")
    x, y = a.as_int(), b.as_int()
    inter = (x & y).bit_count()
    union = x.bit_count() + y.bit_count() - inter
    if union == 0:
        warnings.warn("Tanimoto of two all-zero fingerprints defined as 0.0", RuntimeWarning, stacklevel=2)
        return 0.0
    return inter / union


def _ratio(inter: np.ndarray, union: np.ndarray) -> np.ndarray:
    out = np.zeros(inter.shape, dtype=np.float64)
    np.divide(inter, union, out=out, where=union > 0)
    return out


class SimilarityMatrix:
    """All-pairs Tanimoto similarity over ``order`` (sorted drug ids).

    The strict upper triangle is stored row-major in ``values`` (float32);
    ``intersections`` and ``popcounts`` hold the exact integer counts it was
    derived from.
    """

    def __init__(
        self,
        order: Sequence[str],
        values: np.ndarray,
        intersections: np.ndarray,
        popcounts: np.ndarray,
        width: int,
    ):
        self.order = tuple(order)
        self.n = len(self.order)
        expected = self.n * (self.n - 1) // 2
        if values.shape != (expected,) or intersections.shape != (expected,) or popcounts.shape != (self.n,):
            raise ValueError("triangle arrays do not match drug count")
        self.values = values
        self.intersections = intersections
        self.popcounts = popcounts
        self.width = width
        self._index = {d: i for i, d in enumerate(self.order)}
        self._offsets = np.arange(self.n, dtype=np.int64) * (2 * self.n - np.arange(self.n, dtype=np.int64) - 1) // 2

    def __len__(self) -> int:
        return self.n

    def __contains__(self, drug: str) -> bool:
        return drug in self._index

    def __repr__(self) -> str:
        return f"SimilarityMatrix(n={self.n}, width={self.width})"

    def index(self, drug: str) -> int:
        try:
            return self._index[drug]
        except KeyError:
            raise UnknownDrug(f"drug {drug!r} not in similarity matrix") from None

    def indices(self, drugs: Collection[str]) -> np.ndarray:
        return np.array(sorted(self.index(d) for d in drugs), dtype=np.int64)

    def flat_index(self, i, j):
        """Triangle position of pair (i, j) with i < j; works on arrays."""
        return self._offsets[i] + (j - i - 1)

    def pairs_of(self, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Inverse of :meth:`flat_index`."""
        flat = np.asarray(flat, dtype=np.int64)
        i = np.searchsorted(self._offsets, flat, side="right") - 1
        j = flat - self._offsets[i] + i + 1
        return i, j

    def unions(self, flat: Optional[np.ndarray] = None) -> np.ndarray:
        if flat is None:
            i, j = self.pairs_of(np.arange(len(self.values)))
            inter = self.intersections
        else:
            i, j = self.pairs_of(flat)
            inter = self.intersections[flat]
        return self.popcounts[i] + self.popcounts[j] - inter.astype(np.int64)

    def exact(self, u: str, v: str) -> Fraction:
        i, j = sorted((self.index(u), self.index(v)))
        if i == j:
            return Fraction(1) if self.popcounts[i] else Fraction(0)
        k = self.flat_index(i, j)
        inter = int(self.intersections[k])
        union = int(self.popcounts[i] + self.popcounts[j]) - inter
        return Fraction(inter, union) if union else Fraction(0)

    def similarity(self, u: str, v: str) -> float:
        return float(self.exact(u, v))

    def row(self, drug: str) -> np.ndarray:
        """Similarities of ``drug`` to every drug in ``order`` (float64, exact-rounded)."""
        i = self.index(drug)
        n = self.n
        inter = np.empty(n, dtype=np.int64)
        if i > 0:
            before = np.arange(i)
            inter[:i] = self.intersections[self.flat_index(before, i)]
        start = self._offsets[i]
        inter[i + 1:] = self.intersections[start:start + n - i - 1]
        inter[i] = self.popcounts[i]
        union = self.popcounts[i] + self.popcounts - inter
        return _ratio(inter, union)

    def global_max(self) -> float:
        if len(self.values) == 0:
            return 0.0
        return float(_ratio(self.intersections, self.unions()).max())


def _pack(prints: Mapping[str, Fingerprint]) -> tuple[list[str], np.ndarray, int]:
    if not prints:
        raise ValueError("pairwise similarity needs at least one fingerprint")
    order = sorted(prints)
    widths = {prints[d].width for d in order}
    if len(widths) != 1:
        raise WidthMismatch(f"fingerprint widths differ: {sorted(widths)}")
    width = widths.pop()
    buf = b"".join(prints[d].bits for d in order)
    packed = np.frombuffer(buf, dtype=np.uint8).reshape(len(order), width // 8)
    return order, packed, width


def pairwise_similarity(prints: Mapping[str, Fingerprint], block: int = _BLOCK) -> SimilarityMatrix:
    order, packed, width = _pack(prints)
    n = len(order)
    bits = np.unpackbits(packed, axis=1).astype(np.float32)
    popcounts = bits.sum(axis=1, dtype=np.float64).astype(np.int64)
    zero = int((popcounts == 0).sum())
    if zero > 1:
        warnings.warn(
            f"{zero} all-zero fingerprints; their mutual similarity is defined as 0.0",
            RuntimeWarning,
            stacklevel=2,
        )
    size = n * (n - 1) // 2
    inter_tri = np.empty(size, dtype=np.uint32)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        gram = bits[lo:hi] @ bits[lo:].T
        for r in range(hi - lo):
            i = lo + r
            if i == n - 1:
                continue
            start = i * (2 * n - i - 1) // 2
            inter_tri[start:start + n - i - 1] = gram[r, r + 1:]
    if n < 2:
        return SimilarityMatrix(order, np.empty(0, np.float32), inter_tri, popcounts, width)
    i, j = _triu(n)
    union = popcounts[i] + popcounts[j] - inter_tri.astype(np.int64)
    values = _ratio(inter_tri, union).astype(np.float32)
    return SimilarityMatrix(order, values, inter_tri, popcounts, width)


def _triu(n: int) -> tuple[np.ndarray, np.ndarray]:
    # row index repeated per row length, column index from per-row ranges
    lengths = np.arange(n - 1, 0, -1)
    i = np.repeat(np.arange(n - 1), lengths)
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    j = np.arange(len(i)) - np.repeat(starts, lengths) + i + 1
    return i, j


def max_cross_similarity(matrix: SimilarityMatrix, known: Collection[str], new: Collection[str]) -> float:
    """max S(u, v) over u in ``known``, v in ``new``."""
    if not known or not new:
        raise ValueError("known and new sets must be non-empty")
    ki = matrix.indices(known)
    ni = matrix.indices(new)
    if np.intersect1d(ki, ni).size:
        raise ValueError("known and new sets overlap")
    best = 0.0
    for chunk in np.array_split(ki, max(1, len(ki) * len(ni) // 2_000_000 + 1)):
        a, b = np.meshgrid(chunk, ni, indexing="ij")
        lo = np.minimum(a, b).ravel()
        hi = np.maximum(a, b).ravel()
        flat = matrix.flat_index(lo, hi)
        inter = matrix.intersections[flat].astype(np.int64)
        union = matrix.popcounts[lo] + matrix.popcounts[hi] - inter
        if len(flat):
            best = max(best, float(_ratio(inter, union).max()))
    return best


_MAGIC = b"DDISIM\x00\x01"
_HEADER = struct.Struct("<8sIIII")


def save_matrix(matrix: SimilarityMatrix, path) -> None:
    """Binary cache.

    Layout (little-endian): 8-byte magic ``DDISIM\\0\\1``; uint32 version (1),
    n, width, id-block length L; L bytes of newline-joined UTF-8 drug ids;
    n*(n-1)/2 float32 similarities; n uint32 popcounts; n*(n-1)/2 uint32
    intersections.
    """
    ids = "\n".join(matrix.order).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, 1, matrix.n, matrix.width, len(ids)))
        fh.write(ids)
        fh.write(matrix.values.astype("<f4").tobytes())
        fh.write(matrix.popcounts.astype("<u4").tobytes())
        fh.write(matrix.intersections.astype("<u4").tobytes())


def load_matrix(path) -> SimilarityMatrix:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise DataError(f"{path}: truncated similarity cache")
    magic, version, n, width, id_len = _HEADER.unpack_from(data)
    if magic != _MAGIC or version != 1:
        raise DataError(f"{path}: not a version-1 similarity cache")
    pos = _HEADER.size
    ids = data[pos:pos + id_len].decode("utf-8").split("\n") if n else []
    pos += id_len
    size = n * (n - 1) // 2
    need = pos + 4 * (2 * size + n)
    if len(data) != need or len(ids) != n:
        raise DataError(f"{path}: similarity cache size mismatch")
    values = np.frombuffer(data, "<f4", size, pos).astype(np.float32)
    pos += 4 * size
    popcounts = np.frombuffer(data, "<u4", n, pos).astype(np.int64)
    pos += 4 * n
    inter = np.frombuffer(data, "<u4", size, pos).astype(np.uint32)
    return SimilarityMatrix(ids, values, inter, popcounts, width)
