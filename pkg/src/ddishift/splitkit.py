"""Drug split strategies: random, frequency, time and cluster-based.

The cluster-based split links every drug pair whose Tanimoto similarity is
strictly above ``gamma0``, takes connected components as clusters and sends
whole clusters to the known or the new side.  Because no edge crosses two
clusters, the largest known/new similarity never exceeds ``gamma0``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Dataset, DrugSplit, Strategy
from .errors import DegenerateSplit, NoApprovalData, UnknownDrug, UnsatisfiableFraction
from .simkit import SimilarityMatrix, max_cross_similarity, pairwise_similarity

MAX_RESHUFFLES = 32


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True

    def groups(self) -> list[list[int]]:
        """Components as sorted member lists, ordered by smallest member."""
        buckets: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            buckets.setdefault(self.find(x), []).append(x)
        return sorted(buckets.values(), key=lambda g: g[0])


def make_rng(seed: int) -> np.random.Generator:
    # 64-bit seeds; negatives wrap so every int maps to a valid PCG64 seed
    return np.random.default_rng(seed % 2**64)


@dataclass(frozen=True)
class SplitRequest:
    strategy: Strategy
    seed: int = 42
    new_fraction: float = 0.2
    gamma0: Optional[float] = None
    threshold_year: Optional[int] = None
    fraction_tolerance: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not 0.0 < self.new_fraction < 1.0:
            raise ValueError(f"new_fraction must lie in (0, 1), got {self.new_fraction}")
        if self.fraction_tolerance < 0:
            raise ValueError("fraction_tolerance must be non-negative")
        if self.strategy is Strategy.CLUSTER:
            if self.gamma0 is None:
                raise ValueError("cluster split needs gamma0")
            if not 0.0 <= self.gamma0 <= 1.0:
                raise ValueError(f"gamma0 must lie in [0, 1], got {self.gamma0}")
        if self.strategy is Strategy.TIME and self.threshold_year is None:
            raise ValueError("time split needs threshold_year")

    @property
    def label(self) -> str:
        if self.strategy is Strategy.CLUSTER:
            return f"cluster@{self.gamma0:g}"
        if self.strategy is Strategy.TIME:
            return f"time@{self.threshold_year}"
        return self.strategy.value

    def with_seed(self, seed: int) -> "SplitRequest":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[frozenset[str], ...]
    gamma0: float

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def _edges_above(matrix: SimilarityMatrix, gamma0: float) -> np.ndarray:
    """Flat triangle indices of pairs with exact similarity > gamma0."""
    if len(matrix.values) == 0:
        return np.empty(0, dtype=np.int64)
    inter = matrix.intersections.astype(np.int64)
    union = matrix.unions()
    ratio = np.zeros(len(inter), dtype=np.float64)
    np.divide(inter, union, out=ratio, where=union > 0)
    # correctly rounded quotients only tie with gamma0 when the rational is
    # within half an ulp of it; settle those exactly
    above = ratio > gamma0
    ties = np.flatnonzero(ratio == gamma0)
    if ties.size:
        g = Fraction(gamma0)
        for k in ties:
            u = int(union[k])
            if u and Fraction(int(inter[k]), u) > g:
                above[k] = True
    return np.flatnonzero(above)


def build_clusters(matrix: SimilarityMatrix, gamma0: float) -> ClusterSet:
    if not 0.0 <= gamma0 <= 1.0:
        raise ValueError(f"gamma0 must lie in [0, 1], got {gamma0}")
    uf = UnionFind(matrix.n)
    flat = _edges_above(matrix, gamma0)
    rows, cols = matrix.pairs_of(flat)
    for a, b in zip(rows.tolist(), cols.tolist()):
        uf.union(a, b)
    order = matrix.order
    clusters = tuple(frozenset(order[x] for x in g) for g in uf.groups())
    return ClusterSet(clusters, gamma0)


def _matrix_for(dataset: Dataset, matrix: Optional[SimilarityMatrix]) -> SimilarityMatrix:
    if matrix is None:
        if not dataset.fingerprints:
            raise UnknownDrug("cluster split needs fingerprints for every drug")
        matrix = pairwise_similarity(dataset.fingerprints)
    missing = [d for d in dataset.drugs if d not in matrix]
    if missing:
        raise UnknownDrug(f"{len(missing)} drug(s) lack fingerprints, e.g. {missing[0]!r}")
    return matrix


def _assign_clusters(
    sizes: list[int], n: int, request: SplitRequest, rng: np.random.Generator
) -> Optional[list[int]]:
    target = round(request.new_fraction * n)
    slack = request.fraction_tolerance * n
    for _ in range(MAX_RESHUFFLES):
        chosen: list[int] = []
        count = 0
        for c in rng.permutation(len(sizes)).tolist():
            if count >= target:
                break
            if count + sizes[c] <= target + slack:
                chosen.append(c)
                count += sizes[c]
        if abs(count - target) <= slack and 0 < count < n:
            return chosen
    return None


def cluster_split(
    dataset: Dataset, matrix: Optional[SimilarityMatrix], request: SplitRequest
) -> DrugSplit:
    """Assign whole similarity clusters to the known or new side."""
    if request.strategy is not Strategy.CLUSTER:
        raise ValueError(f"cluster_split got a {request.strategy} request")
    matrix = _matrix_for(dataset, matrix)
    universe = dataset.drug_set
    clusters = [c & universe for c in build_clusters(matrix, request.gamma0).clusters]
    clusters = [c for c in clusters if c]
    sizes = [len(c) for c in clusters]
    n = len(universe)
    chosen = _assign_clusters(sizes, n, request, make_rng(request.seed))
    if chosen is None:
        raise UnsatisfiableFraction(
            f"no assignment of {len(clusters)} clusters (largest {max(sizes, default=0)}) puts "
            f"{request.new_fraction:g}±{request.fraction_tolerance:g} of {n} drugs on the new side "
            f"at gamma0={request.gamma0:g}"
        )
    new = frozenset().union(*(clusters[c] for c in chosen))
    known = universe - new
    top = matrix.global_max()
    return DrugSplit(
        known=known,
        new=new,
        strategy=Strategy.CLUSTER,
        seed=request.seed,
        gamma0=request.gamma0,
        achieved_gamma=max_cross_similarity(matrix, known, new),
        normalized_gamma0=request.gamma0 / top if top > 0 else None,
        cluster_count=len(clusters),
        new_fraction=request.new_fraction,
    )


def _take_new(order: list[str], request: SplitRequest) -> DrugSplit:
    k = round(request.new_fraction * len(order))
    if k <= 0 or k >= len(order):
        raise DegenerateSplit(
            f"{request.strategy} split of {len(order)} drugs at fraction {request.new_fraction:g} leaves a side empty"
        )
    return DrugSplit(
        known=frozenset(order[k:]),
        new=frozenset(order[:k]),
        strategy=request.strategy,
        seed=request.seed,
        new_fraction=request.new_fraction,
    )


def random_split(dataset: Dataset, request: SplitRequest) -> DrugSplit:
    drugs = list(dataset.drugs)
    perm = make_rng(request.seed).permutation(len(drugs))
    return _take_new([drugs[i] for i in perm], request)


def frequency_split(dataset: Dataset, request: SplitRequest) -> DrugSplit:
    """Least-frequent drugs (by triplet participation) become new."""
    degree = dataset.degree()
    order = sorted(dataset.drugs, key=lambda d: (degree.get(d, 0), d))
    return _take_new(order, request)


def time_split(dataset: Dataset, request: SplitRequest) -> DrugSplit:
    """Approved before ``threshold_year`` is known; that year or later is new.

    Drugs without an approval year are left out and listed in ``excluded``.
    """
    years = {d: y for d, y in dataset.approval_years.items() if d in dataset.drug_set}
    if not years:
        raise NoApprovalData("time split needs approval years for at least one drug")
    thr = request.threshold_year
    known = frozenset(d for d, y in years.items() if y < thr)
    new = frozenset(d for d, y in years.items() if y >= thr)
    if not known or not new:
        raise DegenerateSplit(
            f"threshold {thr} gives {len(known)} known and {len(new)} new drugs"
        )
    return DrugSplit(
        known=known,
        new=new,
        strategy=Strategy.TIME,
        seed=request.seed,
        threshold_year=thr,
        excluded=dataset.drug_set - known - new,
    )


def make_split(
    dataset: Dataset, request: SplitRequest, matrix: Optional[SimilarityMatrix] = None
) -> DrugSplit:
    if request.strategy is Strategy.CLUSTER:
        return cluster_split(dataset, matrix, request)
    if request.strategy is Strategy.RANDOM:
        return random_split(dataset, request)
    if request.strategy is Strategy.FREQUENCY:
        return frequency_split(dataset, request)
    return time_split(dataset, request)
