"""Synthetic corpora with time-correlated fingerprint clusters.

Drugs come from ``n_clusters`` fingerprint centroids spread over
``n_epochs`` approval epochs.  Early centroids stay close to a shared
ancestor, so at moderate thresholds they fuse into one large component;
later centroids drift further away until the last epoch is fully novel.
Each drug prefers one interaction type, inherited from its centroid most
of the time, and the type of a triplet follows its head drug's preference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MULTICLASS, MULTILABEL, Dataset, DdiTriplet, Fingerprint
from .splitkit import make_rng


@dataclass(frozen=True)
class SynthConfig:
    n_drugs: int = 300
    n_clusters: int = 10
    n_epochs: int = 5
    width: int = 1024
    n_relations: int = 8
    n_triplets: int = 1500
    start_year: int = 1980
    epoch_years: int = 10
    density: float = 0.12
    keep: float = 0.8
    noise: float = 0.01
    inherit: float = 0.7
    follow: float = 0.85
    mode: str = MULTICLASS
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_epochs < 1 or self.n_drugs < 2:
            raise ValueError("need at least one cluster, one epoch and two drugs")
        if self.n_triplets > self.n_drugs * (self.n_drugs - 1):
            raise ValueError("more triplets than ordered drug pairs")


def _bits(rng: np.random.Generator, width: int, p: float) -> np.ndarray:
    return rng.random(width) < p


def make_time_correlated(config: SynthConfig = SynthConfig()) -> Dataset:
    rng = make_rng(config.seed)
    width, p = config.width, config.density
    ancestor = _bits(rng, width, p)
    cluster_epoch = [c * config.n_epochs // config.n_clusters for c in range(config.n_clusters)]
    centroids = []
    for c in range(config.n_clusters):
        drift = cluster_epoch[c] / max(config.n_epochs - 1, 1)
        fresh = _bits(rng, width, p)
        replace = rng.random(width) < drift
        centroids.append(np.where(replace, fresh, ancestor))
    cluster_type = [c % config.n_relations for c in range(config.n_clusters)]

    drugs = [f"SD{i:05d}" for i in range(config.n_drugs)]
    member = [i * config.n_clusters // config.n_drugs for i in range(config.n_drugs)]
    prints: dict[str, Fingerprint] = {}
    years: dict[str, int] = {}
    preferred: dict[str, int] = {}
    for drug, c in zip(drugs, member):
        bits = (centroids[c] & (rng.random(width) < config.keep)) | _bits(rng, width, config.noise)
        prints[drug] = Fingerprint(np.packbits(bits).tobytes(), width)
        years[drug] = (
            config.start_year + cluster_epoch[c] * config.epoch_years + int(rng.integers(config.epoch_years))
        )
        if rng.random() < config.inherit:
            preferred[drug] = cluster_type[c]
        else:
            preferred[drug] = int(rng.integers(config.n_relations))

    pairs: set[tuple[str, str]] = set()
    triplets: list[DdiTriplet] = []
    n = config.n_drugs
    while len(triplets) < config.n_triplets:
        a, b = rng.integers(n, size=2).tolist()
        if a == b or (drugs[a], drugs[b]) in pairs:
            continue
        head, tail = drugs[a], drugs[b]
        pairs.add((head, tail))
        if rng.random() < config.follow:
            rel = preferred[head]
        else:
            rel = int(rng.integers(config.n_relations))
        label = 1 if config.mode == MULTILABEL else None
        triplets.append(DdiTriplet(head, rel, tail, label))

    return Dataset(
        drugs=tuple(drugs),
        triplets=tuple(triplets),
        mode=config.mode,
        fingerprints=prints,
        approval_years=years,
    )


def make_count_surrogate(
    n_drugs: int,
    n_relations: int,
    n_triplets: int,
    mode: str = MULTICLASS,
    width: int = 64,
    seed: int = 0,
) -> Dataset:
    """A random corpus with exactly the requested drug/type/triplet counts.

    Every drug and every relation type occurs in at least one triplet.
    """
    cover = (n_drugs + 1) // 2
    if n_triplets < max(n_relations, cover):
        raise ValueError("too few triplets to cover every drug and relation")
    rng = make_rng(seed)
    drugs = [f"DB{i:05d}" for i in range(n_drugs)]
    triplets: list[DdiTriplet] = []
    seen: set[tuple[str, int, str]] = set()
    label = 1 if mode == MULTILABEL else None

    def add(h: int, r: int, t: int) -> bool:
        key = (drugs[h], r, drugs[t])
        if h == t or key in seen:
            return False
        seen.add(key)
        triplets.append(DdiTriplet(drugs[h], r, drugs[t], label))
        return True

    # pair up consecutive drugs so every drug occurs, cycling through the
    # relation types; types beyond the cover get one random pair each
    for k, i in enumerate(range(0, n_drugs, 2)):
        add(i, k % n_relations, (i + 1) % n_drugs)
    for r in range(cover, n_relations):
        while not add(int(rng.integers(n_drugs)), r, int(rng.integers(n_drugs))):
            pass
    while len(triplets) < n_triplets:
        h, t = rng.integers(n_drugs, size=2).tolist()
        add(h, int(rng.integers(n_relations)), t)
    prints = {
        d: Fingerprint(np.packbits(rng.random(width) < 0.2).tobytes(), width) for d in drugs
    }
    return Dataset(drugs=tuple(drugs), triplets=tuple(triplets), mode=mode, fingerprints=prints)
