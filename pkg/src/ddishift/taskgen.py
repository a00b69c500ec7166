"""From a drug split to S1/S2 benchmark tasks, plus negatives and statistics."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .core import MULTILABEL, Dataset, DdiTriplet, DrugSplit, TaskSplit
from .errors import EmptyTrain, SamplingExhausted
from .splitkit import make_rng

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


def assemble_tasks(dataset: Dataset, drug_split: DrugSplit) -> TaskSplit:
    """Route each triplet by how many of its endpoints are new.

    Both known -> train, exactly one new -> S1 test, both new -> S2 test.
    Triplets touching a drug outside the split (time split exclusions) are
    dropped and counted in ``TaskSplit.dropped``.
    """
    known, new = drug_split.known, drug_split.new
    train: list[DdiTriplet] = []
    s1: list[DdiTriplet] = []
    s2: list[DdiTriplet] = []
    dropped = 0
    for t in dataset.triplets:
        h_new, t_new = t.head in new, t.tail in new
        if not (h_new or t.head in known) or not (t_new or t.tail in known):
            dropped += 1
        elif h_new and t_new:
            s2.append(t)
        elif h_new or t_new:
            s1.append(t)
        else:
            train.append(t)
    if not train:
        raise EmptyTrain("no triplet has both endpoints in the known drug set")
    if dropped:
        logger.info("dropped %d triplet(s) touching drugs outside the split", dropped)
    return TaskSplit(train, s1, s2, drug_split, dropped)


def carve_validation(task_split: TaskSplit, fraction: float, seed: int) -> tuple[TaskSplit, tuple[DdiTriplet, ...]]:
    """Move a seeded uniform sample of ``round(fraction * |train|)`` triplets out of train."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"validation fraction must lie in (0, 1), got {fraction}")
    train = task_split.train
    k = round(fraction * len(train))
    picked = set(make_rng(seed).choice(len(train), size=k, replace=False).tolist())
    kept = tuple(t for i, t in enumerate(train) if i not in picked)
    held = tuple(t for i, t in enumerate(train) if i in picked)
    return replace(task_split, train=kept), held


def sample_negatives(
    dataset: Dataset,
    positives: Sequence[DdiTriplet],
    seed: int,
    ratio: int = 1,
    drug_split: Optional[DrugSplit] = None,
) -> list[DdiTriplet]:
    """Corrupt head or tail of each positive to get ``ratio`` negatives apiece.

    The replacement drug comes from the same side of ``drug_split`` as the
    endpoint it replaces (all drugs when no split is given) and the result is
    never a known positive of the same type or a self-interaction.
    """
    if dataset.mode != MULTILABEL:
        raise ValueError("negative sampling applies to multilabel datasets")
    if ratio < 1:
        raise ValueError("ratio must be at least 1")
    rng = make_rng(seed)
    taken: dict[int, set[tuple[str, str]]] = defaultdict(set)
    for t in dataset.triplets:
        if t.is_positive:
            taken[t.relation].add(t.pair)
    for t in positives:
        taken[t.relation].add(t.pair)
    everyone = list(dataset.drugs)
    if drug_split is not None:
        known_pool, new_pool = sorted(drug_split.known), sorted(drug_split.new)

    def pool_for(drug: str) -> list[str]:
        if drug_split is None:
            return everyone
        return new_pool if drug in drug_split.new else known_pool

    out: list[DdiTriplet] = []
    for pos in positives:
        used = taken[pos.relation]
        for _ in range(ratio):
            for _ in range(MAX_ATTEMPTS):
                swap_head = rng.random() < 0.5
                pool = pool_for(pos.head if swap_head else pos.tail)
                repl = pool[int(rng.integers(len(pool)))]
                head, tail = (repl, pos.tail) if swap_head else (pos.head, repl)
                if head != tail and (head, tail) not in used:
                    used.add((head, tail))
                    out.append(DdiTriplet(head, pos.relation, tail, 0))
                    break
            else:
                raise SamplingExhausted(pos.relation)
    return out


@dataclass
class DatasetStats:
    n_drugs: int
    n_relations: int
    n_triplets: int
    relation_counts: dict[int, int] = field(default_factory=dict)
    band: Optional[tuple[int, int]] = None
    in_band: tuple[int, ...] = ()
    out_of_band: tuple[int, ...] = ()

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.n_drugs, self.n_relations, self.n_triplets)

    def to_dict(self) -> dict:
        return {
            "drugs": self.n_drugs,
            "relations": self.n_relations,
            "triplets": self.n_triplets,
            "relation_counts": {str(k): v for k, v in sorted(self.relation_counts.items())},
            "band": list(self.band) if self.band else None,
            "in_band": list(self.in_band),
            "out_of_band": list(self.out_of_band),
        }


def relation_frequencies(dataset: Dataset) -> Counter:
    """Positive occurrences per relation type."""
    return Counter(t.relation for t in dataset.triplets if t.is_positive)


def dataset_stats(dataset: Dataset, band: Optional[tuple[int, int]] = None) -> DatasetStats:
    """Drug/relation/triplet counts, per-type frequencies and a frequency-band check."""
    freq = relation_frequencies(dataset)
    stats = DatasetStats(
        len(dataset.drugs),
        dataset.relation_count,
        len(dataset.triplets),
        dict(sorted(freq.items())),
    )
    if band is not None:
        lo, hi = band
        stats.band = band
        stats.in_band = tuple(r for r in sorted(freq) if lo <= freq[r] <= hi)
        stats.out_of_band = tuple(r for r in sorted(freq) if not lo <= freq[r] <= hi)
    return stats


def filter_type_band(dataset: Dataset, lo: int, hi: int) -> Dataset:
    """Keep only relation types whose positive count lies in ``[lo, hi]``.

    Relation ids are kept as-is; drugs left without triplets stay in the
    universe so fingerprints and approval years remain valid.
    """
    freq = relation_frequencies(dataset)
    keep = {r for r, c in freq.items() if lo <= c <= hi}
    return replace(dataset, triplets=tuple(t for t in dataset.triplets if t.relation in keep))


def parse_band(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"band must look like lo:hi, got {text!r}")
    lo_i, hi_i = int(lo), int(hi)
    if lo_i > hi_i:
        raise ValueError(f"empty band {text!r}")
    return lo_i, hi_i
