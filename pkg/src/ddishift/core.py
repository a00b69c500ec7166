"""Domain types shared across the package.

Drug ids are plain ``str`` and relation ids plain ``int``; everything else is
an immutable dataclass or named tuple so values can be shared freely.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import DegenerateSplit

DrugId = str
RelationId = int

MULTICLASS = "multiclass"
MULTILABEL = "multilabel"
MODES = (MULTICLASS, MULTILABEL)


class Strategy(str, enum.Enum):
    RANDOM = "random"
    FREQUENCY = "frequency"
    TIME = "time"
    CLUSTER = "cluster"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bit vector, packed big-endian (bit 0 is the MSB of byte 0).

    ``width`` is always ``8 * len(bits)``; padding bits are zero.
    """

    bits: bytes
    width: int

    def __post_init__(self):
        if self.width <= 0 or self.width % 8 or self.width != 8 * len(self.bits):
            raise ValueError(f"inconsistent fingerprint width {self.width} for {len(self.bits)} bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Fingerprint":
        if len(text) % 2:
            text = text + "0"
        raw = bytes.fromhex(text)
        return cls(raw, 8 * len(raw))

    @classmethod
    def from_indices(cls, indices: Iterable[int], width: int) -> "Fingerprint":
        nbytes = (width + 7) // 8
        value = 0
        for i in indices:
            if not 0 <= i < width:
                raise ValueError(f"bit index {i} outside width {width}")
            value |= 1 << (8 * nbytes - 1 - i)
        return cls(value.to_bytes(nbytes, "big"), 8 * nbytes)

    def to_hex(self) -> str:
        return self.bits.hex()

    def as_int(self) -> int:
        return int.from_bytes(self.bits, "big")

    def popcount(self) -> int:
        return self.as_int().bit_count()

    def indices(self) -> list[int]:
        value = self.as_int()
        return [i for i in range(self.width) if value >> (self.width - 1 - i) & 1]


class DdiTriplet(NamedTuple):
    head: DrugId
    relation: RelationId
    tail: DrugId
    label: Optional[int] = None

    @property
    def pair(self) -> tuple[DrugId, DrugId]:
        return (self.head, self.tail)

    @property
    def is_positive(self) -> bool:
        return self.label is None or self.label == 1


@dataclass(frozen=True)
class Dataset:
    """A DDI corpus: drug universe, relation vocabulary, triplets, side data.

    ``relations`` holds relation names indexed by id when a vocabulary file was
    supplied; otherwise it is ``None`` and the vocabulary is the set of ids
    observed in ``triplets``.
    """

    drugs: tuple[DrugId, ...]
    triplets: tuple[DdiTriplet, ...]
    mode: str = MULTICLASS
    relations: Optional[tuple[str, ...]] = None
    fingerprints: Mapping[DrugId, Fingerprint] = field(default_factory=dict)
    approval_years: Mapping[DrugId, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "drugs", tuple(sorted(set(self.drugs))))
        object.__setattr__(self, "triplets", tuple(self.triplets))

    @classmethod
    def from_triplets(cls, triplets: Iterable[DdiTriplet], **kwargs) -> "Dataset":
        """Build a dataset whose universe is every endpoint plus fingerprint keys."""
        triplets = tuple(triplets)
        drugs = {t.head for t in triplets} | {t.tail for t in triplets}
        drugs |= set(kwargs.get("fingerprints") or {})
        drugs |= set(kwargs.pop("extra_drugs", ()))
        return cls(drugs=tuple(drugs), triplets=triplets, **kwargs)

    @property
    def drug_set(self) -> frozenset[DrugId]:
        return frozenset(self.drugs)

    @property
    def relation_ids(self) -> tuple[RelationId, ...]:
        if self.relations is not None:
            return tuple(range(len(self.relations)))
        return tuple(sorted({t.relation for t in self.triplets}))

    @property
    def relation_count(self) -> int:
        return len(self.relation_ids)

    def degree(self) -> Counter:
        """Triplet participation count per drug (zero-degree drugs absent)."""
        counts: Counter = Counter()
        for t in self.triplets:
            counts[t.head] += 1
            counts[t.tail] += 1
        return counts


@dataclass(frozen=True)
class DrugSplit:
    """Bipartition of the drug universe into known and new drugs.

    Drugs dropped by a time split (no approval year) are listed in
    ``excluded``; for every other strategy ``excluded`` is empty.
    """

    known: frozenset[DrugId]
    new: frozenset[DrugId]
    strategy: Strategy
    seed: int = 0
    gamma0: Optional[float] = None
    achieved_gamma: Optional[float] = None
    normalized_gamma0: Optional[float] = None
    threshold_year: Optional[int] = None
    cluster_count: Optional[int] = None
    new_fraction: Optional[float] = None
    excluded: frozenset[DrugId] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "known", frozenset(self.known))
        object.__setattr__(self, "new", frozenset(self.new))
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.known or not self.new:
            raise DegenerateSplit(
                f"{self.strategy} split has {len(self.known)} known and {len(self.new)} new drugs"
            )
        if self.known & self.new:
            raise ValueError("known and new drug sets overlap")
        if self.excluded & (self.known | self.new):
            raise ValueError("excluded drugs overlap the split")

    def is_known(self, drug: DrugId) -> bool:
        return drug in self.known

    def is_new(self, drug: DrugId) -> bool:
        return drug in self.new

    @property
    def drugs(self) -> frozenset[DrugId]:
        return self.known | self.new


@dataclass(frozen=True)
class TaskSplit:
    train: tuple[DdiTriplet, ...]
    s1_test: tuple[DdiTriplet, ...]
    s2_test: tuple[DdiTriplet, ...]
    drug_split: DrugSplit
    dropped: int = 0

    def __post_init__(self):
        for name in ("train", "s1_test", "s2_test"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def counts(self) -> dict[str, int]:
        return {
            "train": len(self.train),
            "s1_test": len(self.s1_test),
            "s2_test": len(self.s2_test),
            "dropped": self.dropped,
        }

    def __len__(self) -> int:
        return len(self.train) + len(self.s1_test) + len(self.s2_test)


class PredictionRecord(NamedTuple):
    """One row of a prediction file.

    Multiclass rows carry the predicted ``relation`` only; multilabel rows
    carry the scored ``relation`` together with ``score`` and ``gold_label``.
    """

    head: DrugId
    tail: DrugId
    relation: RelationId
    score: Optional[float] = None
    gold_label: Optional[int] = None


@dataclass
class ValidationSummary:
    n_drugs: int
    n_relations: int
    n_triplets: int
    errors: list[str]

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.n_drugs, self.n_relations, self.n_triplets)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_dataset(dataset: Dataset) -> ValidationSummary:
    """Count drugs/relations/triplets and list every invariant violation.

    Never raises and never mutates ``dataset``.
    """
    errors: list[str] = []
    drugs = dataset.drug_set
    seen: set[DdiTriplet] = set()
    n_rel = len(dataset.relations) if dataset.relations is not None else None
    for i, t in enumerate(dataset.triplets, 1):
        for end in (t.head, t.tail):
            if end not in drugs:
                errors.append(f"triplet {i}: dangling endpoint {end!r}")
        if t.head == t.tail:
            errors.append(f"triplet {i}: self-loop on {t.head!r}")
        if t in seen:
            errors.append(f"triplet {i}: duplicate triplet {t.head}\t{t.tail}\t{t.relation}")
        seen.add(t)
        if t.relation < 0 or (n_rel is not None and t.relation >= n_rel):
            errors.append(f"triplet {i}: relation {t.relation} outside vocabulary")
        if dataset.mode == MULTICLASS and t.label is not None:
            errors.append(f"triplet {i}: label present in multiclass dataset")
        if dataset.mode == MULTILABEL and t.label not in (0, 1):
            errors.append(f"triplet {i}: multilabel triplet needs label 0 or 1")
    widths = set()
    for drug in sorted(dataset.fingerprints):
        if drug not in drugs:
            errors.append(f"fingerprint for unknown drug {drug!r}")
        widths.add(dataset.fingerprints[drug].width)
    if len(widths) > 1:
        errors.append(f"fingerprint width mismatch: {sorted(widths)}")
    for drug in sorted(dataset.approval_years):
        if drug not in drugs:
            errors.append(f"approval year for unknown drug {drug!r}")
    return ValidationSummary(len(dataset.drugs), dataset.relation_count, len(dataset.triplets), errors)
