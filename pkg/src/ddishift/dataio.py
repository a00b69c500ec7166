"""Readers and writers for the on-disk formats.

All text formats are UTF-8, tab-separated, one record per line.  Lines whose
first character is ``#`` and blank lines are skipped.  Every parser rejects a
malformed line with a :class:`~ddishift.errors.ParseError` carrying the
1-based line number.

fingerprints.tsv
    ``drug_id <TAB> hex_bits``.  Lowercase hex; bit 0 is the most significant
    bit of the first byte.  An odd number of hex digits is padded with a zero
    nibble, so widths are always a multiple of 8.
triplets.tsv
    ``head <TAB> tail <TAB> relation`` (multiclass) or
    ``head <TAB> tail <TAB> type <TAB> label`` (multilabel, label 0/1).
approval.tsv
    ``drug_id <TAB> year`` with a 4-digit year.
relations.txt
    One relation name per line; ids follow first appearance.
predictions.tsv
    ``head <TAB> tail <TAB> predicted_relation`` (multiclass) or
    ``head <TAB> tail <TAB> type <TAB> score <TAB> gold_label`` (multilabel).
split.json
    DrugSplit metadata plus the known/new drug lists, ``format_version`` 1.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Optional, Sequence

from .core import (
    MODES,
    MULTICLASS,
    MULTILABEL,
    Dataset,
    DdiTriplet,
    DrugSplit,
    Fingerprint,
    PredictionRecord,
    TaskSplit,
    validate_dataset,
)
from .errors import (
    BadLabel,
    BadRelation,
    BadYear,
    ColumnCount,
    DataError,
    DuplicateDrug,
    MalformedHex,
    ParseError,
    SelfLoopError,
    ValidationError,
    WidthMismatch,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
PRNG_NAME = "numpy.random.PCG64/SeedSequence"

_HEX = re.compile(r"[0-9a-fA-F]+")
_YEAR = re.compile(r"[0-9]{4}")
_INT = re.compile(r"[0-9]+")

PathLike = str | os.PathLike


def _records(path: PathLike) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def _drug_id(token: str, lineno: int, path: PathLike) -> str:
    if not token or token != token.strip() or any(c.isspace() for c in token):
        raise ParseError(f"invalid drug id {token!r}", lineno, str(path))
    return token


def load_fingerprints(path: PathLike) -> dict[str, Fingerprint]:
    prints: dict[str, Fingerprint] = {}
    width = None
    for lineno, cols in _records(path):
        if len(cols) != 2:
            raise ColumnCount(f"expected 2 columns, got {len(cols)}", lineno, str(path))
        drug = _drug_id(cols[0], lineno, path)
        if not _HEX.fullmatch(cols[1]):
            raise MalformedHex(f"not a hex string: {cols[1][:32]!r}", lineno, str(path))
        fp = Fingerprint.from_hex(cols[1])
        if width is None:
            width = fp.width
        elif fp.width != width:
            raise WidthMismatch(f"width {fp.width} differs from {width}", lineno, str(path))
        if drug in prints:
            raise DuplicateDrug(f"drug {drug!r} listed twice", lineno, str(path))
        prints[drug] = fp
    return prints


def _column_positions(mode: str, column_order: Optional[str]) -> dict[str, int]:
    default = "htr" if mode == MULTICLASS else "htrl"
    order = column_order or default
    if sorted(order) != sorted(default):
        raise ValueError(f"column order {order!r} must be a permutation of {default!r}")
    return {c: i for i, c in enumerate(order)}


def load_triplets(path: PathLike, mode: str = MULTICLASS, column_order: Optional[str] = None) -> list[DdiTriplet]:
    """Parse a triplet file, dropping exact duplicates (first occurrence wins).

    ``column_order`` permutes the letters ``h`` (head), ``t`` (tail),
    ``r`` (relation) and, in multilabel mode, ``l`` (label).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    pos = _column_positions(mode, column_order)
    ncols = len(pos)
    out: list[DdiTriplet] = []
    seen: set[DdiTriplet] = set()
    dupes = 0
    for lineno, cols in _records(path):
        if len(cols) != ncols:
            raise ColumnCount(f"expected {ncols} columns ({mode}), got {len(cols)}", lineno, str(path))
        head = _drug_id(cols[pos["h"]], lineno, path)
        tail = _drug_id(cols[pos["t"]], lineno, path)
        rel = cols[pos["r"]]
        if not _INT.fullmatch(rel):
            raise BadRelation(f"relation must be a non-negative integer, got {rel!r}", lineno, str(path))
        label = None
        if mode == MULTILABEL:
            lab = cols[pos["l"]]
            if lab not in ("0", "1"):
                raise BadLabel(f"label must be 0 or 1, got {lab!r}", lineno, str(path))
            label = int(lab)
        if head == tail:
            raise SelfLoopError(f"self-interaction on {head!r}", lineno, str(path))
        t = DdiTriplet(head, int(rel), tail, label)
        if t in seen:
            dupes += 1
            continue
        seen.add(t)
        out.append(t)
    if dupes:
        logger.warning("%s: dropped %d duplicate triplet(s)", path, dupes)
    return out


def load_approval_years(path: PathLike) -> dict[str, int]:
    years: dict[str, int] = {}
    for lineno, cols in _records(path):
        if len(cols) != 2:
            raise ColumnCount(f"expected 2 columns, got {len(cols)}", lineno, str(path))
        drug = _drug_id(cols[0], lineno, path)
        if not _YEAR.fullmatch(cols[1]):
            raise BadYear(f"not a 4-digit year: {cols[1]!r}", lineno, str(path))
        if drug in years:
            raise DuplicateDrug(f"drug {drug!r} listed twice", lineno, str(path))
        years[drug] = int(cols[1])
    return years


def load_relations(path: PathLike) -> tuple[str, ...]:
    names: list[str] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            name = raw.rstrip("\n").rstrip("\r")
            if not name.strip() or name.startswith("#") or name in seen:
                continue
            seen.add(name)
            names.append(name)
    return tuple(names)


@dataclass(frozen=True)
class FileManifest:
    triplets_path: Path
    mode: str = MULTICLASS
    fingerprints_path: Optional[Path] = None
    approval_path: Optional[Path] = None
    relations_path: Optional[Path] = None
    column_order: Optional[str] = None

    @classmethod
    def from_dir(cls, root: PathLike, mode: str = MULTICLASS) -> "FileManifest":
        """Standard layout: triplets.tsv plus optional fingerprints/approval/relations."""
        root = Path(root)

        def opt(name: str) -> Optional[Path]:
            p = root / name
            return p if p.exists() else None

        return cls(
            triplets_path=root / "triplets.tsv",
            mode=mode,
            fingerprints_path=opt("fingerprints.tsv"),
            approval_path=opt("approval.tsv"),
            relations_path=opt("relations.txt"),
        )

    def check(self) -> None:
        for p in (self.triplets_path, self.fingerprints_path, self.approval_path, self.relations_path):
            if p is not None and not Path(p).exists():
                raise DataError(f"missing input file {p}")


def load_dataset(manifest: FileManifest) -> Dataset:
    """Load and validate a dataset.

    The drug universe is the fingerprint file's drug list when one is given
    (triplets naming other drugs then fail validation), otherwise the set of
    triplet endpoints.  Approval years for drugs outside the universe are
    dropped with a warning.
    """
    manifest.check()
    triplets = load_triplets(manifest.triplets_path, manifest.mode, manifest.column_order)
    prints = load_fingerprints(manifest.fingerprints_path) if manifest.fingerprints_path else {}
    relations = load_relations(manifest.relations_path) if manifest.relations_path else None
    if prints:
        drugs = set(prints)
    else:
        drugs = {t.head for t in triplets} | {t.tail for t in triplets}
    years = load_approval_years(manifest.approval_path) if manifest.approval_path else {}
    stray = [d for d in years if d not in drugs]
    if stray:
        logger.warning("ignoring approval years for %d drug(s) outside the dataset", len(stray))
        years = {d: y for d, y in years.items() if d in drugs}
    ds = Dataset(
        drugs=tuple(drugs),
        triplets=tuple(triplets),
        mode=manifest.mode,
        relations=relations,
        fingerprints=prints,
        approval_years=years,
    )
    summary = validate_dataset(ds)
    if summary.errors:
        raise ValidationError(summary.errors)
    return ds


def triplet_line(t: DdiTriplet) -> str:
    if t.label is None:
        return f"{t.head}\t{t.tail}\t{t.relation}\n"
    return f"{t.head}\t{t.tail}\t{t.relation}\t{t.label}\n"


def write_triplets(triplets: Sequence[DdiTriplet], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(triplet_line(t) for t in triplets)


def write_fingerprints(prints: Mapping[str, Fingerprint], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for drug in sorted(prints):
            fh.write(f"{drug}\t{prints[drug].to_hex()}\n")


def write_approval_years(years: Mapping[str, int], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for drug in sorted(years):
            fh.write(f"{drug}\t{years[drug]:04d}\n")


def write_dataset(dataset: Dataset, root: PathLike) -> FileManifest:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    write_triplets(dataset.triplets, root / "triplets.tsv")
    if dataset.fingerprints:
        write_fingerprints(dataset.fingerprints, root / "fingerprints.tsv")
    if dataset.approval_years:
        write_approval_years(dataset.approval_years, root / "approval.tsv")
    if dataset.relations is not None:
        (root / "relations.txt").write_text("".join(f"{r}\n" for r in dataset.relations), encoding="utf-8")
    return FileManifest.from_dir(root, dataset.mode)


def drug_split_to_dict(split: DrugSplit, counts: Optional[Mapping[str, int]] = None) -> dict:
    all_counts = {"known": len(split.known), "new": len(split.new), "excluded": len(split.excluded)}
    all_counts.update(counts or {})
    return {
        "format_version": FORMAT_VERSION,
        "prng": PRNG_NAME,
        "strategy": split.strategy.value,
        "seed": split.seed,
        "new_fraction": split.new_fraction,
        "gamma0": split.gamma0,
        "achieved_gamma": split.achieved_gamma,
        "normalized_gamma0": split.normalized_gamma0,
        "threshold_year": split.threshold_year,
        "cluster_count": split.cluster_count,
        "counts": all_counts,
        "known": sorted(split.known),
        "new": sorted(split.new),
        "excluded": sorted(split.excluded),
    }


def drug_split_from_dict(obj: Mapping) -> DrugSplit:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported split.json format_version {version!r}")
    try:
        return DrugSplit(
            known=frozenset(obj["known"]),
            new=frozenset(obj["new"]),
            strategy=obj["strategy"],
            seed=int(obj["seed"]),
            gamma0=obj.get("gamma0"),
            achieved_gamma=obj.get("achieved_gamma"),
            normalized_gamma0=obj.get("normalized_gamma0"),
            threshold_year=obj.get("threshold_year"),
            cluster_count=obj.get("cluster_count"),
            new_fraction=obj.get("new_fraction"),
            excluded=frozenset(obj.get("excluded", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed split.json: {exc}") from exc


def dump_json(obj, path: PathLike) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def write_drug_split(split: DrugSplit, path: PathLike, counts: Optional[Mapping[str, int]] = None) -> None:
    dump_json(drug_split_to_dict(split, counts), path)


def read_drug_split(path: PathLike) -> DrugSplit:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    return drug_split_from_dict(obj)


TASK_FILES = ("train.tsv", "s1_test.tsv", "s2_test.tsv", "split.json")


def write_task_split(split: TaskSplit, directory: PathLike) -> list[Path]:
    """Write train/s1_test/s2_test triplet files and split.json into ``directory``."""
    root = Path(directory)
    try:
        root.mkdir(parents=True, exist_ok=True)
        paths = [root / name for name in TASK_FILES]
        write_triplets(split.train, paths[0])
        write_triplets(split.s1_test, paths[1])
        write_triplets(split.s2_test, paths[2])
        write_drug_split(split.drug_split, paths[3], split.counts)
    except OSError as exc:
        raise DataError(f"could not write task split to {root}: {exc}") from exc
    return paths


def read_task_split(directory: PathLike, mode: str = MULTICLASS) -> TaskSplit:
    root = Path(directory)
    meta = json.loads((root / "split.json").read_text(encoding="utf-8"))
    return TaskSplit(
        train=load_triplets(root / "train.tsv", mode),
        s1_test=load_triplets(root / "s1_test.tsv", mode),
        s2_test=load_triplets(root / "s2_test.tsv", mode),
        drug_split=drug_split_from_dict(meta),
        dropped=int(meta.get("counts", {}).get("dropped", 0)),
    )


def load_predictions(path: PathLike, mode: str = MULTICLASS) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    ncols = 3 if mode == MULTICLASS else 5
    for lineno, cols in _records(path):
        if len(cols) != ncols:
            raise ColumnCount(f"expected {ncols} columns ({mode}), got {len(cols)}", lineno, str(path))
        head = _drug_id(cols[0], lineno, path)
        tail = _drug_id(cols[1], lineno, path)
        if not _INT.fullmatch(cols[2]):
            raise BadRelation(f"relation must be a non-negative integer, got {cols[2]!r}", lineno, str(path))
        if mode == MULTICLASS:
            records.append(PredictionRecord(head, tail, int(cols[2])))
            continue
        try:
            score = float(cols[3])
        except ValueError:
            raise ParseError(f"score is not a number: {cols[3]!r}", lineno, str(path)) from None
        if not 0.0 <= score <= 1.0:
            raise ParseError(f"score {score} outside [0, 1]", lineno, str(path))
        if cols[4] not in ("0", "1"):
            raise BadLabel(f"gold label must be 0 or 1, got {cols[4]!r}", lineno, str(path))
        records.append(PredictionRecord(head, tail, int(cols[2]), score, int(cols[4])))
    return records


def write_predictions(records: Sequence[PredictionRecord], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            if r.score is None:
                fh.write(f"{r.head}\t{r.tail}\t{r.relation}\n")
            else:
                fh.write(f"{r.head}\t{r.tail}\t{r.relation}\t{r.score:.6f}\t{r.gold_label}\n")
