"""Evaluation metrics for multiclass and multilabel DDI prediction.

Multiclass files are scored with macro-F1, accuracy and Cohen's kappa;
multilabel files with per-type ROC-AUC, PR-AUC and thresholded accuracy,
averaged over types without weighting.
"""

from __future__ import annotations

import io
import json
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import DdiTriplet, PredictionRecord
from .errors import DuplicatePrediction, LengthMismatch, MissingPrediction, NoPositives, SingleClass

MULTICLASS_METRICS = ("macro_f1", "accuracy", "kappa")
MULTILABEL_METRICS = ("roc_auc", "pr_auc", "accuracy")


def _pair_arrays(gold: Sequence[int], pred: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    g = np.asarray(gold, dtype=np.int64)
    p = np.asarray(pred, dtype=np.int64)
    if g.shape != p.shape or g.ndim != 1:
        raise LengthMismatch(f"gold has {g.size} labels, pred has {p.size}")
    if g.size == 0:
        raise LengthMismatch("empty label lists")
    return g, p


def per_type_f1(gold: Sequence[int], pred: Sequence[int]) -> dict[int, dict[str, float]]:
    """Precision, recall and F1 for every type occurring in ``gold``."""
    g, p = _pair_arrays(gold, pred)
    out: dict[int, dict[str, float]] = {}
    for c in np.unique(g).tolist():
        tp = int(np.count_nonzero((g == c) & (p == c)))
        n_pred = int(np.count_nonzero(p == c))
        n_gold = int(np.count_nonzero(g == c))
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_gold
        denom = precision + recall
        f1 = 2 * precision * recall / denom if denom > 0 else 0.0
        out[c] = {"precision": precision, "recall": recall, "f1": f1, "support": float(n_gold)}
    return out


def macro_f1(gold: Sequence[int], pred: Sequence[int]) -> float:
    table = per_type_f1(gold, pred)
    return float(np.mean([row["f1"] for row in table.values()]))


def accuracy(gold: Sequence[int], pred: Sequence[int]) -> float:
    g, p = _pair_arrays(gold, pred)
    return float(np.count_nonzero(g == p)) / g.size


def cohens_kappa(gold: Sequence[int], pred: Sequence[int]) -> float:
    """(A_p - A_e) / (1 - A_e); 0.0 with a warning when A_e == 1."""
    g, p = _pair_arrays(gold, pred)
    n = g.size
    observed = np.count_nonzero(g == p) / n
    classes, inv = np.unique(np.concatenate([g, p]), return_inverse=True)
    gm = np.bincount(inv[:n], minlength=len(classes)) / n
    pm = np.bincount(inv[n:], minlength=len(classes)) / n
    expected = float(gm @ pm)
    if expected >= 1.0:
        warnings.warn("kappa undefined when chance agreement is 1; returning 0.0", RuntimeWarning, stacklevel=2)
        return 0.0
    return float((observed - expected) / (1.0 - expected))


def _binary(scores: Sequence[float], labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise LengthMismatch(f"{s.size} scores vs {y.size} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0/1")
    return s, y.astype(bool)


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney form of the ROC area; tied scores count one half."""
    s, y = _binary(scores, labels)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC-AUC needs both positive and negative labels")
    ranks = rankdata(s)  # midranks
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Sum of precision times recall increments over descending thresholds.

    All records sharing a score enter at the same threshold.
    """
    s, y = _binary(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise NoPositives("PR-AUC needs at least one positive label")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    # last index of each tie block
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp, fp = tp[ends], fp[ends]
    precision = tp / (tp + fp)
    recall = tp / n_pos
    delta = np.diff(np.r_[0.0, recall])
    return float(np.sum(delta * precision))


@dataclass
class EvalReport:
    aggregate: dict[str, float]
    per_type: dict[int, dict[str, float]]
    counts: dict[int, int]
    skipped: dict[int, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "aggregate": dict(self.aggregate),
            "per_type": {str(k): dict(v) for k, v in sorted(self.per_type.items())},
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "skipped": {str(k): v for k, v in sorted(self.skipped.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("type,metric,value\n")
        for name, value in self.aggregate.items():
            buf.write(f"ALL,{name},{value:.6f}\n")
        for rel in sorted(self.per_type):
            for name, value in self.per_type[rel].items():
                buf.write(f"{rel},{name},{value:.6f}\n")
        return buf.getvalue()


def multilabel_report(records: Sequence[PredictionRecord], threshold: float = 0.5) -> EvalReport:
    groups: dict[int, list[PredictionRecord]] = defaultdict(list)
    for r in records:
        if r.score is None or r.gold_label is None:
            raise ValueError("multilabel records need score and gold_label")
        groups[r.relation].append(r)
    per_type: dict[int, dict[str, float]] = {}
    counts: dict[int, int] = {}
    skipped: dict[int, str] = {}
    for rel in sorted(groups):
        rows = groups[rel]
        scores = [r.score for r in rows]
        labels = [r.gold_label for r in rows]
        counts[rel] = len(rows)
        n_pos = sum(labels)
        if n_pos == 0 or n_pos == len(labels):
            skipped[rel] = "only positive labels" if n_pos else "only negative labels"
            continue
        predicted = [int(s >= threshold) for s in scores]
        per_type[rel] = {
            "roc_auc": roc_auc(scores, labels),
            "pr_auc": pr_auc(scores, labels),
            "accuracy": accuracy(labels, predicted),
        }
    aggregate = {
        m: float(np.mean([row[m] for row in per_type.values()])) for m in MULTILABEL_METRICS
    } if per_type else {}
    return EvalReport(aggregate, per_type, counts, skipped)


def align_multiclass(
    records: Sequence[PredictionRecord], gold: Sequence[DdiTriplet]
) -> tuple[list[int], list[int]]:
    """Gold and predicted relation lists, one entry per gold triplet."""
    predicted: dict[tuple[str, str], int] = {}
    for r in records:
        key = (r.head, r.tail)
        if key in predicted:
            raise DuplicatePrediction(key)
        predicted[key] = r.relation
    g: list[int] = []
    p: list[int] = []
    for t in gold:
        key = (t.head, t.tail)
        if key not in predicted:
            raise MissingPrediction(key)
        g.append(t.relation)
        p.append(predicted[key])
    return g, p


def multiclass_report(records: Sequence[PredictionRecord], gold: Sequence[DdiTriplet]) -> EvalReport:
    g, p = align_multiclass(records, gold)
    table = per_type_f1(g, p)
    aggregate = {
        "macro_f1": float(np.mean([row["f1"] for row in table.values()])),
        "accuracy": accuracy(g, p),
        "kappa": cohens_kappa(g, p),
    }
    per_type = {rel: {k: v for k, v in row.items() if k != "support"} for rel, row in table.items()}
    counts = {rel: int(row["support"]) for rel, row in table.items()}
    return EvalReport(aggregate, per_type, counts)


def report_from_mapping(obj: Mapping) -> EvalReport:
    """Inverse of :meth:`EvalReport.to_dict`."""
    return EvalReport(
        aggregate=dict(obj["aggregate"]),
        per_type={int(k): dict(v) for k, v in obj["per_type"].items()},
        counts={int(k): int(v) for k, v in obj["counts"].items()},
        skipped={int(k): v for k, v in obj.get("skipped", {}).items()},
    )
