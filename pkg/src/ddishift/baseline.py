"""Training-free nearest-neighbour baseline and benchmark harness.

A new drug is replaced by its most similar known drug; the substituted pair is
then answered from relation counts collected on the training triplets (pair
table, then the head drug's table, then the global majority).
"""

from __future__ import annotations

import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import MULTILABEL, Dataset, DdiTriplet, DrugSplit, PredictionRecord, TaskSplit
from .errors import DdiShiftError, EmptyTrain, UnknownDrug, UnsatisfiableFraction
from .metrics import MULTICLASS_METRICS, MULTILABEL_METRICS, multiclass_report, multilabel_report
from .simkit import SimilarityMatrix, pairwise_similarity
from .splitkit import SplitRequest, Strategy, make_split
from .taskgen import assemble_tasks, sample_negatives

TASKS = ("S1", "S2")


def _majority(counts: Counter) -> int:
    top = max(counts.values())
    return min(r for r, c in counts.items() if c == top)


@dataclass(frozen=True)
class FrequencyModel:
    pair_table: dict[tuple[str, str], Counter]
    per_drug_table: dict[str, Counter]
    global_counts: Counter
    global_majority: int

    def relation_counts(self, head: str, tail: str) -> Counter:
        """Counts from the most specific table that knows the pair."""
        if (head, tail) in self.pair_table:
            return self.pair_table[(head, tail)]
        if head in self.per_drug_table:
            return self.per_drug_table[head]
        return self.global_counts

    def predict(self, head: str, tail: str) -> int:
        return _majority(self.relation_counts(head, tail))

    def score(self, head: str, tail: str, relation: int) -> float:
        counts = self.relation_counts(head, tail)
        return counts.get(relation, 0) / sum(counts.values())


def fit(train: Iterable[DdiTriplet]) -> FrequencyModel:
    """Count relations per ordered pair, per head drug and overall.

    Multilabel rows with label 0 are ignored.
    """
    pair_table: dict[tuple[str, str], Counter] = {}
    per_drug: dict[str, Counter] = {}
    total: Counter = Counter()
    for t in train:
        if not t.is_positive:
            continue
        pair_table.setdefault((t.head, t.tail), Counter())[t.relation] += 1
        per_drug.setdefault(t.head, Counter())[t.relation] += 1
        total[t.relation] += 1
    if not total:
        raise EmptyTrain("cannot fit the baseline on an empty training set")
    return FrequencyModel(pair_table, per_drug, total, _majority(total))


class Substitution:
    """Maps each new drug to its most similar known drug (ties: smallest id)."""

    def __init__(self, matrix: SimilarityMatrix, drug_split: DrugSplit):
        self.matrix = matrix
        self.split = drug_split
        known_idx = matrix.indices(drug_split.known)
        self._known_idx = known_idx
        self._cache: dict[str, str] = {}

    def __call__(self, drug: str) -> str:
        if drug in self.split.known:
            return drug
        if drug not in self.split.new:
            raise UnknownDrug(f"drug {drug!r} is on neither side of the split")
        hit = self._cache.get(drug)
        if hit is None:
            sims = self.matrix.row(drug)[self._known_idx]
            # indices are sorted by drug id, argmax takes the first maximum
            hit = self.matrix.order[self._known_idx[int(np.argmax(sims))]]
            self._cache[drug] = hit
        return hit


def predict_pair(
    model: FrequencyModel, matrix: SimilarityMatrix, drug_split: DrugSplit, u: str, v: str
) -> int:
    sub = Substitution(matrix, drug_split)
    return model.predict(sub(u), sub(v))


def predict_multiclass(
    model: FrequencyModel, substitute: Substitution, triplets: Sequence[DdiTriplet]
) -> list[PredictionRecord]:
    seen: set[tuple[str, str]] = set()
    out = []
    for t in triplets:
        if t.pair in seen:
            continue
        seen.add(t.pair)
        out.append(PredictionRecord(t.head, t.tail, model.predict(substitute(t.head), substitute(t.tail))))
    return out


def score_multilabel(
    model: FrequencyModel, substitute: Substitution, triplets: Sequence[DdiTriplet]
) -> list[PredictionRecord]:
    return [
        PredictionRecord(
            t.head,
            t.tail,
            t.relation,
            model.score(substitute(t.head), substitute(t.tail), t.relation),
            1 if t.is_positive else 0,
        )
        for t in triplets
    ]


@dataclass(frozen=True)
class RunResult:
    strategy: str
    seed: int
    task_split: TaskSplit
    metrics: dict[str, dict[str, float]]


def run_once(
    dataset: Dataset,
    request: SplitRequest,
    matrix: SimilarityMatrix,
    threshold: float = 0.5,
) -> RunResult:
    split = make_split(dataset, request, matrix)
    tasks = assemble_tasks(dataset, split)
    model = fit(tasks.train)
    substitute = Substitution(matrix, split)
    metrics: dict[str, dict[str, float]] = {}
    for name, test in zip(TASKS, (tasks.s1_test, tasks.s2_test)):
        if dataset.mode == MULTILABEL:
            positives = [t for t in test if t.is_positive]
            if not positives:
                continue
            negatives = sample_negatives(dataset, positives, request.seed, 1, split)
            records = score_multilabel(model, substitute, list(test) + negatives)
            report = multilabel_report(records, threshold)
            if report.aggregate:
                metrics[name] = report.aggregate
        elif test:
            records = predict_multiclass(model, substitute, test)
            metrics[name] = multiclass_report(records, test).aggregate
    return RunResult(request.label, request.seed, tasks, metrics)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


@dataclass
class BenchmarkResult:
    runs: list[RunResult]
    metric_names: tuple[str, ...]

    def summary(self) -> dict[tuple[str, str, str], tuple[float, float]]:
        """(strategy, task, metric) -> (mean, population stddev)."""
        values: dict[tuple[str, str, str], list[float]] = {}
        for run in self.runs:
            for task, row in run.metrics.items():
                for m in self.metric_names:
                    if m in row:
                        values.setdefault((run.strategy, task, m), []).append(row[m])
        return {k: (float(np.mean(v)), float(np.std(v))) for k, v in values.items()}

    def mean(self, strategy: str, task: str, metric: str) -> float:
        return self.summary()[(strategy, task, metric)][0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("strategy,seed,task,metric,value\n")
        for run in self.runs:
            for task in TASKS:
                for m in self.metric_names:
                    if m in run.metrics.get(task, {}):
                        buf.write(f"{run.strategy},{run.seed},{task},{m},{_fmt(run.metrics[task][m])}\n")
        for (strategy, task, m), (mu, sd) in self.summary().items():
            buf.write(f"{strategy},mean,{task},{m},{_fmt(mu)}\n")
            buf.write(f"{strategy},stddev,{task},{m},{_fmt(sd)}\n")
        return buf.getvalue()


def run_benchmark(
    dataset: Dataset,
    strategies: Sequence[SplitRequest],
    seeds: Sequence[int],
    matrix: Optional[SimilarityMatrix] = None,
    threshold: float = 0.5,
) -> BenchmarkResult:
    """Split, assemble, fit and score for every (strategy, seed)."""
    if not strategies or not seeds:
        raise ValueError("need at least one strategy and one seed")
    if matrix is None:
        matrix = pairwise_similarity(dataset.fingerprints)
    runs = []
    for request in strategies:
        for seed in seeds:
            try:
                runs.append(run_once(dataset, request.with_seed(seed), matrix, threshold))
            except DdiShiftError as exc:
                exc.run_tag = (request.label, seed)
                raise
    names = MULTILABEL_METRICS if dataset.mode == MULTILABEL else MULTICLASS_METRICS
    runs.sort(key=lambda r: (r.strategy, r.seed))
    return BenchmarkResult(runs, names)


@dataclass
class SweepResult:
    gammas: list[float]
    groups: dict[float, BenchmarkResult]
    skipped: dict[float, str]

    def mean(self, gamma: float, task: str, metric: str) -> float:
        return self.groups[gamma].mean(f"cluster@{gamma:g}", task, metric)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("gamma,task,metric,mean,stddev\n")
        for g in self.gammas:
            if g not in self.groups:
                continue
            for (_, task, m), (mu, sd) in self.groups[g].summary().items():
                buf.write(f"{_fmt(g)},{task},{m},{_fmt(mu)},{_fmt(sd)}\n")
        return buf.getvalue()


def gamma_sweep(
    dataset: Dataset,
    gamma_values: Sequence[float],
    seeds: Sequence[int],
    new_fraction: float = 0.2,
    fraction_tolerance: float = 0.05,
    matrix: Optional[SimilarityMatrix] = None,
    threshold: float = 0.5,
) -> SweepResult:
    """Cluster-split benchmark per threshold; unsatisfiable thresholds are skipped."""
    for g in gamma_values:
        if not 0.0 <= g <= 1.0 or math.isnan(g):
            raise ValueError(f"gamma must lie in [0, 1], got {g}")
    if matrix is None:
        matrix = pairwise_similarity(dataset.fingerprints)
    groups: dict[float, BenchmarkResult] = {}
    skipped: dict[float, str] = {}
    for g in gamma_values:
        request = SplitRequest(
            Strategy.CLUSTER, new_fraction=new_fraction, gamma0=g, fraction_tolerance=fraction_tolerance
        )
        try:
            groups[g] = run_benchmark(dataset, [request], seeds, matrix, threshold)
        except UnsatisfiableFraction as exc:
            skipped[g] = str(exc)
    return SweepResult(list(gamma_values), groups, skipped)
