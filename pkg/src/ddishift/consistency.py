"""Agreement between drug split schemes and the approval-time split.

At threshold year ``y_t`` the realistic split puts drugs approved before
``y_t`` on the known side and the rest on the new side.  A scheme pays
``|y_u - y_t|`` for every drug it places on the other side; its consistency
index is the largest penalty among the compared schemes divided by its own.
A zero-penalty scheme gets :data:`PERFECT`.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .core import DrugSplit
from .errors import NoApprovalData

PERFECT = math.inf

Schemes = Union[Mapping[str, DrugSplit], Sequence[tuple[str, DrugSplit]]]


@dataclass(frozen=True)
class SchemeScore:
    penalty: float
    index: float

    @property
    def perfect(self) -> bool:
        return self.index == PERFECT


@dataclass(frozen=True)
class ConsistencyResult:
    per_scheme: dict[str, SchemeScore]
    threshold_year: int
    evaluated_drug_count: int

    def index(self, scheme: str) -> float:
        return self.per_scheme[scheme].index

    def penalty(self, scheme: str) -> float:
        return self.per_scheme[scheme].penalty


def _items(schemes: Schemes) -> list[tuple[str, DrugSplit]]:
    items = list(schemes.items()) if isinstance(schemes, Mapping) else list(schemes)
    names = [n for n, _ in items]
    if len(set(names)) != len(names):
        raise ValueError("scheme names must be unique")
    return items


def split_penalty(split: DrugSplit, approval_years: Mapping[str, int], threshold_year: int) -> int:
    penalty = 0
    for drug in split.known:
        y = approval_years.get(drug)
        if y is not None and y >= threshold_year:
            penalty += y - threshold_year
    for drug in split.new:
        y = approval_years.get(drug)
        if y is not None and y < threshold_year:
            penalty += threshold_year - y
    return penalty


def consistency_index(
    schemes: Schemes, approval_years: Mapping[str, int], threshold_year: int
) -> ConsistencyResult:
    items = _items(schemes)
    if not items:
        raise ValueError("need at least one split scheme")
    if not approval_years:
        raise NoApprovalData("consistency index needs approval years")
    lo, hi = min(approval_years.values()), max(approval_years.values())
    if not lo <= threshold_year <= hi:
        raise ValueError(f"threshold year {threshold_year} outside approval range {lo}-{hi}")
    penalties = {name: split_penalty(s, approval_years, threshold_year) for name, s in items}
    worst = max(penalties.values())
    per_scheme = {
        name: SchemeScore(float(p), worst / p if p > 0 else PERFECT) for name, p in penalties.items()
    }
    covered = set().union(*(s.drugs for _, s in items))
    evaluated = sum(1 for d in covered if d in approval_years)
    return ConsistencyResult(per_scheme, threshold_year, evaluated)


def consistency_sweep(
    schemes: Schemes, approval_years: Mapping[str, int], year_range: Iterable[int]
) -> list[ConsistencyResult]:
    years = list(year_range)
    if not years:
        raise ValueError("year_range is empty")
    items = _items(schemes)
    return [consistency_index(items, approval_years, y) for y in years]


def format_index(value: float) -> str:
    return "perfect" if value == PERFECT else f"{value:.6f}"


def sweep_to_csv(results: Sequence[ConsistencyResult]) -> str:
    buf = io.StringIO()
    buf.write("threshold_year,scheme,penalty,index\n")
    for res in results:
        for name, score in res.per_scheme.items():
            buf.write(f"{res.threshold_year},{name},{score.penalty:.6f},{format_index(score.index)}\n")
    return buf.getvalue()
