import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddishift.consistency import PERFECT, consistency_index, consistency_sweep, split_penalty, sweep_to_csv
from ddishift.core import DrugSplit
from ddishift.errors import NoApprovalData

YEARS = {"a": 1980, "b": 1990, "c": 2005, "d": 2010}


def split(known, new):
    return DrugSplit(known=set(known), new=set(new), strategy="random")


def test_realistic_scheme_is_perfect():
    res = consistency_index({"real": split("ab", "cd"), "bad": split("cd", "ab")}, YEARS, 2000)
    assert res.penalty("real") == 0
    assert res.index("real") == PERFECT
    assert res.index("bad") == 1.0


def test_single_misplaced_drug_penalty():
    # b (1990) on the new side at threshold 2000 costs |1990 - 2000|
    assert split_penalty(split("acd", "b"), {"b": 1990}, 2000) == 10


def test_hand_example_two_schemes():
    # scheme one misplaces b (10 years), scheme two misplaces c (5 years)
    res = consistency_index({"one": split("a", "bcd"), "two": split("abc", "d")}, YEARS, 2000)
    assert (res.penalty("one"), res.penalty("two")) == (10, 5)
    assert (res.index("one"), res.index("two")) == (1.0, 2.0)


def test_boundary_year_counts_as_new():
    years = {"a": 1990, "b": 2000}
    assert split_penalty(split("a", "b"), years, 2000) == 0
    assert split_penalty(split("b", "a"), years, 2000) == 10


def test_missing_years_contribute_nothing():
    with_x = consistency_index({"s": split("abx", "cd"), "t": split("a", "bcdx")}, YEARS, 2000)
    assert with_x.evaluated_drug_count == 4
    assert with_x.penalty("s") == 0 and with_x.penalty("t") == 10


def test_errors():
    with pytest.raises(NoApprovalData):
        consistency_index({"s": split("a", "b")}, {}, 2000)
    with pytest.raises(ValueError):
        consistency_index({"s": split("a", "b")}, YEARS, 1900)
    with pytest.raises(ValueError):
        consistency_index({}, YEARS, 2000)


@settings(max_examples=60)
@given(st.lists(st.lists(st.booleans(), min_size=8, max_size=8), min_size=2, max_size=6), st.integers(1981, 2015))
def test_index_properties(assignments, year):
    drugs = [f"d{i}" for i in range(8)]
    years = {d: 1980 + 5 * i for i, d in enumerate(drugs)}
    schemes = []
    for k, bits in enumerate(assignments):
        new = {d for d, b in zip(drugs, bits) if b}
        if not new or len(new) == len(drugs):
            continue
        schemes.append((f"s{k}", split(set(drugs) - new, new)))
    if not schemes:
        return
    res = consistency_index(schemes, years, year)
    scores = list(res.per_scheme.values())
    if all(s.penalty > 0 for s in scores):
        assert min(s.index for s in scores) == 1.0
    for x in scores:
        for y in scores:
            if x.penalty > y.penalty:
                assert x.index <= y.index
    # adding an undated drug to every scheme changes nothing
    padded = [(n, split(s.known | {"undated"}, s.new)) for n, s in schemes]
    assert consistency_index(padded, years, year).per_scheme == res.per_scheme


def test_sweep_rows_and_csv():
    schemes = {"s": split("ab", "cd"), "t": split("abc", "d")}
    years = {f"y{k}": 1980 + k for k in range(41)} | YEARS
    results = consistency_sweep(schemes, years, range(1980, 2021, 5))
    assert len(results) == 9
    assert results[0].per_scheme == consistency_index(schemes, years, 1980).per_scheme
    text = sweep_to_csv(results[:1])
    assert text.splitlines()[0] == "threshold_year,scheme,penalty,index"
    single = consistency_sweep(schemes, YEARS, [2000])
    assert len(single) == 1 and single[0] == consistency_index(schemes, YEARS, 2000)


def test_perfect_serialized():
    res = consistency_index({"real": split("ab", "cd"), "bad": split("cd", "ab")}, YEARS, 2000)
    assert "real,0.000000,perfect" in sweep_to_csv([res])
    assert math.isinf(res.index("real"))


def test_cluster_beats_random_on_time_correlated_data(synthetic, synthetic_matrix):
    from ddishift.splitkit import SplitRequest, cluster_split, random_split

    schemes = {
        "cluster": cluster_split(synthetic, synthetic_matrix, SplitRequest("cluster", gamma0=0.3, seed=0)),
        "random": random_split(synthetic, SplitRequest("random", seed=0)),
    }
    for res in consistency_sweep(schemes, synthetic.approval_years, [1990, 2000, 2010, 2020, 2025]):
        assert res.index("cluster") >= res.index("random")
