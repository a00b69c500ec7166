from collections import Counter

import numpy as np
import pytest

from ddishift.baseline import (
    Substitution,
    fit,
    gamma_sweep,
    predict_pair,
    run_benchmark,
    run_once,
)
from ddishift.core import MULTILABEL, DdiTriplet, DrugSplit, Fingerprint
from ddishift.errors import EmptyTrain, UnknownDrug
from ddishift.simkit import pairwise_similarity
from ddishift.splitkit import SplitRequest
from ddishift.synth import SynthConfig, make_time_correlated

from helpers import random_dataset


def fp(*bits):
    return Fingerprint.from_indices(bits, 16)


def test_fit_single_triplet():
    assert fit([DdiTriplet("a", 5, "b")]).global_majority == 5


def test_fit_tie_goes_to_smallest_relation():
    model = fit([DdiTriplet("a", 7, "b"), DdiTriplet("a", 3, "c")])
    assert model.global_majority == 3
    assert model.predict("a", "zz") == 3


def test_fit_empty_and_negatives_only():
    with pytest.raises(EmptyTrain):
        fit([])
    with pytest.raises(EmptyTrain):
        fit([DdiTriplet("a", 1, "b", 0)])


def test_fit_tables_match_recount():
    ds = random_dataset(50, 1000, n_relations=6, seed=9)
    model = fit(ds.triplets)
    for (h, t), counts in model.pair_table.items():
        assert counts == Counter(x.relation for x in ds.triplets if (x.head, x.tail) == (h, t))
    for d in ds.drugs[:10]:
        assert model.per_drug_table.get(d, Counter()) == Counter(x.relation for x in ds.triplets if x.head == d)
    assert model.global_counts == Counter(x.relation for x in ds.triplets)


def five_drug_world():
    prints = {
        "k1": fp(0, 1, 2), "k2": fp(4, 5, 6), "k3": fp(8, 9),
        "n1": fp(0, 1, 2),  # copy of k1
        "n2": fp(4, 5, 7),  # closest to k2 (1/2)
    }
    train = [
        DdiTriplet("k1", 2, "k2"), DdiTriplet("k1", 2, "k2"), DdiTriplet("k1", 4, "k2"),
        DdiTriplet("k2", 6, "k3"), DdiTriplet("k3", 1, "k1"), DdiTriplet("k3", 1, "k2"),
    ]
    split = DrugSplit(known={"k1", "k2", "k3"}, new={"n1", "n2"}, strategy="random")
    return pairwise_similarity(prints), split, fit(train)


def test_five_drug_manual_lookup():
    m, split, model = five_drug_world()
    sub = Substitution(m, split)
    assert sub("n1") == "k1" and sub("n2") == "k2"
    assert predict_pair(model, m, split, "n1", "k2") == 2  # pair table k1->k2
    assert predict_pair(model, m, split, "n1", "n2") == 2  # substituted to k1->k2
    assert predict_pair(model, m, split, "n2", "k1") == 6  # no (k2, k1) pair, k2 head table
    assert predict_pair(model, m, split, "k3", "n1") == 1  # pair table k3->k1


def test_identical_fingerprint_behaves_as_known_drug():
    m, split, model = five_drug_world()
    for other in ("k2", "k3"):
        assert predict_pair(model, m, split, "n1", other) == model.predict("k1", other)


def test_fallback_to_global_majority():
    prints = {"a": fp(0), "b": fp(1), "c": fp(2), "n": fp(2, 3)}
    m = pairwise_similarity(prints)
    split = DrugSplit(known={"a", "b", "c"}, new={"n"}, strategy="random")
    model = fit([DdiTriplet("a", 9, "b"), DdiTriplet("a", 9, "c"), DdiTriplet("b", 1, "a")])
    # n -> c, and c never appears as a head
    assert predict_pair(model, m, split, "n", "a") == model.global_majority == 9


def test_substitution_ties_by_id():
    prints = {"b": fp(0), "a": fp(0), "n": fp(0, 1)}
    split = DrugSplit(known={"a", "b"}, new={"n"}, strategy="random")
    assert Substitution(pairwise_similarity(prints), split)("n") == "a"


def test_unknown_drug():
    m, split, model = five_drug_world()
    with pytest.raises(UnknownDrug):
        predict_pair(model, m, DrugSplit(known={"k1", "k2"}, new={"n1"}, strategy="random"), "k3", "k1")


@pytest.fixture(scope="module")
def small_world():
    ds = make_time_correlated(SynthConfig(n_drugs=120, n_triplets=600, seed=3))
    return ds, pairwise_similarity(ds.fingerprints)


def test_benchmark_one_run(small_world):
    ds, m = small_world
    result = run_benchmark(ds, [SplitRequest("random")], [0], m)
    assert len(result.runs) == 1
    assert set(result.runs[0].metrics) == {"S1", "S2"}
    lines = result.to_csv().splitlines()
    assert lines[0] == "strategy,seed,task,metric,value"
    assert any(line.startswith("random,mean,S1,macro_f1,") for line in lines)


def test_benchmark_population_stddev(small_world):
    ds, m = small_world
    result = run_benchmark(ds, [SplitRequest("random")], [0, 1, 2], m)
    values = [r.metrics["S1"]["macro_f1"] for r in result.runs]
    mean, sd = result.summary()[("random", "S1", "macro_f1")]
    assert mean == pytest.approx(np.mean(values))
    assert sd == pytest.approx(np.std(values, ddof=0))


def test_benchmark_deterministic(small_world):
    ds, m = small_world
    reqs = [SplitRequest("random"), SplitRequest("cluster", gamma0=0.3)]
    assert run_benchmark(ds, reqs, [0, 1], m).to_csv() == run_benchmark(ds, reqs, [0, 1], m).to_csv()


def test_benchmark_tags_failing_run(small_world):
    ds, m = small_world
    with pytest.raises(Exception) as err:
        run_benchmark(ds, [SplitRequest("time", threshold_year=1900)], [4], m)
    assert err.value.run_tag == ("time@1900", 4)


def test_multilabel_run(small_world):
    ds = make_time_correlated(SynthConfig(n_drugs=120, n_triplets=600, seed=3, mode=MULTILABEL))
    res = run_once(ds, SplitRequest("random", seed=1), pairwise_similarity(ds.fingerprints))
    assert {"roc_auc", "pr_auc", "accuracy"} <= set(res.metrics["S1"])
    for value in res.metrics["S1"].values():
        assert 0.0 <= value <= 1.0


def test_gamma_sweep_order_and_no_edge_case(small_world):
    ds, m = small_world
    sweep = gamma_sweep(ds, [0.8, 0.5, 0.2], [0], matrix=m)
    assert sweep.gammas == [0.8, 0.5, 0.2]
    assert set(sweep.groups) | set(sweep.skipped) == {0.8, 0.5, 0.2}
    # every pair is below 1.0, so gamma 1.0 means singleton clusters
    one = gamma_sweep(ds, [1.0], [0], matrix=m)
    assert one.groups[1.0].runs[0].task_split.drug_split.cluster_count == len(ds.drugs)
    rows = sweep.to_csv().splitlines()
    assert rows[0] == "gamma,task,metric,mean,stddev"
    with pytest.raises(ValueError):
        gamma_sweep(ds, [1.5], [0], matrix=m)
