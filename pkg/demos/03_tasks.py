"""
Train, S1 and S2 sets
=====================

Once drugs are split, each interaction lands in exactly one place: both
drugs known (train), one new (S1), or both new (S2).
"""

from ddishift.core import MULTILABEL
from ddishift.splitkit import SplitRequest, make_split
from ddishift.synth import SynthConfig, make_time_correlated
from ddishift.taskgen import assemble_tasks, carve_validation, dataset_stats, sample_negatives

ds = make_time_correlated(SynthConfig(seed=2, mode=MULTILABEL))
print("drugs, types, interactions:", dataset_stats(ds).counts)

split = make_split(ds, SplitRequest("cluster", gamma0=0.4, seed=0))
tasks = assemble_tasks(ds, split)
print(f"train {len(tasks.train)}, S1 {len(tasks.s1_test)}, S2 {len(tasks.s2_test)}")
assert len(tasks) == len(ds.triplets)

# Hold out part of train for model selection.  Test sets are untouched.
tasks, valid = carve_validation(tasks, 0.1, seed=0)
print(f"after carving: train {len(tasks.train)}, valid {len(valid)}")

# Multilabel evaluation needs negatives.  Sampled pairs keep the S1 shape:
# one endpoint known, the other new.
negatives = sample_negatives(ds, tasks.s1_test, seed=0, drug_split=split)
print("first negatives:", negatives[:3])
