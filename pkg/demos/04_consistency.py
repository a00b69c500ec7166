"""
Agreement with approval time
============================

A scheme pays |year - threshold| for every dated drug it puts on the wrong
side of the approval threshold.  The consistency index divides the worst
penalty by each scheme's own, so higher is better.
"""

from ddishift.consistency import consistency_sweep, format_index, sweep_to_csv
from ddishift.simkit import pairwise_similarity
from ddishift.splitkit import SplitRequest, make_split
from ddishift.synth import SynthConfig, make_time_correlated

ds = make_time_correlated(SynthConfig(seed=3))
m = pairwise_similarity(ds.fingerprints)

schemes = {
    "random": make_split(ds, SplitRequest("random", seed=0)),
    "frequency": make_split(ds, SplitRequest("frequency", seed=0)),
    "cluster": make_split(ds, SplitRequest("cluster", gamma0=0.3, seed=0), m),
}
results = consistency_sweep(schemes, ds.approval_years, [1990, 2000, 2010, 2020, 2025])
for res in results:
    row = "  ".join(f"{name}={format_index(score.index)}" for name, score in res.per_scheme.items())
    print(res.threshold_year, row)

# The same table as CSV, ready for plotting.
print(sweep_to_csv(results[:1]))
