"""Random data builders shared by the test modules."""

import numpy as np

from ddishift.core import Dataset, DdiTriplet, Fingerprint


def random_prints(n, width=64, density=0.3, seed=0, prefix="D"):
    rng = np.random.default_rng(seed)
    return {
        f"{prefix}{i:03d}": Fingerprint(np.packbits(rng.random(width) < density).tobytes(), width)
        for i in range(n)
    }


def random_dataset(n_drugs, n_triplets, n_relations=4, seed=0, width=64, density=0.3):
    rng = np.random.default_rng(seed)
    prints = random_prints(n_drugs, width, density, seed)
    drugs = sorted(prints)
    seen = set()
    triplets = []
    while len(triplets) < n_triplets:
        a, b = rng.integers(n_drugs, size=2)
        r = int(rng.integers(n_relations))
        t = DdiTriplet(drugs[a], r, drugs[b])
        if a == b or t in seen:
            continue
        seen.add(t)
        triplets.append(t)
    return Dataset(drugs=tuple(drugs), triplets=tuple(triplets), fingerprints=prints)
