"""
Fingerprint similarity
======================

Tanimoto similarity on packed bit fingerprints, first for one pair and then
for a whole drug set at once.
"""

import numpy as np

from ddishift.core import Fingerprint
from ddishift.simkit import max_cross_similarity, pairwise_similarity, tanimoto, tanimoto_exact

# Bits {0, 2, 3} against {0, 3, 4}: two shared bits out of four set overall.
a = Fingerprint.from_indices([0, 2, 3], 8)
b = Fingerprint.from_indices([0, 3, 4], 8)
print("S(a, b) =", tanimoto(a, b), "exactly", tanimoto_exact(a, b))

# Fingerprints can also be read from hex, the on-disk format.
c = Fingerprint.from_hex("b0")
print("c has bits", c.indices(), "and S(a, c) =", tanimoto(a, c))

# For many drugs use the pairwise engine.  It keeps the upper triangle as
# float32 plus exact integer intersections, so any entry can be recovered as
# a rational number.
rng = np.random.default_rng(0)
prints = {
    f"DB{i:03d}": Fingerprint(np.packbits(rng.random(256) < 0.2).tobytes(), 256)
    for i in range(500)
}
m = pairwise_similarity(prints)
print(f"{m.n} drugs, {len(m.values)} pairs, global max {m.global_max():.3f}")
print("DB001 vs DB002:", m.similarity("DB001", "DB002"), "=", m.exact("DB001", "DB002"))

# The largest similarity across two groups is what a split tries to cap.
left, right = set(m.order[:250]), set(m.order[250:])
print("max cross similarity:", max_cross_similarity(m, left, right))
