import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddishift.core import Fingerprint
from ddishift.errors import UnknownDrug, WidthMismatch
from ddishift.simkit import (
    load_matrix,
    max_cross_similarity,
    pairwise_similarity,
    save_matrix,
    tanimoto,
    tanimoto_exact,
)

import oracles
from helpers import random_prints

fingerprints = st.integers(1, 8).flatmap(
    lambda nbytes: st.tuples(st.binary(min_size=nbytes, max_size=nbytes), st.binary(min_size=nbytes, max_size=nbytes))
)


def fp(indices, width=8):
    return Fingerprint.from_indices(indices, width)


def test_identity_and_disjoint():
    a = fp([0, 5])
    assert tanimoto(a, a) == 1.0
    assert tanimoto(a, fp([1, 2])) == 0.0


def test_index_set_example():
    a, b = fp([0, 2, 3]), fp([0, 3, 4])
    assert oracles.tanimoto_sets({0, 2, 3}, {0, 3, 4}) == pytest.approx(0.5)
    assert tanimoto(a, b) == 0.5


def test_all_zero_pair_is_zero_with_warning():
    z = fp([])
    with pytest.warns(RuntimeWarning):
        assert tanimoto(z, z) == 0.0


def test_width_mismatch():
    with pytest.raises(WidthMismatch):
        tanimoto(fp([1], 8), fp([1], 16))


@settings(max_examples=300)
@given(fingerprints)
def test_symmetric_bounded_and_exact(pair):
    a, b = (Fingerprint(x, 8 * len(x)) for x in pair)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        s = tanimoto(a, b)
        assert s == tanimoto(b, a)
    assert 0.0 <= s <= 1.0
    expected = oracles.tanimoto_sets(set(a.indices()), set(b.indices()))
    assert tanimoto_exact(a, b) == expected
    assert s == float(expected)


def test_pairwise_single_drug():
    m = pairwise_similarity({"a": fp([1])})
    assert m.n == 1
    assert len(m.values) == 0


def test_pairwise_three_drugs_matches_direct():
    prints = {"c": fp([0, 1]), "a": fp([0, 2, 3]), "b": fp([0, 3, 4])}
    m = pairwise_similarity(prints)
    assert m.order == ("a", "b", "c")
    assert len(m.values) == 3
    for k, (u, v) in enumerate(itertools.combinations(m.order, 2)):
        assert m.values[k] == np.float32(tanimoto(prints[u], prints[v]))
        assert m.exact(u, v) == tanimoto_exact(prints[u], prints[v])


def test_pairwise_random_against_oracle():
    prints = random_prints(40, width=96, density=0.25, seed=7)
    m = pairwise_similarity(prints, block=7)  # odd block size exercises the tiling
    sets = {d: set(f.indices()) for d, f in prints.items()}
    for u, v in itertools.combinations(sorted(prints), 2):
        assert m.exact(u, v) == oracles.tanimoto_sets(sets[u], sets[v])
        assert m.exact(v, u) == m.exact(u, v)


def test_row_and_diagonal():
    prints = random_prints(15, seed=2)
    prints["zero"] = fp([], 64)
    m = pairwise_similarity(prints)
    for d in ("D003", "zero"):
        row = m.row(d)
        for j, other in enumerate(m.order):
            assert row[j] == float(m.exact(d, other))
    assert m.row("D003")[m.index("D003")] == 1.0
    assert m.row("zero")[m.index("zero")] == 0.0


def test_max_cross_similarity_identical_and_disjoint():
    prints = {"a": fp([1, 2]), "b": fp([5]), "c": fp([1, 2])}
    m = pairwise_similarity(prints)
    assert max_cross_similarity(m, {"a", "b"}, {"c"}) == 1.0
    disjoint = {"a": fp([0]), "b": fp([1]), "c": fp([2])}
    assert max_cross_similarity(pairwise_similarity(disjoint), {"a"}, {"b", "c"}) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_max_cross_similarity_brute_force(seed):
    prints = random_prints(10, width=32, density=0.4, seed=seed)
    m = pairwise_similarity(prints)
    rng = np.random.default_rng(seed)
    drugs = sorted(prints)
    new = set(rng.choice(drugs, size=4, replace=False).tolist())
    known = set(drugs) - new
    sets = {d: set(f.indices()) for d, f in prints.items()}
    expected = oracles.max_cross(sets, known, new)
    assert max_cross_similarity(m, known, new) == float(expected)
    assert max_cross_similarity(m, known, new) <= m.global_max()


def test_max_cross_unknown_drug():
    m = pairwise_similarity({"a": fp([1]), "b": fp([2])})
    with pytest.raises(UnknownDrug):
        max_cross_similarity(m, {"a"}, {"zz"})


def test_cache_roundtrip(tmp_path):
    m = pairwise_similarity(random_prints(25, seed=4))
    save_matrix(m, tmp_path / "sim.bin")
    back = load_matrix(tmp_path / "sim.bin")
    assert back.order == m.order and back.width == m.width
    assert np.array_equal(back.values, m.values)
    assert np.array_equal(back.intersections, m.intersections)
    assert np.array_equal(back.popcounts, m.popcounts)
