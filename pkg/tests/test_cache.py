import logging

import pytest

from brnr import cohomology
from brnr.catalog import abelian_group, dihedral_group
from brnr.cohomology import cohomology_group
from brnr.groups import all_subgroups
from brnr.modules import trivial_module
from db.cache import CacheStore, close_cache, open_cache


@pytest.fixture
def store(tmp_path):
    store = open_cache(tmp_path / "cache")
    yield store
    close_cache()


def h2_of_klein():
    G = abelian_group((2, 2))
    return cohomology_group(G, trivial_module(G, (2,)), 2)


def test_warm_cache_reproduces_cold_results(store):
    cold = h2_of_klein()
    assert store.misses > 0
    assert store.hits == 0
    cohomology.clear_cache()
    warm = h2_of_klein()
    assert store.hits == 1
    assert warm.invariant_factors == cold.invariant_factors == (2, 2, 2)
    assert warm.to_json() == cold.to_json()
    for alpha in cold.generator_classes():
        assert warm.classify(alpha.representative) == alpha.coords


def test_corrupt_entry_is_discarded_and_recomputed(store, caplog):
    h2_of_klein()
    (entry,) = (store.root / "cohomology").glob("*.npz")
    entry.write_bytes(b"not an archive")
    cohomology.clear_cache()
    with caplog.at_level(logging.WARNING):
        again = h2_of_klein()
    assert "corrupt cache entry" in caplog.text
    assert again.invariant_factors == (2, 2, 2)
    assert store.stats() == {"cohomology": 1}


def test_subgroup_lattice_round_trip(store):
    lattice = all_subgroups(dihedral_group(4))
    assert store.stats() == {"subgroups": 1}
    assert store.load_subgroups(dihedral_group(4).canonical_hash) == lattice
    # a fresh group object goes through the store instead of the in-memory memo
    assert all_subgroups(dihedral_group(4)) == lattice
    assert store.hits == 2


def test_stats_and_clear(store):
    h2_of_klein()
    all_subgroups(abelian_group((2, 2)))
    assert store.stats() == {"cohomology": 1, "subgroups": 1}
    assert store.clear() == 2
    assert store.stats() == {}


def test_store_reopens_existing_index(tmp_path):
    first = CacheStore(tmp_path)
    first.save_subgroups("abc", [(0,), (0, 1)])
    second = CacheStore(tmp_path)
    assert second.load_subgroups("abc") == [(0,), (0, 1)]
    assert second.load_subgroups("missing") is None
    assert second.misses == 1
