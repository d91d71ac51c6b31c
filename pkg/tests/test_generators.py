from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from quasikernels.digraph import serialize_digraph
from quasikernels.errors import InvalidInputError, ResourceLimitError
from quasikernels.generators import (
    check_dag_partition,
    count_digraphs,
    digraph_from_code,
    digraph_hash,
    enumerate_digraphs,
    instance_rng,
    iter_digraphs,
    random_dag_partitioned,
    random_digraph,
    random_indeg_le_3,
    random_semicomplete,
    random_sink_free,
    random_sink_free_semicomplete,
    random_split,
    random_tournament,
)
from quasikernels.recognition import is_semicomplete, is_tournament, recognize_one_way_split

# sink-free labeled digraphs on 3 vertices, counted by hand: each vertex picks a
# non-empty subset of the other two as out-neighbours, 3 choices each
SINK_FREE_N3 = 27


@pytest.mark.parametrize("n, total, sink_free", [(0, 1, 1), (1, 1, 0), (2, 4, 1), (3, 64, SINK_FREE_N3)])
def test_small_counts(n, total, sink_free):
    assert enumerate_digraphs(n, False, lambda d: None) == total == count_digraphs(n)
    assert enumerate_digraphs(n, True, lambda d: None) == sink_free


def test_n4_counts_match_formula():
    # every vertex independently chooses a non-empty out-set among n-1 others
    assert enumerate_digraphs(4, True, lambda d: None) == (2**3 - 1) ** 4


def test_enumeration_is_exhaustive_and_distinct():
    seen = set()
    enumerate_digraphs(3, False, lambda d: seen.add(frozenset(d.arcs)))
    assert len(seen) == 64
    assert sum(1 for _ in iter_digraphs(4)) == 4096


def test_digon_is_the_only_sink_free_pair():
    found = []
    enumerate_digraphs(2, True, found.append)
    assert [set(d.arcs) for d in found] == [{(0, 1), (1, 0)}]


def test_enumeration_limit():
    with pytest.raises(ResourceLimitError):
        next(iter_digraphs(6))


@given(st.integers(0, 4), st.data())
def test_code_ranges_agree_with_full_enumeration(n, data):
    total = count_digraphs(n)
    start = data.draw(st.integers(0, total))
    stop = data.draw(st.integers(start, total))
    chunk = list(iter_digraphs(n, False, start, stop))
    assert [c for c, _ in chunk] == list(range(start, stop))
    for code, d in chunk[:20]:
        assert d == digraph_from_code(n, code)


def test_instance_rng_is_stable():
    a = [instance_rng(7, i).random() for i in range(5)]
    b = [instance_rng(7, i).random() for i in range(5)]
    assert a == b and len(set(a)) == 5
    assert instance_rng(7, 0).random() != instance_rng(8, 0).random()


def test_fixed_seed_gives_identical_bytes():
    one = serialize_digraph(random_digraph(12, 0.3, instance_rng(1, 4)))
    two = serialize_digraph(random_digraph(12, 0.3, instance_rng(1, 4)))
    assert one == two
    assert digraph_hash(random_digraph(12, 0.3, instance_rng(1, 4))) == digraph_hash(random_digraph(12, 0.3, instance_rng(1, 4)))


@given(st.integers(1, 15), st.integers(0, 10**6))
def test_family_contracts(n, seed):
    rng = random.Random(seed)
    assert is_tournament(random_tournament(n, rng))
    assert is_semicomplete(random_semicomplete(n, rng))
    if n >= 2:
        assert all(random_sink_free(n, 0.1, rng).out_adj)
        d = random_indeg_le_3(n, 0.5, rng)
        assert all(d.out_adj) and max(len(a) for a in d.in_adj) <= 3
        d = random_sink_free_semicomplete(n, rng)
        assert is_semicomplete(d) and all(d.out_adj)
    if n >= 3:
        d = random_sink_free_semicomplete(n, rng, tournament=True)
        assert is_tournament(d) and all(d.out_adj)
    d, v1, v2 = random_dag_partitioned(n, 0.5, rng)
    assert v1 | v2 == set(range(n)) and check_dag_partition(d, v1, v2)
    d, x, y = random_split(n, 2 + n % 5, 0.3, rng)
    assert recognize_one_way_split(d) is not None and all(d.out_adj)


def test_generator_argument_checks():
    rng = random.Random(0)
    with pytest.raises(InvalidInputError):
        random_digraph(3, 1.5, rng)
    with pytest.raises(InvalidInputError):
        random_sink_free(1, 0.5, rng)
    with pytest.raises(InvalidInputError):
        random_split(2, 1, 0.5, rng)
    with pytest.raises(InvalidInputError):
        random_split(2, 3, 0.0, rng)
    with pytest.raises(InvalidInputError):
        random_sink_free_semicomplete(2, rng, tournament=True)
