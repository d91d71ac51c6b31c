from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

import oracles
from strategies import digraphs
from quasikernels.digraph import Digraph, in_neighborhood, mask_of
from quasikernels.errors import InvalidInputError
from quasikernels.generators import random_indeg_le_3, random_split
from quasikernels.qk import quasi_kernel_cl
from quasikernels.recognition import (
    ForbiddenWitness,
    find_forbidden,
    greedy_acyclic_partition,
    has_odd_directed_cycle,
    is_dag,
    is_dag_mask,
    is_semicomplete,
    is_tournament,
    matching_decomposition,
    max_matching,
    recognize_one_way_split,
    strong_components,
    verify_witness,
)
from quasikernels.split import construct_d_k, construct_dstar

C3 = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
DIGON = Digraph.from_arcs(2, [(0, 1), (1, 0)])


def test_semicomplete_and_tournament():
    assert is_tournament(C3) and is_semicomplete(C3)
    assert is_semicomplete(DIGON) and not is_tournament(DIGON)
    assert not is_semicomplete(construct_dstar())


def test_anti_claw_pattern():
    d = Digraph.from_arcs(4, [(0, 3), (1, 3), (2, 3)])
    w = find_forbidden(d, "anti_claw")
    assert w == ForbiddenWitness("anti_claw", 3, (0, 1, 2))
    assert verify_witness(d, w)


def test_k41_plus_pattern():
    d = Digraph.from_arcs(5, [(0, 4), (1, 4), (2, 4), (3, 4), (2, 3)])
    w = find_forbidden(d, "k41_plus")
    assert w.center == 4 and w.tails == (0, 1, 2, 3) and w.extra_arc == (2, 3)
    assert find_forbidden(d, "k41") is None


def test_unknown_kind():
    with pytest.raises(InvalidInputError):
        find_forbidden(C3, "claw")


def test_verify_witness_rejects_bad_claims():
    d = Digraph.from_arcs(4, [(0, 3), (1, 3), (2, 3), (0, 1)])
    assert not verify_witness(d, ForbiddenWitness("anti_claw", 3, (0, 1, 2)))
    d2 = Digraph.from_arcs(4, [(0, 3), (1, 3), (2, 3), (3, 0)])
    assert not verify_witness(d2, ForbiddenWitness("anti_claw", 3, (0, 1, 2)))
    d3 = Digraph.from_arcs(4, [(0, 3), (1, 3), (2, 3)])
    assert not verify_witness(d3, ForbiddenWitness("anti_claw", 3, (0, 1, 1)))
    assert not verify_witness(d3, ForbiddenWitness("k41", 3, (0, 1, 2)))


@given(st.integers(3, 9), st.integers(0, 10**6))
def test_tournaments_are_anti_claw_free(n, seed):
    rng = random.Random(seed)
    arcs = [(i, j) if rng.random() < 0.5 else (j, i) for i in range(n) for j in range(i + 1, n)]
    assert find_forbidden(Digraph.from_arcs(n, arcs), "anti_claw") is None


@given(digraphs(max_n=6))
def test_forbidden_search_matches_brute_force(d):
    arcs = list(d.arcs)
    for kind, tails, extra in (("anti_claw", 3, 0), ("k41", 4, 0), ("k41_plus", 4, 1)):
        w = find_forbidden(d, kind)
        assert (w is not None) == oracles.has_induced_star(d.n, arcs, tails, extra)
        if w is not None:
            assert verify_witness(d, w)


@given(st.integers(2, 25), st.integers(0, 10**6))
def test_in_degree_three_has_no_k41(n, seed):
    d = random_indeg_le_3(n, 0.3, random.Random(seed))
    assert max(len(a) for a in d.in_adj) <= 3
    assert find_forbidden(d, "k41") is None and find_forbidden(d, "k41_plus") is None


@pytest.mark.parametrize(
    "arcs, left, right, size",
    [
        ([(0, 1), (0, 2)], {0}, {1, 2}, 1),
        ([(0, 2), (1, 2)], {0, 1}, {2, 3}, 1),
        ([(0, 2), (0, 3), (1, 2)], {0, 1}, {2, 3}, 2),
    ],
)
def test_max_matching_examples(arcs, left, right, size):
    d = Digraph.from_arcs(4, arcs)
    m = max_matching(d, left, right)
    assert len(m) == size
    assert len({u for u, _ in m}) == len({v for _, v in m}) == size


def test_max_matching_needs_disjoint_sides():
    with pytest.raises(InvalidInputError):
        max_matching(C3, {0, 1}, {1})


@given(digraphs(max_n=8), st.data())
def test_max_matching_is_maximum(d, data):
    side = data.draw(st.lists(st.booleans(), min_size=d.n, max_size=d.n))
    left = {v for v in range(d.n) if side[v]}
    right = set(range(d.n)) - left
    m = max_matching(d, left, right)
    assert all(d.has_arc(u, v) and u in left and v in right for u, v in m)
    assert len({u for u, _ in m}) == len({v for _, v in m}) == len(m)
    assert len(m) == oracles.matching_size(list(d.arcs), left, right)


def test_matching_decomposition_examples():
    d = Digraph.from_arcs(4, [(0, 2), (0, 3), (2, 0), (3, 0)])
    dec = matching_decomposition(d, {2, 3})
    assert len(dec.m) == 1 and dec.a == {3}
    dec = matching_decomposition(C3, {1})
    assert dec.m == {(0, 1)} and dec.a == frozenset()
    sources = Digraph.empty(3)
    dec = matching_decomposition(sources, {0, 1})
    assert not dec.m and dec.a == {0, 1}
    with pytest.raises(InvalidInputError):
        matching_decomposition(C3, {0, 1})


@given(digraphs(max_n=8))
def test_matching_decomposition_invariants(d):
    for q in (quasi_kernel_cl(d), frozenset(v for v in range(d.n) if not d.in_adj[v] and not d.out_adj[v])):
        dec = matching_decomposition(d, q)
        assert len(dec.m1) == len(dec.m2) == len(dec.m)
        assert dec.m1 <= q and dec.m2 <= in_neighborhood(d, q)
        assert dec.a == q - dec.m1
        assert in_neighborhood(d, q) == in_neighborhood(d, dec.m1) - q
        assert len(dec.m) == oracles.matching_size(list(d.arcs), in_neighborhood(d, q), q)


def test_recognize_one_way_split_examples():
    x, y = recognize_one_way_split(construct_d_k(1))
    assert x == set(range(3, 9)) and y == {0, 1, 2}
    assert recognize_one_way_split(C3) == (frozenset(), frozenset(range(3)))
    path = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    assert recognize_one_way_split(path) == ({0}, {1, 2})
    assert recognize_one_way_split(construct_dstar()) is None


@given(st.integers(0, 8), st.integers(2, 8), st.floats(0.05, 1.0), st.integers(0, 10**6))
def test_random_split_is_recognized(nx, ny, p, seed):
    d, x, y = random_split(nx, ny, p, random.Random(seed))
    found = recognize_one_way_split(d)
    assert found is not None
    # a source of the semicomplete part may move to X in the canonical partition
    assert x <= found[0] and found[1] <= y
    assert all(d.out_adj)


def test_odd_cycles_and_dags():
    assert has_odd_directed_cycle(C3)
    assert not has_odd_directed_cycle(DIGON)
    dag = Digraph.from_arcs(3, [(0, 1), (1, 2), (0, 2)])
    assert is_dag(dag) and not has_odd_directed_cycle(dag)
    assert not is_dag(C3)


@given(digraphs(max_n=7))
def test_cycle_structure_matches_brute_force(d):
    arcs = list(d.arcs)
    assert has_odd_directed_cycle(d) == oracles.has_odd_cycle(d.n, arcs)
    assert is_dag(d) == oracles.is_acyclic(d.n, arcs)
    reach = oracles.reach(d.n, arcs)
    comps = strong_components(d)
    assert sum(c.bit_count() for c in comps) == d.n
    for c in comps:
        vs = [v for v in range(d.n) if c >> v & 1]
        assert all(u in reach[v] for u in vs for v in vs)


@given(digraphs(max_n=8))
def test_greedy_acyclic_partition(d):
    found = greedy_acyclic_partition(d, range(d.n))
    if found is not None:
        v1, v2 = found
        assert v1 | v2 == set(range(d.n)) and not v1 & v2
        assert is_dag_mask(d, mask_of(v1, d.n)) and is_dag_mask(d, mask_of(v2, d.n))
