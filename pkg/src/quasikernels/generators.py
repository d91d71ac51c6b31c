"""Random instance generators and exhaustive enumeration of small digraphs."""
from __future__ import annotations

import hashlib
import random
from collections.abc import Callable, Iterator
from itertools import combinations

from .digraph import Digraph, serialize_digraph
from .errors import InvalidInputError, ResourceLimitError
from .recognition import is_dag_mask

MAX_EXHAUSTIVE_N = 5


def instance_rng(seed: int, index: int) -> random.Random:
    """Independent substream for instance ``index`` of a run seeded with ``seed``."""
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def digraph_hash(d: Digraph) -> str:
    return hashlib.sha256(serialize_digraph(d).encode()).hexdigest()[:16]


# exhaustive enumeration: each unordered pair {i<j} takes one of four states
# 0 = no arc, 1 = i→j, 2 = j→i, 3 = digon; pair p is base-4 digit p of the code.


def _pair_list(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def _half_table(n: int, pairs: list[tuple[int, int]]) -> list[tuple[int, ...]]:
    table = []
    for code in range(4 ** len(pairs)):
        out = [0] * n
        for p, (i, j) in enumerate(pairs):
            state = code >> (2 * p) & 3
            if state & 1:
                out[i] |= 1 << j
            if state & 2:
                out[j] |= 1 << i
        table.append(tuple(out))
    return table


def count_digraphs(n: int) -> int:
    return 4 ** (n * (n - 1) // 2)


def digraph_from_code(n: int, code: int) -> Digraph:
    out = [0] * n
    for p, (i, j) in enumerate(_pair_list(n)):
        state = code >> (2 * p) & 3
        if state & 1:
            out[i] |= 1 << j
        if state & 2:
            out[j] |= 1 << i
    return Digraph.from_out_masks(n, out)


def iter_digraphs(
    n: int, sink_free_only: bool = False, start: int = 0, stop: int | None = None
) -> Iterator[tuple[int, Digraph]]:
    """Yield ``(code, digraph)`` for every labeled digraph on n vertices, code order."""
    if n > MAX_EXHAUSTIVE_N:
        raise ResourceLimitError(f"exhaustive enumeration is limited to n <= {MAX_EXHAUSTIVE_N}")
    if n < 0:
        raise InvalidInputError("negative n")
    pairs = _pair_list(n)
    low_pairs = pairs[: len(pairs) // 2]
    high_pairs = pairs[len(pairs) // 2 :]
    low = _half_table(n, low_pairs)
    high = _half_table(n, high_pairs)
    shift = 2 * len(low_pairs)
    stop = count_digraphs(n) if stop is None else stop
    for hi_code in range(start >> shift, ((stop - 1) >> shift) + 1 if stop else 0):
        h = high[hi_code]
        base = hi_code << shift
        for lo_code, lo in enumerate(low):
            code = base | lo_code
            if code < start or code >= stop:
                continue
            out = [a | b for a, b in zip(lo, h)]
            if sink_free_only and not all(out):
                continue
            yield code, Digraph.from_out_masks(n, out)


def enumerate_digraphs(n: int, sink_free_only: bool, visitor: Callable[[Digraph], object]) -> int:
    """Call ``visitor`` on every labeled digraph of order n; returns the number visited."""
    count = 0
    for _, d in iter_digraphs(n, sink_free_only):
        visitor(d)
        count += 1
    return count


# random families


def random_digraph(n: int, p: float, rng: random.Random) -> Digraph:
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError("arc probability must lie in [0, 1]")
    out = [0] * n
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                out[u] |= 1 << v
    return Digraph.from_out_masks(n, out)


def random_sink_free(n: int, p: float, rng: random.Random) -> Digraph:
    """Random digraph; each sink then gets one arc to a uniformly chosen vertex."""
    if n < 2:
        raise InvalidInputError("sink-free digraphs need n >= 2")
    d = random_digraph(n, p, rng)
    out = list(d.out_masks)
    for u in range(n):
        if not out[u]:
            v = rng.choice([w for w in range(n) if w != u])
            out[u] |= 1 << v
    return Digraph.from_out_masks(n, out)


def random_tournament(n: int, rng: random.Random) -> Digraph:
    out = [0] * n
    for i, j in combinations(range(n), 2):
        if rng.random() < 0.5:
            out[i] |= 1 << j
        else:
            out[j] |= 1 << i
    return Digraph.from_out_masks(n, out)


def random_semicomplete(n: int, rng: random.Random) -> Digraph:
    """Each pair independently i→j, j→i or a digon, uniformly."""
    out = [0] * n
    for i, j in combinations(range(n), 2):
        state = rng.randrange(3)
        if state != 1:
            out[i] |= 1 << j
        if state != 0:
            out[j] |= 1 << i
    return Digraph.from_out_masks(n, out)


def random_sink_free_semicomplete(n: int, rng: random.Random, tournament: bool = False) -> Digraph:
    if n < 2 or (tournament and n < 3):
        raise InvalidInputError("no sink-free instance of this order")
    while True:
        d = random_tournament(n, rng) if tournament else random_semicomplete(n, rng)
        if all(d.out_masks):
            return d


def random_split(nx: int, ny: int, p: float, rng: random.Random) -> tuple[Digraph, frozenset[int], frozenset[int]]:
    """Sink-free one-way split digraph; Y = 0..ny-1 semicomplete, X = ny..ny+nx-1."""
    if ny < 2:
        raise InvalidInputError("a sink-free semicomplete part needs ny >= 2")
    if nx and p <= 0.0:
        raise InvalidInputError("X-vertices need arcs: p must be positive")
    y = random_sink_free_semicomplete(ny, rng)
    out = list(y.out_masks) + [0] * nx
    for x in range(ny, ny + nx):
        while not out[x]:
            for v in range(ny):
                if rng.random() < p:
                    out[x] |= 1 << v
    d = Digraph.from_out_masks(nx + ny, out)
    return d, frozenset(range(ny, ny + nx)), frozenset(range(ny))


def random_dag_partitioned(n: int, p: float, rng: random.Random) -> tuple[Digraph, frozenset[int], frozenset[int]]:
    """Random digraph whose random bipartition V₁, V₂ has both parts acyclic."""
    side = [rng.random() < 0.5 for _ in range(n)]
    rank = list(range(n))
    rng.shuffle(rank)
    out = [0] * n
    for u in range(n):
        for v in range(n):
            if u == v or rng.random() >= p:
                continue
            if side[u] == side[v] and rank[u] > rank[v]:
                continue
            out[u] |= 1 << v
    d = Digraph.from_out_masks(n, out)
    v1 = frozenset(v for v in range(n) if side[v])
    v2 = frozenset(v for v in range(n) if not side[v])
    return d, v1, v2


def random_indeg_le_3(n: int, p: float, rng: random.Random) -> Digraph:
    """Sink-free digraph with every in-degree at most 3."""
    if n < 2:
        raise InvalidInputError("sink-free digraphs need n >= 2")
    out = [0] * n
    indeg = [0] * n
    order = list(range(n))
    rng.shuffle(order)
    for u in order:
        choices = [w for w in range(n) if w != u and indeg[w] < 3]
        v = rng.choice(choices)
        out[u] |= 1 << v
        indeg[v] += 1
    for u in range(n):
        for v in range(n):
            if u != v and indeg[v] < 3 and not out[u] >> v & 1 and rng.random() < p:
                out[u] |= 1 << v
                indeg[v] += 1
    return Digraph.from_out_masks(n, out)


def check_dag_partition(d: Digraph, v1: frozenset[int], v2: frozenset[int]) -> bool:
    m1 = sum(1 << v for v in v1)
    m2 = sum(1 << v for v in v2)
    return is_dag_mask(d, m1) and is_dag_mask(d, m2)
