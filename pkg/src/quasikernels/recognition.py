"""Class recognizers, induced in-star detection and the matching decomposition."""
from __future__ import annotations

import dataclasses
from collections.abc import Iterable
from itertools import combinations
from typing import Literal, NamedTuple

from .digraph import Digraph, iter_bits, mask_of, members, sources_mask
from .errors import InvalidInputError, InvariantError

WitnessKind = Literal["anti_claw", "k41", "k41_plus"]
_TAIL_COUNT = {"anti_claw": 3, "k41": 4, "k41_plus": 4}


def is_semicomplete(d: Digraph) -> bool:
    full = d.full_mask
    for v in range(d.n):
        if (d.out_masks[v] | d.in_masks[v] | (1 << v)) != full:
            return False
    return True


def is_tournament(d: Digraph) -> bool:
    return is_semicomplete(d) and not any(
        d.out_masks[v] & d.in_masks[v] for v in range(d.n)
    )


@dataclasses.dataclass(frozen=True)
class ForbiddenWitness:
    kind: WitnessKind
    center: int
    tails: tuple[int, ...]
    extra_arc: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "center": self.center,
            "tails": list(self.tails),
            "extra_arc": list(self.extra_arc) if self.extra_arc else None,
        }


def _arcs_among(d: Digraph, tails: Iterable[int]) -> list[tuple[int, int]]:
    tails = list(tails)
    tmask = mask_of(tails, d.n)
    return [(u, v) for u in tails for v in iter_bits(d.out_masks[u] & tmask)]


def find_forbidden(d: Digraph, kind: WitnessKind) -> ForbiddenWitness | None:
    """First induced anti-claw / K⃗₄,₁ / K⃗₄,₁⁺ in lexicographic (center, tails) order."""
    if kind not in _TAIL_COUNT:
        raise InvalidInputError(f"unknown forbidden pattern {kind!r}")
    size = _TAIL_COUNT[kind]
    want_arcs = 1 if kind == "k41_plus" else 0
    for center in range(d.n):
        cand = d.in_masks[center] & ~d.out_masks[center]
        if cand.bit_count() < size:
            continue
        for tails in combinations(iter_bits(cand), size):
            inside = _arcs_among(d, tails)
            if len(inside) == want_arcs:
                w = ForbiddenWitness(kind, center, tails, inside[0] if inside else None)
                if not verify_witness(d, w):
                    raise InvariantError(f"search produced an invalid witness {w}")
                return w
    return None


def verify_witness(d: Digraph, w: ForbiddenWitness) -> bool:
    """Check every structural claim of ``w`` against ``d``, inducedness included."""
    size = _TAIL_COUNT.get(w.kind)
    if size is None or len(w.tails) != size or len(set(w.tails)) != size:
        return False
    verts = (w.center, *w.tails)
    if any(not 0 <= v < d.n for v in verts) or w.center in w.tails:
        return False
    for t in w.tails:
        if not d.has_arc(t, w.center) or d.has_arc(w.center, t):
            return False
    inside = _arcs_among(d, w.tails)
    if w.kind == "k41_plus":
        return w.extra_arc is not None and inside == [tuple(w.extra_arc)]
    return not inside and w.extra_arc is None


def max_matching(d: Digraph, left: Iterable[int], right: Iterable[int]) -> frozenset[tuple[int, int]]:
    """Maximum matching of arcs directed from ``left`` to ``right``."""
    lm, rm = mask_of(left, d.n), mask_of(right, d.n)
    if lm & rm:
        raise InvalidInputError("left and right sides of a matching must be disjoint")
    return frozenset(matching_pairs(d, lm, rm).items())


def matching_pairs(d: Digraph, left: int, right: int) -> dict[int, int]:
    """Augmenting-path matching; returns ``{tail: head}``.

    Left vertices are processed in increasing id and heads tried in increasing
    id, so the result is a deterministic function of the digraph.
    """
    match_r: dict[int, int] = {}
    out = d.out_masks

    def augment(u: int, seen: list[int]) -> bool:
        for v in iter_bits(out[u] & right & ~seen[0]):
            seen[0] |= 1 << v
            if v not in match_r or augment(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    for u in iter_bits(left):
        if out[u] & right:
            augment(u, [0])
    return {u: v for v, u in sorted(match_r.items(), key=lambda kv: kv[1])}


class DecompMasks(NamedTuple):
    """Mask form of :class:`MatchingDecomposition` plus the distance layers."""

    q: int
    dist1: int
    dist2: int
    m1: int
    m2: int
    a: int
    pairs: dict[int, int]


@dataclasses.dataclass(frozen=True)
class MatchingDecomposition:
    q: frozenset[int]
    m: frozenset[tuple[int, int]]
    m1: frozenset[int]
    m2: frozenset[int]
    a: frozenset[int]


def decompose_mask(d: Digraph, q: int, scope: int | None = None) -> DecompMasks:
    """Matching decomposition of Q inside D[scope] (whole digraph by default)."""
    scope = d.full_mask if scope is None else scope
    d1 = d.in_nbhd_mask(q) & scope & ~q
    closed = q | d1
    d2 = d.in_nbhd_mask(closed) & scope & ~closed
    pairs = matching_pairs(d, d1, q)
    m1 = m2 = 0
    for u, v in pairs.items():
        m2 |= 1 << u
        m1 |= 1 << v
    if (d.in_nbhd_mask(m1) & scope & ~q) != d1:
        raise InvariantError("maximum matching left N⁻(Q) != N⁻(M₁)")
    return DecompMasks(q, d1, d2, m1, m2, q & ~m1, pairs)


def matching_decomposition(d: Digraph, q: Iterable[int]) -> MatchingDecomposition:
    qm = mask_of(q, d.n)
    if not d.is_independent_mask(qm):
        raise InvalidInputError("matching decomposition needs an independent set")
    dm = decompose_mask(d, qm)
    return MatchingDecomposition(
        members(qm), frozenset(dm.pairs.items()), members(dm.m1), members(dm.m2), members(dm.a)
    )


def is_semicomplete_mask(d: Digraph, s: int) -> bool:
    for v in iter_bits(s):
        if (s & ~(d.out_masks[v] | d.in_masks[v] | (1 << v))) != 0:
            return False
    return True


def recognize_one_way_split(d: Digraph) -> tuple[frozenset[int], frozenset[int]] | None:
    """Canonical one-way split partition: X = sources, Y = the rest."""
    x = sources_mask(d)
    y = d.full_mask & ~x
    if not is_semicomplete_mask(d, y):
        return None
    return members(x), members(y)


def topological_order_mask(d: Digraph, s: int) -> list[int] | None:
    """Kahn order of D[S], or None if D[S] has a directed cycle."""
    indeg = {v: (d.in_masks[v] & s).bit_count() for v in iter_bits(s)}
    ready = [v for v, k in indeg.items() if k == 0]
    order = []
    while ready:
        ready.sort(reverse=True)
        v = ready.pop()
        order.append(v)
        for w in iter_bits(d.out_masks[v] & s):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order if len(order) == len(indeg) else None


def is_dag_mask(d: Digraph, s: int) -> bool:
    return topological_order_mask(d, s) is not None


def is_dag(d: Digraph) -> bool:
    return is_dag_mask(d, d.full_mask)


def strong_components(d: Digraph) -> list[int]:
    """Strongly connected components as masks (Kosaraju, iterative)."""
    n = d.n
    seen = 0
    finish: list[int] = []
    for root in range(n):
        if seen >> root & 1:
            continue
        seen |= 1 << root
        stack = [(root, d.out_masks[root])]
        while stack:
            v, rest = stack[-1]
            rest &= ~seen
            if rest:
                w = (rest & -rest).bit_length() - 1
                stack[-1] = (v, rest & ~(1 << w))
                seen |= 1 << w
                stack.append((w, d.out_masks[w]))
            else:
                stack.pop()
                finish.append(v)
    comps = []
    assigned = 0
    for root in reversed(finish):
        if assigned >> root & 1:
            continue
        comp = frontier = 1 << root
        while frontier:
            nxt = d.in_nbhd_mask(frontier) & ~comp & ~assigned
            comp |= nxt
            frontier = nxt
        assigned |= comp
        comps.append(comp)
    return comps


def has_odd_directed_cycle(d: Digraph) -> bool:
    """True iff some closed directed walk (hence some directed cycle) has odd length.

    Within a strong component, all closed walks are even exactly when the
    vertices admit a parity labelling that every internal arc flips.
    """
    for comp in strong_components(d):
        root = (comp & -comp).bit_length() - 1
        parity = {root: 0}
        queue = [root]
        for v in queue:
            for w in iter_bits(d.out_masks[v] & comp):
                if w not in parity:
                    parity[w] = parity[v] ^ 1
                    queue.append(w)
                elif parity[w] == parity[v]:
                    return True
    return False


def greedy_acyclic_partition(d: Digraph, s: Iterable[int]) -> tuple[frozenset[int], frozenset[int]] | None:
    """Split S into two parts that each induce a DAG, first-fit by vertex id."""
    v1 = v2 = 0
    for v in sorted(s):
        bit = 1 << v
        if is_dag_mask(d, v1 | bit):
            v1 |= bit
        elif is_dag_mask(d, v2 | bit):
            v2 |= bit
        else:
            return None
    return members(v1), members(v2)
