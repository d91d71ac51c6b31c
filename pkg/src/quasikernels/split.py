"""One-way split digraphs: small quasi-kernels, exact minimum, extremal families."""
from __future__ import annotations

import dataclasses
import math
from collections.abc import Iterable, Mapping

from .digraph import Digraph, induced_mask, iter_bits, lowest, mask_of, members
from .errors import InvalidInputError, InvariantError
from .qk import is_qk_mask, semicomplete_singleton_qk
from .recognition import is_semicomplete, is_semicomplete_mask

BOUND_SLACK = 1e-9

# The six-vertex digraph D*, labels 1..6 stored as vertices 0..5.
DSTAR_LABELS = {v: str(v + 1) for v in range(6)}
_DSTAR_ARCS = [(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4), (3, 5), (6, 2), (2, 5)]


@dataclasses.dataclass(frozen=True)
class OneWaySplitPartition:
    x: frozenset[int]
    y: frozenset[int]

    def masks(self, n: int) -> tuple[int, int]:
        return mask_of(self.x, n), mask_of(self.y, n)


@dataclasses.dataclass(frozen=True)
class AuxDigraphH:
    """Auxiliary digraph on X. Vertex ``i`` of ``h`` is ``xs[i]`` in ``d``."""

    xs: tuple[int, ...]
    vmap: Mapping[int, int]
    r: Mapping[int, frozenset[int]]
    h: Digraph


def split_bound(n: int) -> float:
    return (n + 3) / 2 - math.sqrt(n)


def check_partition(d: Digraph, part: OneWaySplitPartition) -> tuple[int, int]:
    xm, ym = part.masks(d.n)
    if xm & ym or (xm | ym) != d.full_mask:
        raise InvalidInputError("X and Y must partition the vertex set")
    if d.out_nbhd_mask(xm) & xm:
        raise InvalidInputError("X is not independent")
    if d.in_nbhd_mask(xm):
        raise InvalidInputError("X must consist of sources (arc into X found)")
    if not is_semicomplete_mask(d, ym):
        raise InvalidInputError("Y does not induce a semicomplete digraph")
    return xm, ym


def build_aux(d: Digraph, part: OneWaySplitPartition, vmap: Mapping[int, int] | None = None) -> AuxDigraphH:
    """Digraph H on X with x₁→x₂ iff v(x₁) = v(x₂) or v(x₁)→v(x₂).

    ``v(x)`` defaults to the lowest-id out-neighbour; an explicit ``vmap`` may
    pick any out-neighbour.
    """
    xm, _ = check_partition(d, part)
    xs = tuple(iter_bits(xm))
    chosen = {}
    for x in xs:
        if not d.out_masks[x]:
            raise InvalidInputError(f"vertex {x} of X is a sink")
        v = lowest(d.out_masks[x]) if vmap is None else vmap[x]
        if not d.has_arc(x, v):
            raise InvalidInputError(f"v({x}) = {v} is not an out-neighbour")
        chosen[x] = v
    r: dict[int, set[int]] = {}
    for x, v in chosen.items():
        r.setdefault(v, set()).add(x)
    out = []
    for x1 in xs:
        m = 0
        for i, x2 in enumerate(xs):
            if x2 != x1 and (chosen[x1] == chosen[x2] or d.has_arc(chosen[x1], chosen[x2])):
                m |= 1 << i
        out.append(m)
    h = Digraph.from_out_masks(len(xs), out)
    if not is_semicomplete(h):
        raise InvariantError("auxiliary digraph is not semicomplete")
    return AuxDigraphH(xs, chosen, {y: frozenset(s) for y, s in r.items()}, h)


def _closed_in_y(d: Digraph, v: int, ym: int) -> int:
    return (d.in_masks[v] | (1 << v)) & ym


def split_small_qk(
    d: Digraph, part: OneWaySplitPartition, vmap: Mapping[int, int] | None = None
) -> frozenset[int]:
    """Quasi-kernel of size at most (n+3)/2 − √n for a sink-free one-way split digraph."""
    xm, ym = check_partition(d, part)
    if d.n < 1 or not all(d.out_masks):
        raise InvalidInputError("split_small_qk needs a non-empty sink-free digraph")
    if not xm:
        sub = induced_mask(d, ym)
        q = 1 << sub.origin[semicomplete_singleton_qk(sub)]
    else:
        aux = build_aux(d, part, vmap)
        indeg = [m.bit_count() for m in aux.h.in_masks]
        best = max(range(len(aux.xs)), key=lambda i: (indeg[i], -i))
        anchor = aux.vmap[aux.xs[best]]
        need = _closed_in_y(d, anchor, ym)
        y, size = anchor, -1
        for cand in iter_bits(ym):
            closed = _closed_in_y(d, cand, ym)
            if not need & ~closed and closed.bit_count() > size:
                y, size = cand, closed.bit_count()
        # climb to an inclusion-maximal closed in-neighbourhood inside Y
        climbed = True
        while climbed:
            climbed = False
            cur = _closed_in_y(d, y, ym)
            for cand in iter_bits(ym):
                closed = _closed_in_y(d, cand, ym)
                if closed != cur and not cur & ~closed:
                    y, climbed = cand, True
                    break
        one = d.in_masks[y] | (1 << y)
        two = one | d.in_nbhd_mask(one)
        q = (1 << y) | (xm & ~two)
    if not is_qk_mask(d, q):
        raise InvariantError("split construction produced a non-quasi-kernel")
    if d.n >= 3 and q.bit_count() > split_bound(d.n) + BOUND_SLACK:
        raise InvariantError(f"split construction exceeded (n+3)/2 - sqrt(n): |Q|={q.bit_count()}")
    return members(q)


def split_min_qk_exact(d: Digraph, part: OneWaySplitPartition) -> tuple[int, frozenset[int]]:
    """Exact minimum quasi-kernel: one vertex y of Y plus the X-vertices ≥ 3 arcs from y."""
    xm, ym = check_partition(d, part)
    if not all(d.out_masks):
        raise InvalidInputError("digraph has a sink")
    best = None
    for y in iter_bits(ym):
        one = d.in_masks[y] | (1 << y)
        two = one | d.in_nbhd_mask(one)
        if ym & ~two:
            continue
        q = (1 << y) | (xm & ~two)
        if best is None or q.bit_count() < best.bit_count():
            best = q
    if best is None:
        raise InvariantError("no vertex of Y is reached from all of Y within two arcs")
    return best.bit_count(), members(best)


def circulant_tournament(k: int) -> Digraph:
    """k-regular tournament on 2k+1 vertices: i → i+j (mod 2k+1) for j = 1..k."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    m = 2 * k + 1
    return Digraph.from_arcs(m, [(i, (i + j) % m) for i in range(m) for j in range(1, k + 1)])


def construct_d_k(k: int) -> Digraph:
    """Circulant tournament plus 2k pendant in-neighbours per tournament vertex."""
    t = circulant_tournament(k)
    m = t.n
    arcs = list(t.sorted_arcs())
    nxt = m
    for v in range(m):
        for _ in range(2 * k):
            arcs.append((nxt, v))
            nxt += 1
    return Digraph.from_arcs(m * m, arcs)


def d_k_partition(k: int) -> OneWaySplitPartition:
    m = 2 * k + 1
    return OneWaySplitPartition(frozenset(range(m, m * m)), frozenset(range(m)))


def construct_dstar() -> Digraph:
    return Digraph.from_arcs(6, [(u - 1, v - 1) for u, v in _DSTAR_ARCS])


def partition_from(x: Iterable[int], y: Iterable[int]) -> OneWaySplitPartition:
    return OneWaySplitPartition(frozenset(x), frozenset(y))
