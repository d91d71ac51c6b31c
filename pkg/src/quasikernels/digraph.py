"""Loop-free digraphs on vertices ``0..n-1`` with bitmask adjacency.

Vertex sets cross the public API as ``frozenset[int]`` (any iterable of ints is
accepted). Internally every set is an ``int`` bitmask: bit ``v`` set means
vertex ``v`` is a member. The ``*_mask`` helpers expose that layer for callers
that run millions of small instances.
"""
from __future__ import annotations

import dataclasses
import re
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property

from .errors import InvalidInputError, ParseError

VertexSet = frozenset


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def mask_of(vertices: Iterable[int], n: int) -> int:
    """Convert a vertex collection to a bitmask, range-checking against ``n``."""
    mask = 0
    for v in vertices:
        if not isinstance(v, int) or v < 0 or v >= n:
            raise InvalidInputError(f"vertex {v!r} out of range 0..{n - 1}")
        mask |= 1 << v
    return mask


@dataclasses.dataclass(frozen=True)
class Digraph:
    """Immutable digraph. ``out_masks[v]``/``in_masks[v]`` are neighbour bitmasks.

    ``origin`` optionally records, for each vertex, its id in a parent digraph
    (set by :func:`induced`). It does not take part in equality.
    """

    n: int
    out_masks: tuple[int, ...]
    in_masks: tuple[int, ...]
    origin: tuple[int, ...] | None = dataclasses.field(default=None, compare=False, repr=False)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
        if n < 0:
            raise InvalidInputError(f"negative vertex count {n}")
        out = [0] * n
        inn = [0] * n
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInputError(f"arc ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidInputError(f"self-loop at {u}")
            bit = 1 << v
            if out[u] & bit:
                raise InvalidInputError(f"duplicate arc ({u}, {v})")
            out[u] |= bit
            inn[v] |= 1 << u
        return cls(n, tuple(out), tuple(inn))

    @classmethod
    def from_out_masks(cls, n: int, out_masks: Sequence[int]) -> Digraph:
        """Fast constructor; assumes masks are in range and loop-free."""
        inn = [0] * n
        for u in range(n):
            m = out_masks[u]
            bit = 1 << u
            while m:
                low = m & -m
                inn[low.bit_length() - 1] |= bit
                m ^= low
        return cls(n, tuple(out_masks), tuple(inn))

    @classmethod
    def empty(cls, n: int = 0) -> Digraph:
        return cls(n, (0,) * n, (0,) * n)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def arcs(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u in range(self.n) for v in iter_bits(self.out_masks[u]))

    @cached_property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(m)) for m in self.out_masks)

    @cached_property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(m)) for m in self.in_masks)

    @property
    def num_arcs(self) -> int:
        return sum(m.bit_count() for m in self.out_masks)

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.out_masks[u])]

    # mask-level primitives

    def in_nbhd_mask(self, s: int) -> int:
        """Union of in-neighbour masks over S. May intersect S; callers mask it off."""
        acc = 0
        in_masks = self.in_masks
        while s:
            low = s & -s
            acc |= in_masks[low.bit_length() - 1]
            s ^= low
        return acc

    def out_nbhd_mask(self, s: int) -> int:
        acc = 0
        out_masks = self.out_masks
        while s:
            low = s & -s
            acc |= out_masks[low.bit_length() - 1]
            s ^= low
        return acc

    def adjacent_mask(self, s: int) -> int:
        """Vertices joined to S by an arc in either direction (may intersect S)."""
        return self.in_nbhd_mask(s) | self.out_nbhd_mask(s)

    def is_independent_mask(self, s: int) -> bool:
        return not (self.out_nbhd_mask(s) & s)

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.sorted_arcs()})"


@dataclasses.dataclass(frozen=True)
class NeighborhoodPartition:
    """``q``, ``N⁻(q)``, ``N⁻⁻(q)`` and the vertices at in-distance ≥ 3."""

    q: frozenset[int]
    dist1: frozenset[int]
    dist2: frozenset[int]
    far: frozenset[int]


@dataclasses.dataclass(frozen=True)
class CompositionSpec:
    template: Digraph
    parts: tuple[Digraph, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if self.template.n < 1:
            raise InvalidInputError("composition template needs at least one vertex")
        if len(self.parts) != self.template.n:
            raise InvalidInputError(
                f"template has {self.template.n} vertices but {len(self.parts)} parts given"
            )

    @property
    def blocks(self) -> list[range]:
        """Vertex ids occupied by each part in the composed digraph."""
        out, start = [], 0
        for part in self.parts:
            out.append(range(start, start + part.n))
            start += part.n
        return out


def _mask_of_range(r: range) -> int:
    return ((1 << len(r)) - 1) << r.start if len(r) else 0


def in_neighborhood(d: Digraph, s: Iterable[int]) -> frozenset[int]:
    m = mask_of(s, d.n)
    return members(d.in_nbhd_mask(m) & ~m)


def closed_in_neighborhood_mask(d: Digraph, s: int) -> int:
    return d.in_nbhd_mask(s) | s


def second_in_neighborhood_mask(d: Digraph, s: int) -> int:
    closed = d.in_nbhd_mask(s) | s
    return d.in_nbhd_mask(closed) & ~closed


def second_in_neighborhood(d: Digraph, s: Iterable[int]) -> frozenset[int]:
    return members(second_in_neighborhood_mask(d, mask_of(s, d.n)))


def distance_masks(d: Digraph, q: int) -> tuple[int, int, int]:
    """(N⁻(q), N⁻⁻(q), far) as masks."""
    d1 = d.in_nbhd_mask(q) & ~q
    closed = q | d1
    d2 = d.in_nbhd_mask(closed) & ~closed
    far = d.full_mask & ~(closed | d2)
    return d1, d2, far


def distance_partition(d: Digraph, q: Iterable[int]) -> NeighborhoodPartition:
    qm = mask_of(q, d.n)
    d1, d2, far = distance_masks(d, qm)
    return NeighborhoodPartition(members(qm), members(d1), members(d2), members(far))


def induced_mask(d: Digraph, s: int) -> Digraph:
    verts = list(iter_bits(s))
    index = {v: i for i, v in enumerate(verts)}
    out = []
    for v in verts:
        m = 0
        for w in iter_bits(d.out_masks[v] & s):
            m |= 1 << index[w]
        out.append(m)
    sub = Digraph.from_out_masks(len(verts), out)
    return dataclasses.replace(sub, origin=tuple(verts))


def induced(d: Digraph, s: Iterable[int]) -> Digraph:
    """D[S]. The result's ``origin`` maps new ids back to ids of ``d``."""
    return induced_mask(d, mask_of(s, d.n))


def delete(d: Digraph, s: Iterable[int]) -> Digraph:
    """D − S."""
    return induced_mask(d, d.full_mask & ~mask_of(s, d.n))


def lift_mask(sub: Digraph, m: int) -> int:
    """Map a mask on ``sub`` back to the parent digraph through ``sub.origin``."""
    if sub.origin is None:
        return m
    out = 0
    for v in iter_bits(m):
        out |= 1 << sub.origin[v]
    return out


def sinks_mask(d: Digraph) -> int:
    m = 0
    for v, out in enumerate(d.out_masks):
        if not out:
            m |= 1 << v
    return m


def sources_mask(d: Digraph) -> int:
    m = 0
    for v, inn in enumerate(d.in_masks):
        if not inn:
            m |= 1 << v
    return m


def sinks(d: Digraph) -> frozenset[int]:
    return members(sinks_mask(d))


def sources(d: Digraph) -> frozenset[int]:
    return members(sources_mask(d))


def is_sink_free(d: Digraph) -> bool:
    return all(d.out_masks)


def is_independent(d: Digraph, s: Iterable[int]) -> bool:
    return d.is_independent_mask(mask_of(s, d.n))


def compose(spec: CompositionSpec) -> Digraph:
    """T[D₁, …, D_t]: blocks in template order, complete arcs along template arcs."""
    blocks = spec.blocks
    block_masks = [_mask_of_range(b) for b in blocks]
    total = sum(p.n for p in spec.parts)
    out = [0] * total
    for i, (part, block) in enumerate(zip(spec.parts, blocks)):
        across = 0
        for j in iter_bits(spec.template.out_masks[i]):
            across |= block_masks[j]
        for local in range(part.n):
            out[block.start + local] = (part.out_masks[local] << block.start) | across
    return Digraph.from_out_masks(total, out)


_HEADER = re.compile(r"^p\s+dgraph\s+(\d+)\s+(\d+)\s*$")
_LABEL = re.compile(r"^#\s*label\s+(\d+)\s+(\S+)\s*$")


def parse_digraph(text: str) -> Digraph:
    """Parse the ``p dgraph <n> <m>`` edge-list format."""
    n = expected = None
    seen: set[tuple[int, int]] = set()
    arcs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError(f"malformed header {line!r}", lineno)
            n, expected = int(m.group(1)), int(m.group(2))
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError(f"malformed arc line {line!r}", lineno)
        u, v = int(parts[0]), int(parts[1])
        if u >= n or v >= n:
            raise ParseError(f"vertex id out of range in {line!r} (n={n})", lineno)
        if u == v:
            raise ParseError(f"self-loop at {u}", lineno)
        if (u, v) in seen:
            raise ParseError(f"duplicate arc {u} {v}", lineno)
        if len(arcs) == expected:
            raise ParseError(f"more than the declared {expected} arcs", lineno)
        seen.add((u, v))
        arcs.append((u, v))
    if n is None:
        raise ParseError("missing 'p dgraph <n> <m>' header")
    if len(arcs) != expected:
        raise ParseError(f"header declares {expected} arcs, found {len(arcs)}")
    return Digraph.from_arcs(n, arcs)


def parse_labels(text: str) -> dict[int, str]:
    """Vertex labels stored as ``# label <v> <name>`` comments."""
    out = {}
    for line in text.splitlines():
        m = _LABEL.match(line.strip())
        if m:
            out[int(m.group(1))] = m.group(2)
    return out


def serialize_digraph(d: Digraph, labels: dict[int, str] | None = None) -> str:
    lines = []
    if labels:
        lines.extend(f"# label {v} {labels[v]}" for v in sorted(labels))
    lines.append(f"p dgraph {d.n} {d.num_arcs}")
    lines.extend(f"{u} {v}" for u, v in d.sorted_arcs())
    return "\n".join(lines) + "\n"


def to_dot(d: Digraph, labels: dict[int, str] | None = None) -> str:
    lines = ["digraph {"]
    for v in range(d.n):
        if labels and v in labels:
            lines.append(f'  {v} [label="{labels[v]}"];')
        elif not d.out_masks[v] and not d.in_masks[v]:
            lines.append(f"  {v};")
    lines.extend(f"  {u} -> {v};" for u, v in d.sorted_arcs())
    lines.append("}")
    return "\n".join(lines) + "\n"
