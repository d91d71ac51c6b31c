"""Kernels and quasi-kernels: verification, constructions and exact oracles."""
from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor

from .digraph import (
    Digraph,
    NeighborhoodPartition,
    distance_masks,
    iter_bits,
    lowest,
    mask_of,
    members,
)
from .errors import InvalidInputError, InvariantError, ResourceLimitError, SearchCapExceeded
from .recognition import is_semicomplete, topological_order_mask

KERNEL_BUDGET = 20
KERNEL_PERFECT_BUDGET = 10


# verification


def is_kernel_mask(d: Digraph, k: int) -> bool:
    if d.out_nbhd_mask(k) & k:
        return False
    out = d.out_masks
    for v in iter_bits(d.full_mask & ~k):
        if not out[v] & k:
            return False
    return True


def is_qk_mask(d: Digraph, q: int) -> bool:
    if d.out_nbhd_mask(q) & q:
        return False
    closed = q | d.in_nbhd_mask(q)
    return (closed | d.in_nbhd_mask(closed)) == d.full_mask


def is_good_qk_mask(d: Digraph, q: int) -> bool:
    if not is_qk_mask(d, q):
        return False
    d1 = d.in_nbhd_mask(q) & ~q
    return all(d.out_masks[u] & d1 for u in iter_bits(q))


def verify_kernel(d: Digraph, k: Iterable[int]) -> bool:
    return is_kernel_mask(d, mask_of(k, d.n))


def verify_quasi_kernel(d: Digraph, q: Iterable[int]) -> tuple[bool, NeighborhoodPartition]:
    """Quasi-kernel test; the distance partition is returned as certificate."""
    qm = mask_of(q, d.n)
    d1, d2, far = distance_masks(d, qm)
    ok = d.is_independent_mask(qm) and not far
    return ok, NeighborhoodPartition(members(qm), members(d1), members(d2), members(far))


def is_good_quasi_kernel(d: Digraph, q: Iterable[int]) -> bool:
    return is_good_qk_mask(d, mask_of(q, d.n))


# constructions


def cl_mask(d: Digraph, within: int | None = None) -> int:
    """Chvátal–Lovász quasi-kernel of D[within], lowest-id pivot, no recursion."""
    rest = d.full_mask if within is None else within
    pivots = []
    while rest:
        v = lowest(rest)
        pivots.append(v)
        rest &= ~(d.in_masks[v] | (1 << v))
    q = 0
    out = d.out_masks
    for v in reversed(pivots):
        if not out[v] & q:
            q |= 1 << v
    return q


def quasi_kernel_cl(d: Digraph) -> frozenset[int]:
    q = cl_mask(d)
    if not is_qk_mask(d, q):
        raise InvariantError("Chvátal–Lovász construction produced a non-quasi-kernel")
    return members(q)


def forced_mask(d: Digraph, s: int, within: int | None = None) -> int:
    scope = d.full_mask if within is None else within
    rest = scope & ~(s | d.in_nbhd_mask(s))
    q = cl_mask(d, rest)
    for u in iter_bits(s):
        if not d.out_masks[u] & q:
            q |= 1 << u
    return q


def quasi_kernel_forced(d: Digraph, s: Iterable[int]) -> frozenset[int]:
    """Quasi-kernel Q with every vertex of S in Q or in N⁻(Q)."""
    sm = mask_of(s, d.n)
    if not d.is_independent_mask(sm):
        raise InvalidInputError("forced set must be independent")
    q = forced_mask(d, sm)
    if not is_qk_mask(d, q):
        raise InvariantError("forced construction produced a non-quasi-kernel")
    return members(q)


def _require_qk(d: Digraph, q: Iterable[int]) -> int:
    qm = mask_of(q, d.n)
    if not is_qk_mask(d, qm):
        raise InvalidInputError("argument is not a quasi-kernel")
    return qm


def maximalize_mask(d: Digraph, q: int, within: int | None = None) -> int:
    scope = d.full_mask if within is None else within
    for v in iter_bits(scope & ~q):
        if not (d.out_masks[v] | d.in_masks[v]) & q:
            q |= 1 << v
    return q


def maximalize_qk(d: Digraph, q: Iterable[int]) -> frozenset[int]:
    """Add vertices (lowest id first) that have no arc to or from the set."""
    return members(maximalize_mask(d, _require_qk(d, q)))


def minimalize_qk(d: Digraph, q: Iterable[int]) -> frozenset[int]:
    """Drop vertices (lowest id first) while the remainder stays a quasi-kernel."""
    qm = _require_qk(d, q)
    changed = True
    while changed:
        changed = False
        for v in iter_bits(qm):
            if is_qk_mask(d, qm & ~(1 << v)):
                qm &= ~(1 << v)
                changed = True
    return members(qm)


def jacob_meyniel_masks(d: Digraph, q: int) -> tuple[int, int]:
    """(refined quasi-kernel, Q̃) where Q̃ is the CL quasi-kernel of D[N⁻⁻(Q)]."""
    _, d2, _ = distance_masks(d, q)
    tilde = cl_mask(d, d2)
    return (q | tilde) & ~d.in_nbhd_mask(tilde), tilde


def jacob_meyniel_refine(d: Digraph, q: Iterable[int]) -> frozenset[int]:
    qm = _require_qk(d, q)
    result, _ = jacob_meyniel_masks(d, qm)
    if not is_qk_mask(d, result):
        raise InvariantError("Jacob–Meyniel refinement lost the quasi-kernel property")
    return members(result)


# kernels


def kernel_dag_mask(d: Digraph, within: int | None = None) -> int:
    scope = d.full_mask if within is None else within
    order = topological_order_mask(d, scope)
    if order is None:
        raise InvalidInputError("kernel_dag needs an acyclic digraph")
    k = 0
    for v in reversed(order):
        if not d.out_masks[v] & k:
            k |= 1 << v
    return k


def kernel_dag(d: Digraph) -> frozenset[int]:
    """The unique kernel of an acyclic digraph."""
    return members(kernel_dag_mask(d))


def _kernel_rec(d: Digraph, scope: int, k: int, undecided: int) -> int | None:
    out = d.out_masks
    possible = k | undecided
    for w in iter_bits(scope & ~possible):
        if not out[w] & possible:
            return None
    if not undecided:
        return k
    v = lowest(undecided)
    bit = 1 << v
    found = _kernel_rec(d, scope, k | bit, undecided & ~bit & ~(out[v] | d.in_masks[v]))
    if found is not None:
        return found
    return _kernel_rec(d, scope, k, undecided & ~bit)


def _kernel_branch(args):
    d, scope, k, undecided = args
    return _kernel_rec(d, scope, k, undecided)


def _first_hit(fn: Callable, tasks: Sequence, workers: int):
    """Run tasks (in parallel when asked); the first non-None result in task order wins."""
    if workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            r = fn(t)
            if r is not None:
                return r
        return None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for r in pool.map(fn, tasks):
            if r is not None:
                return r
    return None


def kernel_search_mask(d: Digraph, scope: int | None = None, workers: int = 1) -> int | None:
    scope = d.full_mask if scope is None else scope
    if not scope:
        return 0
    v = lowest(scope)
    bit = 1 << v
    tasks = [
        (d, scope, bit, scope & ~bit & ~(d.out_masks[v] | d.in_masks[v])),
        (d, scope, 0, scope & ~bit),
    ]
    return _first_hit(_kernel_branch, tasks, workers)


def kernel_exact(d: Digraph, budget: int = KERNEL_BUDGET, workers: int = 1) -> frozenset[int] | None:
    """Some kernel of ``d`` (include-first branching, lowest id first) or None."""
    if d.n > budget:
        raise ResourceLimitError(f"kernel_exact budget is n <= {budget}, got n={d.n}")
    k = kernel_search_mask(d, workers=workers)
    return None if k is None else members(k)


def is_kernel_perfect_mask(d: Digraph, scope: int) -> bool:
    verts = list(iter_bits(scope))
    for sub in range(1, 1 << len(verts)):
        s = 0
        for i, v in enumerate(verts):
            if sub >> i & 1:
                s |= 1 << v
        if kernel_search_mask(d, s) is None:
            return False
    return True


def is_kernel_perfect_exact(d: Digraph, budget: int = KERNEL_PERFECT_BUDGET) -> bool:
    """Every induced subdigraph has a kernel (2ⁿ kernel searches)."""
    if d.n > budget:
        raise ResourceLimitError(f"kernel-perfectness budget is n <= {budget}, got n={d.n}")
    return is_kernel_perfect_mask(d, d.full_mask)


# exact minimum quasi-kernel


def coverage_masks(d: Digraph) -> list[int]:
    """cov[c]: vertices with a path of at most two arcs to c, c included."""
    cov = []
    for c in range(d.n):
        one = d.in_masks[c] | (1 << c)
        cov.append(one | d.in_nbhd_mask(one))
    return cov


def _min_qk_rec(
    cov: Sequence[int], adj: Sequence[int], full: int, chosen: int, covered: int, cands: int, k: int
) -> int | None:
    if k == 0:
        return chosen if covered == full else None
    if cands.bit_count() < k:
        return None
    reach = covered
    c = cands
    while c:
        low = c & -c
        reach |= cov[low.bit_length() - 1]
        c ^= low
    if reach != full:
        return None
    c = cands
    while c:
        low = c & -c
        v = low.bit_length() - 1
        c ^= low
        # later candidates only, to enumerate each set once in lexicographic order
        found = _min_qk_rec(cov, adj, full, chosen | low, covered | cov[v], c & ~adj[v], k - 1)
        if found is not None:
            return found
    return None


def _min_qk_branch(args):
    cov, adj, full, first, k = args
    c = full & ~((1 << (first + 1)) - 1) & ~adj[first]
    return _min_qk_rec(cov, adj, full, 1 << first, cov[first], c, k - 1)


def minimum_quasi_kernel_mask(d: Digraph, cap: int | None = None, workers: int = 1) -> int:
    if d.n == 0:
        return 0
    cap = d.n if cap is None else cap
    cov = coverage_masks(d)
    adj = [d.out_masks[v] | d.in_masks[v] for v in range(d.n)]
    full = d.full_mask
    for size in range(1, cap + 1):
        tasks = [(cov, adj, full, first, size) for first in range(d.n)]
        found = _first_hit(_min_qk_branch, tasks, workers)
        if found is not None:
            return found
    raise SearchCapExceeded(f"no quasi-kernel of size <= {cap} (n={d.n})")


def minimum_quasi_kernel_exact(
    d: Digraph, cap: int | None = None, workers: int = 1
) -> tuple[int, frozenset[int]]:
    """Smallest quasi-kernel, lexicographically first among those of that size."""
    q = minimum_quasi_kernel_mask(d, cap, workers)
    return q.bit_count(), members(q)


def semicomplete_singleton_qk(d: Digraph) -> int:
    """Lowest-id vertex whose in-neighbourhood is inclusion-maximal."""
    if d.n < 1 or not is_semicomplete(d):
        raise InvalidInputError("semicomplete_singleton_qk needs a non-empty semicomplete digraph")
    inn = d.in_masks
    for v in range(d.n):
        if not any(inn[v] != inn[u] and not inn[v] & ~inn[u] for u in range(d.n)):
            if not is_qk_mask(d, 1 << v):
                raise InvariantError(f"maximal in-neighbourhood vertex {v} is not a quasi-kernel")
            return v
    raise InvariantError("no vertex with maximal in-neighbourhood")
