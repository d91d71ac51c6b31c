"""Small quasi-kernels for the structured classes: improvement loops and lifts.

"Small" means at most ``n // 2`` vertices. The improvement loops start from the
Chvátal–Lovász quasi-kernel and apply two local reductions until either the set
is small or a forbidden induced in-star is exposed:

* drop ``v ∈ A`` when ``v`` has an out-neighbour in ``N⁻(Q)``;
* replace ``N⁻(v) ∩ Q`` by ``v`` when ``v ∈ N⁻⁻(Q)`` has two or more
  in-neighbours in ``A`` and none in ``M₁``.

Both keep ``Q`` a quasi-kernel because ``N⁻(Q) = N⁻(M₁)`` for a maximum matching.
"""
from __future__ import annotations

import dataclasses
from collections.abc import Iterable
from itertools import combinations

from .digraph import (
    CompositionSpec,
    Digraph,
    compose,
    distance_masks,
    iter_bits,
    lowest,
    mask_of,
    members,
    sinks_mask,
)
from .errors import InvalidInputError, InvariantError, PreconditionError
from .qk import (
    KERNEL_PERFECT_BUDGET,
    cl_mask,
    is_good_qk_mask,
    is_kernel_perfect_mask,
    is_qk_mask,
    kernel_dag_mask,
    kernel_search_mask,
    maximalize_mask,
)
from .recognition import ForbiddenWitness, decompose_mask, is_dag_mask, verify_witness


@dataclasses.dataclass(frozen=True)
class SmallQkOutcome:
    """Either a small quasi-kernel with its reduction trace, or a forbidden witness."""

    quasi_kernel: frozenset[int] | None
    witness: ForbiddenWitness | None
    trace: tuple[str, ...]
    steps: int

    @property
    def is_witness(self) -> bool:
        return self.witness is not None


def _require_sink_free(d: Digraph) -> None:
    if not all(d.out_masks):
        raise InvalidInputError("digraph has a sink")


def _fmt(mask: int) -> str:
    return "{" + ",".join(map(str, iter_bits(mask))) + "}"


def _reduce_once(d: Digraph, dm, trace: list[str]) -> tuple[int | None, int | None]:
    """One reduction on Q.

    Returns ``(new_q, None)`` when a reduction fired, otherwise ``(None, v)``
    where ``v`` is the lowest vertex of N⁻⁻(Q) with at least two in-neighbours
    in A (or None if there is none).
    """
    out, inn = d.out_masks, d.in_masks
    for v in iter_bits(dm.a):
        if out[v] & dm.dist1:
            trace.append(f"drop {v}: arc into N-(Q)")
            return dm.q & ~(1 << v), None
    first = None
    for v in iter_bits(dm.dist2):
        if (inn[v] & dm.a).bit_count() >= 2:
            if not inn[v] & dm.m1:
                removed = inn[v] & dm.q
                trace.append(f"swap {_fmt(removed)} -> {v}")
                return (dm.q & ~removed) | (1 << v), None
            if first is None:
                first = v
    return None, first


def _check_eq1(d: Digraph, dm, half: int) -> None:
    if dm.q.bit_count() > half and not dm.dist2.bit_count() < dm.a.bit_count():
        raise InvariantError("|N--(Q)| < |A| failed for a stable non-small quasi-kernel")


def _finish(d: Digraph, q: int, trace: list[str], steps: int) -> SmallQkOutcome:
    if not is_qk_mask(d, q) or q.bit_count() > d.n // 2:
        raise InvariantError(f"improvement loop returned a bad set {_fmt(q)}")
    return SmallQkOutcome(members(q), None, tuple(trace), steps)


def _witness(d: Digraph, w: ForbiddenWitness, trace: list[str], steps: int) -> SmallQkOutcome:
    if not verify_witness(d, w):
        raise InvariantError(f"assembled witness does not verify: {w}")
    trace.append(f"witness {w.kind} at {w.center}")
    return SmallQkOutcome(None, w, tuple(trace), steps)


def _start_mask(d: Digraph, start: Iterable[int] | None) -> int:
    if start is None:
        return cl_mask(d)
    q = mask_of(start, d.n)
    if not is_qk_mask(d, q):
        raise InvalidInputError("start set is not a quasi-kernel")
    return q


def small_qk_anti_claw_free(d: Digraph, start: Iterable[int] | None = None) -> SmallQkOutcome:
    """Small quasi-kernel of a sink-free digraph, or an induced anti-claw.

    The loop starts from the Chvátal–Lovász quasi-kernel unless ``start`` gives
    another quasi-kernel.
    """
    _require_sink_free(d)
    if d.n < 1:
        raise InvalidInputError("empty digraph")
    half = d.n // 2
    q = _start_mask(d, start)
    trace = [f"start {_fmt(q)}"]
    for steps in range(d.n + 1):
        if q.bit_count() <= half:
            return _finish(d, q, trace, steps)
        dm = decompose_mask(d, q)
        new_q, v = _reduce_once(d, dm, trace)
        if new_q is not None:
            q = new_q
            continue
        _check_eq1(d, dm, half)
        if v is None:
            raise InvariantError("no vertex of N--(Q) has two in-neighbours in A")
        a_tails = list(iter_bits(d.in_masks[v] & dm.a))[:2]
        m_tail = lowest(d.in_masks[v] & dm.m1)
        w = ForbiddenWitness("anti_claw", v, tuple(sorted((*a_tails, m_tail))))
        return _witness(d, w, trace, steps)
    raise InvariantError("improvement loop did not terminate within n rounds")


def small_qk_k41_free(d: Digraph, start: Iterable[int] | None = None) -> SmallQkOutcome:
    """Small quasi-kernel of a sink-free digraph, or an induced K⃗₄,₁ / K⃗₄,₁⁺."""
    _require_sink_free(d)
    if d.n < 1:
        raise InvalidInputError("empty digraph")
    half = d.n // 2
    out, inn = d.out_masks, d.in_masks
    q = _start_mask(d, start)
    trace = [f"start {_fmt(q)}"]
    for steps in range(d.n + 1):
        if q.bit_count() <= half:
            return _finish(d, q, trace, steps)
        dm = decompose_mask(d, q)
        new_q, _ = _reduce_once(d, dm, trace)
        if new_q is not None:
            q = new_q
            continue
        _check_eq1(d, dm, half)

        n2 = dm.dist2
        tilde = maximalize_mask(d, cl_mask(d, n2), within=n2)
        in_tilde = d.in_nbhd_mask(tilde) & ~tilde
        q1 = (q | tilde) & ~in_tilde
        q2 = q1
        for a in iter_bits(dm.a):
            if out[a] & in_tilde:
                q2 &= ~(1 << a)
        if q2.bit_count() < q.bit_count():
            if not is_qk_mask(d, q2):
                raise InvariantError("Q'' is not a quasi-kernel")
            trace.append(f"second-neighbourhood exchange {_fmt(q)} -> {_fmt(q2)}")
            q = q2
            continue

        # N⁻(Q̃) and N⁻⁻(Q̃) taken inside D[N⁻⁻(Q)]
        sub_d1 = in_tilde & n2
        sub_closed = tilde | sub_d1
        sub_d2 = d.in_nbhd_mask(sub_closed) & n2 & ~sub_closed
        a_prime = 0
        for a in iter_bits(dm.a):
            if out[a] & (tilde | sub_d1):
                a_prime |= 1 << a
        rest = dm.a & ~a_prime
        if rest.bit_count() < sub_d2.bit_count() + 2:
            raise InvariantError("|A \\ A'| >= |N--(Q~) & N--(Q)| + 2 failed")
        for v in iter_bits(sub_d2):
            if (inn[v] & rest).bit_count() >= 2:
                break
        else:
            raise InvariantError("no centre with two in-neighbours in A \\ A'")
        if not inn[v] & dm.m1 or not inn[v] & tilde:
            raise InvariantError(f"centre {v} lacks an in-neighbour in M1 or Q~")
        a1, a2 = list(iter_bits(inn[v] & rest))[:2]
        m = lowest(inn[v] & dm.m1)
        t = lowest(inn[v] & tilde)
        tails = tuple(sorted((a1, a2, m, t)))
        if d.has_arc(m, t):
            w = ForbiddenWitness("k41_plus", v, tails, (m, t))
        else:
            w = ForbiddenWitness("k41", v, tails)
        return _witness(d, w, trace, steps)
    raise InvariantError("improvement loop did not terminate within n rounds")


def _has_independent_triple(d: Digraph, s: int) -> bool:
    for trio in combinations(iter_bits(s), 3):
        m = (1 << trio[0]) | (1 << trio[1]) | (1 << trio[2])
        if not d.out_nbhd_mask(m) & m:
            return True
    return False


def theorem3_predicate(d: Digraph) -> tuple[bool, dict | None]:
    """Heavy in-degree structure that every digraph without a small quasi-kernel has.

    (a) a vertex with at least 5 in-neighbours, 3 of them independent; or
    (b) two independent arcs whose four ends each have at least 4
        in-neighbours, 3 of them independent.
    """
    inn = d.in_masks
    rich = 0
    for v in range(d.n):
        k = inn[v].bit_count()
        if k >= 4 and _has_independent_triple(d, inn[v]):
            if k >= 5:
                return True, {"case": "a", "vertex": v}
            rich |= 1 << v
    arcs = [(u, v) for u in iter_bits(rich) for v in iter_bits(d.out_masks[u] & rich)]
    for (u1, v1), (u2, v2) in combinations(arcs, 2):
        ends = (1 << u1) | (1 << v1) | (1 << u2) | (1 << v2)
        if ends.bit_count() != 4:
            continue
        if d.adjacent_mask((1 << u1) | (1 << v1)) & ((1 << u2) | (1 << v2)):
            continue
        return True, {"case": "b", "arcs": [[u1, v1], [u2, v2]]}
    return False, None


def _kernel_of(d: Digraph, scope: int) -> int | None:
    if is_dag_mask(d, scope):
        return kernel_dag_mask(d, scope)
    return kernel_search_mask(d, scope)


def _lemma1_mask(d: Digraph, scope: int, q: int) -> int:
    """Shrink quasi-kernel ``q`` of D[scope] using a kernel of its second layer."""
    out = d.out_masks
    while True:
        dm = decompose_mask(d, q, scope)
        lonely = [v for v in iter_bits(dm.a) if not out[v] & dm.dist2]
        if not lonely:
            break
        v = lonely[0]
        if not out[v] & dm.dist1:
            raise PreconditionError(f"vertex {v} of A has no out-neighbour in the scope")
        q &= ~(1 << v)
    k = _kernel_of(d, dm.dist2)
    if k is None:
        raise PreconditionError("D[N--(Q)] has no kernel")
    if dm.a.bit_count() <= dm.dist2.bit_count():
        return q
    return (dm.m1 | k) & ~d.in_nbhd_mask(k)


def small_qk_via_kernel_of_n2(d: Digraph, q: Iterable[int]) -> frozenset[int]:
    """Small quasi-kernel from a quasi-kernel whose second layer induces a kernel-having digraph."""
    _require_sink_free(d)
    qm = mask_of(q, d.n)
    if not is_qk_mask(d, qm):
        raise InvalidInputError("argument is not a quasi-kernel")
    _, d2, _ = distance_masks(d, qm)
    if _kernel_of(d, d2) is None:
        raise PreconditionError("D[N--(Q)] has no kernel")
    result = _lemma1_mask(d, d.full_mask, qm)
    if not is_qk_mask(d, result) or result.bit_count() > d.n // 2:
        raise InvariantError(f"second-layer kernel construction gave {_fmt(result)}")
    return members(result)


def small_qk_good(d: Digraph, q_good: Iterable[int]) -> frozenset[int]:
    """Shrink a good quasi-kernel to its matched part until A is empty."""
    _require_sink_free(d)
    q = mask_of(q_good, d.n)
    if not is_good_qk_mask(d, q):
        raise InvalidInputError("argument is not a good quasi-kernel")
    while True:
        dm = decompose_mask(d, q)
        if not dm.a:
            break
        q = dm.m1
        if not is_good_qk_mask(d, q):
            raise InvariantError("matched part of a good quasi-kernel is not good")
    if q.bit_count() > dm.dist1.bit_count():
        raise InvariantError("good quasi-kernel larger than its in-neighbourhood")
    return members(q)


def _kernel_perfect(d: Digraph, part: int, trust: bool) -> bool:
    if trust or is_dag_mask(d, part):
        return True
    if part.bit_count() > KERNEL_PERFECT_BUDGET:
        raise PreconditionError(
            "part is too large for the exact kernel-perfectness check; pass trust_kernel_perfect"
        )
    return is_kernel_perfect_mask(d, part)


def _twice_partition_bound(d: Digraph) -> int:
    s = sinks_mask(d)
    return d.n + s.bit_count() - (d.in_nbhd_mask(s) & ~s).bit_count()


def partition_bound(d: Digraph) -> float:
    """(n + |S| − |N⁻(S)|) / 2 for the sink set S."""
    return _twice_partition_bound(d) / 2


def small_qk_partitioned(
    d: Digraph, v1: Iterable[int], v2: Iterable[int], trust_kernel_perfect: bool = False
) -> frozenset[int]:
    """Quasi-kernel of size ≤ (n+|S|−|N⁻(S)|)/2 from a two-part kernel-perfect split.

    ``v1`` and ``v2`` must partition V \\ N⁻[S], S the sinks. Parts inducing DAGs
    are accepted directly; other parts are checked exhaustively unless
    ``trust_kernel_perfect`` is set.
    """
    p1, p2 = mask_of(v1, d.n), mask_of(v2, d.n)
    s = sinks_mask(d)
    ns = d.in_nbhd_mask(s) & ~s
    scope = d.full_mask & ~(s | ns)
    if p1 & p2 or (p1 | p2) != scope:
        raise PreconditionError("v1, v2 must partition V minus the closed in-neighbourhood of the sinks")
    for part in (p1, p2):
        if not _kernel_perfect(d, part, trust_kernel_perfect):
            raise PreconditionError(f"part {_fmt(part)} is not kernel-perfect")
    out = d.out_masks
    moved = True
    while moved:
        moved = False
        for v in iter_bits(p2):
            if not out[v] & p1:
                p1 |= 1 << v
                p2 &= ~(1 << v)
                moved = True
                break
    k = _kernel_of(d, p1)
    if k is None:
        raise PreconditionError("no kernel found for D[V1]")
    result = s
    if scope:
        dm = decompose_mask(d, k, scope)
        dropped = 0
        for a in iter_bits(dm.a):
            if not out[a] & scope:
                dropped |= 1 << a
        inner = scope & ~dropped
        result |= _lemma1_mask(d, inner, k & ~dropped)
    if not is_qk_mask(d, result):
        raise InvariantError(f"partition construction gave non-quasi-kernel {_fmt(result)}")
    if 2 * result.bit_count() > _twice_partition_bound(d):
        raise InvariantError(f"partition construction exceeded the bound: {_fmt(result)}")
    return members(result)


def lift_good_qk_composition(spec: CompositionSpec, q_t: Iterable[int]) -> frozenset[int]:
    """Good quasi-kernel of T[H₁,…,H_m] from a good quasi-kernel of T."""
    t = spec.template
    qm = mask_of(q_t, t.n)
    if t.n < 2:
        raise InvalidInputError("template needs at least two vertices")
    if not is_good_qk_mask(t, qm):
        raise InvalidInputError("q_t is not a good quasi-kernel of the template")
    blocks = spec.blocks
    lifted = 0
    for i in iter_bits(qm):
        part = spec.parts[i]
        if part.n == 0:
            raise InvalidInputError(f"part {i} is empty")
        lifted |= cl_mask(part) << blocks[i].start
    composed = compose(spec)
    if not is_good_qk_mask(composed, lifted):
        raise InvariantError("lifted set is not a good quasi-kernel of the composition")
    return members(lifted)
