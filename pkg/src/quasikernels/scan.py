"""Exhaustive and sampled scans that check the small-quasi-kernel results.

A scan walks a stream of instances (every labeled digraph of the given orders,
or seeded random samples of one family), runs the selected checks on each and
folds the outcomes into a :class:`ScanReport`. Checks only call library
functions; anything that fails is stored with the serialized digraph so it can
be re-checked offline.
"""
from __future__ import annotations

import dataclasses
import json
import math
import time
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from functools import cached_property, partial

from .digraph import Digraph, distance_masks, iter_bits, members, serialize_digraph, sinks_mask
from .errors import InvalidInputError, QkError, SearchCapExceeded
from .generators import (
    MAX_EXHAUSTIVE_N,
    count_digraphs,
    digraph_hash,
    instance_rng,
    iter_digraphs,
    random_dag_partitioned,
    random_digraph,
    random_indeg_le_3,
    random_sink_free,
    random_sink_free_semicomplete,
    random_split,
)
from .qk import (
    cl_mask,
    is_good_qk_mask,
    is_qk_mask,
    jacob_meyniel_masks,
    kernel_dag_mask,
    kernel_search_mask,
    minimum_quasi_kernel_mask,
)
from .recognition import (
    find_forbidden,
    greedy_acyclic_partition,
    is_dag_mask,
    is_semicomplete,
    is_tournament,
    recognize_one_way_split,
    verify_witness,
)
from .small import (
    partition_bound,
    small_qk_anti_claw_free,
    small_qk_good,
    small_qk_k41_free,
    small_qk_partitioned,
    small_qk_via_kernel_of_n2,
    theorem3_predicate,
)
from .split import (
    OneWaySplitPartition,
    construct_d_k,
    d_k_partition,
    split_bound,
    split_min_qk_exact,
    split_small_qk,
)

CHECKS = (
    "conjecture",
    "thm1",
    "thm2",
    "thm3_contrapositive",
    "thm4",
    "thm5",
    "thm6",
    "lemma1",
    "jm",
    "oracle_cross",
)
FAMILIES = (
    "all",
    "sink_free",
    "tournament",
    "semicomplete",
    "one_way_split",
    "indeg_le_3",
    "dag_partitioned",
)
_SINK_FREE_FAMILIES = {"sink_free", "tournament", "semicomplete", "indeg_le_3"}
_EXHAUSTIVE_CHUNK = 1 << 14
_SAMPLED_CHUNK = 32


@dataclasses.dataclass(frozen=True)
class ScanConfig:
    """Scan parameters.

    Sampled tournament/semicomplete instances are resampled until sink-free;
    ``one_way_split`` instances are always sink-free. ``exact_budget`` caps the
    order for exhaustive oracles inside checks (larger instances skip them).
    """

    mode: str = "sampled"
    n_min: int = 2
    n_max: int = 5
    sample_count: int = 100
    p: float = 0.3
    family: str = "all"
    seed: int = 0
    workers: int = 1
    checks: tuple[str, ...] = ("conjecture",)
    record_instances: bool = False
    exact_budget: int = 16

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))
        if self.mode not in ("exhaustive", "sampled"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown family {self.family!r}")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise InvalidInputError(f"unknown checks {bad}")
        if not 0 <= self.n_min <= self.n_max:
            raise InvalidInputError("need 0 <= n_min <= n_max")
        if self.mode == "exhaustive" and self.n_max > MAX_EXHAUSTIVE_N:
            raise InvalidInputError(f"exhaustive mode is limited to n <= {MAX_EXHAUSTIVE_N}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidInputError("p must lie in [0, 1]")
        if self.workers < 1:
            raise InvalidInputError("workers must be positive")
        if self.mode == "sampled" and self.family != "all" and self.n_min < 2:
            raise InvalidInputError(f"family {self.family} needs n_min >= 2")
        if self.mode == "sampled" and self.family == "tournament" and self.n_min < 3:
            raise InvalidInputError("sink-free tournaments need n_min >= 3")


@dataclasses.dataclass
class ScanReport:
    config: ScanConfig
    aggregate: dict
    instances: list[dict]
    counterexamples: list[dict]

    def to_dict(self) -> dict:
        # the worker count never changes results, so it stays out of the report
        config = {k: v for k, v in dataclasses.asdict(self.config).items() if k != "workers"}
        return {
            "config": config,
            "aggregate": self.aggregate,
            "instances": self.instances,
            "counterexamples": self.counterexamples,
        }

    def to_json(self, include_wall_time: bool = True) -> str:
        data = self.to_dict()
        if not include_wall_time:
            data["aggregate"] = {k: v for k, v in data["aggregate"].items() if k != "wall_time_s"}
        return json.dumps(data, sort_keys=True, indent=1) + "\n"

    @property
    def ok(self) -> bool:
        return not self.counterexamples


class _Instance:
    def __init__(self, index: int, d: Digraph, config: ScanConfig, split=None, partition=None):
        self.index = index
        self.d = d
        self.config = config
        self.split = split
        self.partition = partition

    @cached_property
    def sink_free(self) -> bool:
        return self.d.n > 0 and all(self.d.out_masks)

    @cached_property
    def min_qk(self) -> int | None:
        """Exact minimum quasi-kernel mask, or None past the exact budget."""
        if self.d.n > self.config.exact_budget:
            return None
        return minimum_quasi_kernel_mask(self.d)

    @cached_property
    def cl(self) -> int:
        return cl_mask(self.d)

    @cached_property
    def split_partition(self) -> OneWaySplitPartition | None:
        if self.split is not None:
            return self.split
        found = recognize_one_way_split(self.d)
        return None if found is None else OneWaySplitPartition(*found)


class _Skip(Exception):
    pass


class _Fail(Exception):
    def __init__(self, reason: str, certificate: dict | None = None):
        super().__init__(reason)
        self.certificate = certificate or {}


def _small_min(inst: _Instance) -> int:
    if not inst.sink_free:
        raise _Skip
    q = inst.min_qk
    if q is None:
        raise _Skip
    if q.bit_count() > inst.d.n // 2:
        raise _Fail("no quasi-kernel of size <= n/2", {"minimum": sorted(iter_bits(q))})
    return q.bit_count()


def _check_conjecture(inst: _Instance, tallies: dict) -> dict:
    return {"min_qk": _small_min(inst)}


def _check_thm1(inst: _Instance, tallies: dict) -> dict:
    if not inst.sink_free:
        raise _Skip
    d = inst.d
    out = small_qk_anti_claw_free(d)
    free = find_forbidden(d, "anti_claw") is None
    if free:
        _bump(tallies, "thm1.anti_claw_free")
    if out.witness is not None:
        if free or not verify_witness(d, out.witness):
            raise _Fail("witness on an anti-claw-free digraph", out.witness.to_dict())
        _bump(tallies, "thm1.witness")
        return {"witness": out.witness.to_dict()}
    return {"size": len(out.quasi_kernel)}


def _check_thm2(inst: _Instance, tallies: dict) -> dict:
    if not inst.sink_free:
        raise _Skip
    d = inst.d
    out = small_qk_k41_free(d)
    free = find_forbidden(d, "k41") is None and find_forbidden(d, "k41_plus") is None
    if free:
        _bump(tallies, "thm2.k41_free")
    if out.witness is not None:
        if free or not verify_witness(d, out.witness):
            raise _Fail("witness on a K41/K41+-free digraph", out.witness.to_dict())
        _bump(tallies, "thm2.witness")
        return {"witness": out.witness.to_dict()}
    return {"size": len(out.quasi_kernel)}


def _check_thm3(inst: _Instance, tallies: dict) -> dict:
    if not inst.sink_free:
        raise _Skip
    holds, _ = theorem3_predicate(inst.d)
    if holds:
        _bump(tallies, "thm3.predicate_true")
        raise _Skip
    return {"min_qk": _small_min(inst)}


def _check_thm4(inst: _Instance, tallies: dict) -> dict:
    d = inst.d
    if not inst.sink_free or d.n > inst.config.exact_budget:
        raise _Skip
    k = kernel_search_mask(d)
    if k is None:
        raise _Skip
    if not is_good_qk_mask(d, k):
        raise _Fail("kernel of a sink-free digraph is not a good quasi-kernel", {"kernel": sorted(iter_bits(k))})
    q = small_qk_good(d, members(k))
    return {"kernel": len(members(k)), "size": len(q)}


def _check_thm5(inst: _Instance, tallies: dict) -> dict:
    part = inst.split_partition
    if part is None or not inst.sink_free:
        raise _Skip
    q = split_small_qk(inst.d, part)
    return {"size": len(q), "bound": split_bound(inst.d.n)}


def _check_thm6(inst: _Instance, tallies: dict) -> dict:
    d = inst.d
    s = sinks_mask(d)
    scope = d.full_mask & ~(s | d.in_nbhd_mask(s))
    if inst.partition is not None:
        v1 = frozenset(v for v in inst.partition[0] if scope >> v & 1)
        v2 = frozenset(v for v in inst.partition[1] if scope >> v & 1)
    else:
        found = greedy_acyclic_partition(d, iter_bits(scope))
        if found is None:
            raise _Skip
        v1, v2 = found
    q = small_qk_partitioned(d, v1, v2)
    return {"size": len(q), "bound": partition_bound(d)}


def _check_lemma1(inst: _Instance, tallies: dict) -> dict:
    d = inst.d
    if not inst.sink_free:
        raise _Skip
    q = inst.cl
    _, d2, _ = distance_masks(d, q)
    if not is_dag_mask(d, d2):
        if d2.bit_count() > inst.config.exact_budget or kernel_search_mask(d, d2) is None:
            raise _Skip
    out = small_qk_via_kernel_of_n2(d, members(q))
    return {"size": len(out)}


def _check_jm(inst: _Instance, tallies: dict) -> dict:
    d = inst.d
    refined, tilde = jacob_meyniel_masks(d, inst.cl)
    if not is_qk_mask(d, refined):
        raise _Fail("refinement is not a quasi-kernel", {"refined": sorted(iter_bits(refined))})
    if refined & d.in_nbhd_mask(tilde) & ~tilde:
        raise _Fail("refinement meets N-(Q~)", {"refined": sorted(iter_bits(refined))})
    return {"size": refined.bit_count()}


def _check_oracle_cross(inst: _Instance, tallies: dict) -> dict:
    d = inst.d
    detail = {}
    q = inst.min_qk
    if q is not None:
        detail["min_qk"] = q.bit_count()
        if q.bit_count() > inst.cl.bit_count():
            raise _Fail("minimum exceeds the CL quasi-kernel", {"minimum": sorted(iter_bits(q))})
        part = inst.split_partition
        if part is not None and inst.sink_free:
            size, _ = split_min_qk_exact(d, part)
            detail["split_min"] = size
            if size != q.bit_count():
                raise _Fail("split oracle disagrees", {"split": size, "exact": q.bit_count()})
    if d.n <= inst.config.exact_budget and is_dag_mask(d, d.full_mask):
        k1, k2 = kernel_dag_mask(d), kernel_search_mask(d)
        detail["dag_kernel"] = k1.bit_count()
        if k1 != k2:
            raise _Fail("DAG kernel disagrees with exhaustive kernel", {"dag": k1, "exact": k2})
    if not detail:
        raise _Skip
    return detail


_CHECK_FUNCS = {
    "conjecture": _check_conjecture,
    "thm1": _check_thm1,
    "thm2": _check_thm2,
    "thm3_contrapositive": _check_thm3,
    "thm4": _check_thm4,
    "thm5": _check_thm5,
    "thm6": _check_thm6,
    "lemma1": _check_lemma1,
    "jm": _check_jm,
    "oracle_cross": _check_oracle_cross,
}


def _bump(tallies: dict, key: str, by: int = 1) -> None:
    tallies[key] = tallies.get(key, 0) + by


def _family_member(d: Digraph, family: str) -> bool:
    if family == "all":
        return True
    if family == "sink_free":
        return all(d.out_masks)
    if family == "tournament":
        return all(d.out_masks) and is_tournament(d)
    if family == "semicomplete":
        return all(d.out_masks) and is_semicomplete(d)
    if family == "one_way_split":
        return d.n > 0 and all(d.out_masks) and recognize_one_way_split(d) is not None
    if family == "indeg_le_3":
        return all(d.out_masks) and all(m.bit_count() <= 3 for m in d.in_masks)
    if family == "dag_partitioned":
        return greedy_acyclic_partition(d, range(d.n)) is not None
    raise InvalidInputError(family)


def _sampled_instance(config: ScanConfig, index: int) -> _Instance:
    rng = instance_rng(config.seed, index)
    n = rng.randint(config.n_min, config.n_max)
    fam, p = config.family, config.p
    if fam == "all":
        return _Instance(index, random_digraph(n, p, rng), config)
    if fam == "sink_free":
        return _Instance(index, random_sink_free(n, p, rng), config)
    if fam in ("tournament", "semicomplete"):
        d = random_sink_free_semicomplete(n, rng, tournament=fam == "tournament")
        return _Instance(index, d, config)
    if fam == "one_way_split":
        ny = rng.randint(2, n)
        d, x, y = random_split(n - ny, ny, max(p, 1e-3), rng)
        return _Instance(index, d, config, split=OneWaySplitPartition(x, y))
    if fam == "indeg_le_3":
        return _Instance(index, random_indeg_le_3(n, p, rng), config)
    d, v1, v2 = random_dag_partitioned(n, p, rng)
    return _Instance(index, d, config, partition=(v1, v2))


def _chunks(config: ScanConfig) -> list[tuple]:
    if config.mode == "sampled":
        return [
            ("sampled", start, min(start + _SAMPLED_CHUNK, config.sample_count))
            for start in range(0, config.sample_count, _SAMPLED_CHUNK)
        ]
    out, offset = [], 0
    for n in range(config.n_min, config.n_max + 1):
        total = count_digraphs(n)
        for start in range(0, total, _EXHAUSTIVE_CHUNK):
            out.append(("exhaustive", n, offset, start, min(start + _EXHAUSTIVE_CHUNK, total)))
        offset += total
    return out


def _chunk_instances(config: ScanConfig, chunk: tuple) -> Iterator[_Instance]:
    if chunk[0] == "sampled":
        for index in range(chunk[1], chunk[2]):
            yield _sampled_instance(config, index)
        return
    _, n, offset, start, stop = chunk
    sink_free_only = config.family in _SINK_FREE_FAMILIES or config.family == "one_way_split"
    for code, d in iter_digraphs(n, sink_free_only, start, stop):
        if _family_member(d, config.family):
            yield _Instance(offset + code, d, config)


def _empty_partial() -> dict:
    return {
        "instances": 0,
        "by_n": {},
        "checks": {},
        "tallies": {},
        "max_ratio": None,
        "max_ratio_index": None,
        "records": [],
        "counterexamples": [],
    }


def _run_chunk(config: ScanConfig, chunk: tuple) -> dict:
    part = _empty_partial()
    for inst in _chunk_instances(config, chunk):
        d = inst.d
        part["instances"] += 1
        part["by_n"][str(d.n)] = part["by_n"].get(str(d.n), 0) + 1
        statuses, details = {}, {}
        for name in config.checks:
            counts = part["checks"].setdefault(name, {"pass": 0, "fail": 0, "skip": 0})
            try:
                details[name] = _CHECK_FUNCS[name](inst, part["tallies"])
                status = "pass"
            except _Skip:
                status = "skip"
            except _Fail as exc:
                status = "fail"
                part["counterexamples"].append(_counterexample(inst, name, str(exc), exc.certificate))
            except SearchCapExceeded as exc:
                status = "fail"
                part["counterexamples"].append(_counterexample(inst, name, str(exc), {}))
            except QkError as exc:
                # invariant/precondition errors inside an algorithm are findings too
                status = "fail"
                part["counterexamples"].append(
                    _counterexample(inst, name, f"{type(exc).__name__}: {exc}", {})
                )
            counts[status] += 1
            statuses[name] = status
        if "min_qk" in inst.__dict__ and inst.min_qk is not None and inst.sink_free and d.n >= 2:
            ratio = inst.min_qk.bit_count() / (d.n // 2)
            if part["max_ratio"] is None or ratio > part["max_ratio"]:
                part["max_ratio"], part["max_ratio_index"] = ratio, inst.index
        if config.record_instances:
            rec = {"index": inst.index, "n": d.n, "hash": digraph_hash(d), "checks": statuses}
            if "min_qk" in inst.__dict__ and inst.min_qk is not None:
                rec["min_qk"] = inst.min_qk.bit_count()
            rec["details"] = details
            part["records"].append(rec)
    return part


def _counterexample(inst: _Instance, check: str, reason: str, certificate: dict) -> dict:
    return {
        "index": inst.index,
        "check": check,
        "reason": reason,
        "n": inst.d.n,
        "hash": digraph_hash(inst.d),
        "graph": serialize_digraph(inst.d),
        "certificate": certificate,
    }


def _merge(parts: list[dict]) -> dict:
    total = _empty_partial()
    for part in parts:
        total["instances"] += part["instances"]
        for n, c in part["by_n"].items():
            total["by_n"][n] = total["by_n"].get(n, 0) + c
        for name, counts in part["checks"].items():
            dst = total["checks"].setdefault(name, {"pass": 0, "fail": 0, "skip": 0})
            for k, v in counts.items():
                dst[k] += v
        for k, v in part["tallies"].items():
            _bump(total["tallies"], k, v)
        if part["max_ratio"] is not None and (
            total["max_ratio"] is None or part["max_ratio"] > total["max_ratio"]
        ):
            total["max_ratio"], total["max_ratio_index"] = part["max_ratio"], part["max_ratio_index"]
        total["records"].extend(part["records"])
        total["counterexamples"].extend(part["counterexamples"])
    return total


def run_scan(config: ScanConfig) -> ScanReport:
    """Run every selected check over the configured instance stream.

    Results do not depend on ``workers``: chunks are merged in chunk order and
    every random instance draws from its own seeded substream.
    """
    t0 = time.perf_counter()
    chunks = _chunks(config)
    worker = partial(_run_chunk, config)
    if config.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(worker, chunks))
    else:
        parts = [worker(c) for c in chunks]
    merged = _merge(parts)
    aggregate = {
        "instances": merged["instances"],
        "by_n": dict(sorted(merged["by_n"].items(), key=lambda kv: int(kv[0]))),
        "checks": merged["checks"],
        "tallies": dict(sorted(merged["tallies"].items())),
        "max_min_qk_ratio": merged["max_ratio"],
        "max_ratio_instance": merged["max_ratio_index"],
        "counterexample_count": len(merged["counterexamples"]),
        "seed": config.seed,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    return ScanReport(config, aggregate, merged["records"], merged["counterexamples"])


def reproduce_sharpness_table(k_max: int) -> list[dict]:
    """Rows (k, n, exact minimum, (n+3)/2 − √n, equal) for the extremal family."""
    if not 1 <= k_max <= 6:
        raise InvalidInputError("k_max must be between 1 and 6")
    rows = []
    for k in range(1, k_max + 1):
        d = construct_d_k(k)
        size, _ = split_min_qk_exact(d, d_k_partition(k))
        bound = split_bound(d.n)
        rows.append(
            {
                "k": k,
                "n": d.n,
                "min_qk": size,
                "bound": bound,
                "equal": math.isclose(size, bound, rel_tol=0, abs_tol=1e-9) and size == 2 * k * k + 1,
            }
        )
    return rows
