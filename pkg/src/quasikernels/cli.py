"""Command-line interface: ``qk gen|verify|find|min|scan|table``.

Exit codes: 0 when everything checks out, 1 on a failed check or a
counterexample (reports are still written), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .digraph import (
    CompositionSpec,
    Digraph,
    compose,
    iter_bits,
    mask_of,
    parse_digraph,
    parse_labels,
    serialize_digraph,
    sinks_mask,
)
from .errors import InvalidInputError, QkError, ResourceLimitError
from .generators import random_digraph, random_semicomplete, random_sink_free, random_split, random_tournament
from .qk import (
    is_good_qk_mask,
    is_kernel_mask,
    is_qk_mask,
    minimum_quasi_kernel_exact,
    quasi_kernel_cl,
)
from .recognition import greedy_acyclic_partition, recognize_one_way_split
from .scan import CHECKS, FAMILIES, ScanConfig, reproduce_sharpness_table, run_scan
from .small import (
    small_qk_anti_claw_free,
    small_qk_good,
    small_qk_k41_free,
    small_qk_partitioned,
    small_qk_via_kernel_of_n2,
)
from .split import (
    DSTAR_LABELS,
    OneWaySplitPartition,
    circulant_tournament,
    construct_d_k,
    construct_dstar,
    split_min_qk_exact,
    split_small_qk,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_graph(path: str) -> tuple[Digraph, dict[int, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_digraph(text), parse_labels(text)


def _parse_set(text: str | None, labels: dict[int, str], by_label: bool) -> list[int]:
    if text is None:
        raise _UsageError("--set is required here")
    names = [t for t in text.replace(" ", ",").split(",") if t]
    if by_label:
        ids = {name: v for v, name in labels.items()}
        missing = [n for n in names if n not in ids]
        if missing:
            raise _UsageError(f"unknown labels {missing}")
        return [ids[n] for n in names]
    try:
        return [int(t) for t in names]
    except ValueError as exc:
        raise _UsageError(f"--set expects vertex ids, got {text!r}") from exc


def _read_partition(path: str) -> dict[str, list[int]]:
    """Lines ``<NAME> v v v`` with NAME in V1, V2, X, Y; ``#`` comments allowed."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc
    parts: dict[str, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        key = key.upper()
        if key not in ("V1", "V2", "X", "Y") or not all(t.isdigit() for t in rest):
            raise _UsageError(f"{path}: line {lineno}: expected '<V1|V2|X|Y> <ids...>'")
        parts.setdefault(key, []).extend(int(t) for t in rest)
    return parts


def _names(vs, labels: dict[int, str], by_label: bool) -> list:
    vs = sorted(vs)
    return [labels.get(v, str(v)) for v in vs] if by_label else vs


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc.strerror}") from exc


# subcommands


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    labels = None
    kind = args.type
    if kind in ("random", "tournament", "semicomplete") and args.n is None:
        raise _UsageError(f"--type {kind} needs --n")
    if kind == "random":
        d = random_sink_free(args.n, args.p, rng) if args.sink_free else random_digraph(args.n, args.p, rng)
    elif kind == "tournament":
        d = random_tournament(args.n, rng)
    elif kind == "semicomplete":
        d = random_semicomplete(args.n, rng)
    elif kind == "circulant":
        d = circulant_tournament(args.k)
    elif kind == "dk":
        d = construct_d_k(args.k)
    elif kind == "dstar":
        d, labels = construct_dstar(), DSTAR_LABELS
    elif kind == "split":
        if args.nx is None or args.ny is None:
            raise _UsageError("--type split needs --nx and --ny")
        d, _, _ = random_split(args.nx, args.ny, args.p, rng)
    else:
        d = _gen_compose(args, rng)
    _write(args.out, serialize_digraph(d, labels))
    return EXIT_OK


def _gen_compose(args, rng: random.Random) -> Digraph:
    if args.template:
        template, _ = _read_graph(args.template)
        if len(args.parts or []) != template.n:
            raise _UsageError(f"template has {template.n} vertices; pass that many --parts files")
        parts = tuple(_read_graph(p)[0] for p in args.parts)
    else:
        n = args.n if args.n is not None else 3
        template = random_sink_free(n, args.p, rng)
        parts = tuple(random_digraph(rng.randint(1, args.k or 3), args.p, rng) for _ in range(n))
    return compose(CompositionSpec(template, parts))


def cmd_verify(args) -> int:
    d, labels = _read_graph(args.graph)
    vs = _parse_set(args.set, labels, args.by_label)
    q = mask_of(vs, d.n)
    independent = d.is_independent_mask(q)
    if args.mode == "kernel":
        ok = is_kernel_mask(d, q)
    elif args.mode == "qk":
        ok = is_qk_mask(d, q)
    elif args.mode == "good-qk":
        ok = is_good_qk_mask(d, q)
    else:
        ok = is_qk_mask(d, q) and 2 * q.bit_count() <= d.n
    _emit({"mode": args.mode, "set": _names(vs, labels, args.by_label), "independent": independent, "ok": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_find(args) -> int:
    d, labels = _read_graph(args.graph)
    algo = args.algo
    out: dict = {"algo": algo}
    if algo == "cl":
        q = quasi_kernel_cl(d)
    elif algo in ("anti-claw", "k41"):
        res = small_qk_anti_claw_free(d) if algo == "anti-claw" else small_qk_k41_free(d)
        out["steps"] = res.steps
        if res.witness is not None:
            w = res.witness.to_dict()
            if args.by_label:
                w["center"] = labels.get(w["center"], str(w["center"]))
                w["tails"] = _names(w["tails"], labels, True)
            out["witness"] = w
            _emit(out)
            return EXIT_OK
        q = res.quasi_kernel
    elif algo == "good":
        q = small_qk_good(d, _parse_set(args.set, labels, args.by_label))
    elif algo == "lemma-n2":
        seed = quasi_kernel_cl(d) if args.set is None else _parse_set(args.set, labels, args.by_label)
        q = small_qk_via_kernel_of_n2(d, seed)
    elif algo == "partition":
        if args.partition:
            parts = _read_partition(args.partition)
            v1, v2 = parts.get("V1", []), parts.get("V2", [])
        else:
            s = sinks_mask(d)
            scope = d.full_mask & ~(s | d.in_nbhd_mask(s))
            found = greedy_acyclic_partition(d, iter_bits(scope))
            if found is None:
                raise _UsageError("no acyclic two-part split found; pass --partition")
            v1, v2 = found
        q = small_qk_partitioned(d, v1, v2, trust_kernel_perfect=args.trust_kernel_perfect)
    else:
        part = _split_partition(d, args.partition)
        q = split_small_qk(d, part)
    out["set"] = _names(q, labels, args.by_label)
    out["size"] = len(q)
    _emit(out)
    return EXIT_OK


def _split_partition(d: Digraph, path: str | None) -> OneWaySplitPartition:
    if path:
        parts = _read_partition(path)
        return OneWaySplitPartition(frozenset(parts.get("X", [])), frozenset(parts.get("Y", [])))
    found = recognize_one_way_split(d)
    if found is None:
        raise InvalidInputError("digraph is not a one-way split digraph")
    return OneWaySplitPartition(*found)


def cmd_min(args) -> int:
    d, labels = _read_graph(args.graph)
    if args.split_exact:
        size, q = split_min_qk_exact(d, _split_partition(d, args.partition))
    else:
        size, q = minimum_quasi_kernel_exact(d, cap=args.cap, workers=args.workers)
    _emit({"size": size, "set": _names(q, labels, args.by_label), "half": d.n // 2})
    return EXIT_OK


def _parse_n(text: str) -> tuple[int, int]:
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return int(lo), int(hi)
    return int(text), int(text)


def cmd_scan(args) -> int:
    try:
        n_min, n_max = _parse_n(args.n)
    except ValueError as exc:
        raise _UsageError(f"--n expects N or LO..HI, got {args.n!r}") from exc
    checks = CHECKS if args.checks == "all" else tuple(c for c in args.checks.split(",") if c)
    config = ScanConfig(
        mode=args.mode,
        n_min=n_min,
        n_max=n_max,
        sample_count=args.samples,
        p=args.p,
        family=args.family,
        seed=args.seed,
        workers=args.workers,
        checks=checks,
        record_instances=args.record_instances,
    )
    report = run_scan(config)
    text = report.to_json()
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    agg = report.aggregate
    print(
        f"scanned {agg['instances']} instances, {agg['counterexample_count']} counterexamples, "
        f"{agg['wall_time_s']}s",
        file=sys.stderr,
    )
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_table(args) -> int:
    rows = reproduce_sharpness_table(args.k_max)
    if args.json:
        print(json.dumps(rows, sort_keys=True))
    else:
        print(f"{'k':>2} {'n':>4} {'min_qk':>6} {'bound':>8} equal")
        for r in rows:
            print(f"{r['k']:>2} {r['n']:>4} {r['min_qk']:>6} {r['bound']:>8.3f} {r['equal']}")
    return EXIT_OK if all(r["equal"] for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qk", description="Quasi-kernel algorithms, oracles and scans.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a digraph file")
    g.add_argument("--type", required=True,
                   choices=["random", "tournament", "semicomplete", "circulant", "split", "dk", "dstar", "compose"])
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--nx", type=int)
    g.add_argument("--ny", type=int)
    g.add_argument("--p", type=float, default=0.3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sink-free", action="store_true", help="repair sinks (random type)")
    g.add_argument("--template", help="template graph file (compose)")
    g.add_argument("--parts", nargs="*", help="part graph files, one per template vertex (compose)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    def graph_args(sp):
        sp.add_argument("--graph", required=True)
        sp.add_argument("--by-label", action="store_true", help="read and print vertices by file labels")

    v = sub.add_parser("verify", help="check a vertex set")
    graph_args(v)
    v.add_argument("--set", required=True)
    v.add_argument("--mode", required=True, choices=["kernel", "qk", "good-qk", "small-qk"])
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("find", help="run a construction")
    graph_args(f)
    f.add_argument("--algo", required=True, choices=["cl", "anti-claw", "k41", "good", "lemma-n2", "partition", "split"])
    f.add_argument("--partition", help="file with 'V1 ...'/'V2 ...' or 'X ...'/'Y ...' lines")
    f.add_argument("--set")
    f.add_argument("--trust-kernel-perfect", action="store_true")
    f.set_defaults(func=cmd_find)

    m = sub.add_parser("min", help="exact minimum quasi-kernel")
    graph_args(m)
    m.add_argument("--cap", type=int)
    m.add_argument("--split-exact", action="store_true")
    m.add_argument("--partition")
    m.add_argument("--workers", type=int, default=1)
    m.set_defaults(func=cmd_min)

    s = sub.add_parser("scan", help="exhaustive or sampled scan")
    s.add_argument("--mode", required=True, choices=["exhaustive", "sampled"])
    s.add_argument("--n", required=True, help="N or LO..HI")
    s.add_argument("--checks", default="conjecture", help=f"comma list from {','.join(CHECKS)}, or all")
    s.add_argument("--family", default="all", choices=FAMILIES)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--p", type=float, default=0.3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--record-instances", action="store_true")
    s.add_argument("--report", help="JSON report path (stdout if omitted)")
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("table", help="sharpness table for the extremal split family")
    t.add_argument("--k-max", type=int, required=True)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_table)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (_UsageError, InvalidInputError, ResourceLimitError) as exc:
        print(f"qk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QkError as exc:
        print(f"qk: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
