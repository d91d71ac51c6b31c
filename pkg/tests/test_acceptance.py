"""Acceptance criteria 1-14, one test each.

Every test records a ``criterion N PASS|FAIL: ...`` line; the lines are printed
in the terminal summary (see conftest.py) and immediately when run with -s.
Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import contextlib
import json
import sys
from itertools import combinations, product

import pytest

import oracles
from quasikernels.cli import main as cli_main
from quasikernels.digraph import (
    CompositionSpec,
    Digraph,
    compose,
    in_neighborhood,
    members,
    second_in_neighborhood,
    sinks,
)
from quasikernels.generators import (
    instance_rng,
    iter_digraphs,
    random_dag_partitioned,
    random_digraph,
    random_indeg_le_3,
    random_sink_free,
    random_sink_free_semicomplete,
    random_split,
)
from quasikernels.qk import (
    is_good_quasi_kernel,
    jacob_meyniel_masks,
    jacob_meyniel_refine,
    kernel_dag,
    kernel_exact,
    minimum_quasi_kernel_exact,
    quasi_kernel_cl,
    verify_quasi_kernel,
)
from quasikernels.recognition import verify_witness
from quasikernels.scan import ScanConfig, run_scan
from quasikernels.small import (
    lift_good_qk_composition,
    partition_bound,
    small_qk_anti_claw_free,
    small_qk_good,
    small_qk_k41_free,
    small_qk_partitioned,
)
from quasikernels.split import (
    OneWaySplitPartition,
    construct_d_k,
    construct_dstar,
    d_k_partition,
    split_bound,
    split_min_qk_exact,
    split_small_qk,
)

CRITERIA_LINES: list[str] = []
EPS = 1e-9


@contextlib.contextmanager
def criterion(number: int, title: str):
    notes: dict = {}
    try:
        yield notes
    except BaseException as exc:
        line = f"criterion {number:2d} FAIL: {title} ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        CRITERIA_LINES.append(line)
        print(line)
        raise
    summary = ", ".join(f"{k}={v}" for k, v in notes.items())
    line = f"criterion {number:2d} PASS: {title} [{summary}]"
    CRITERIA_LINES.append(line)
    print(line)


def small(d: Digraph, q) -> bool:
    return len(q) <= d.n // 2 and verify_quasi_kernel(d, q)[0]


def one_based(*labels):
    return frozenset(v - 1 for v in labels)


@pytest.fixture(scope="module")
def exhaustive_sink_free():
    """One exhaustive pass over all sink-free digraphs with n <= 5."""
    config = ScanConfig(
        mode="exhaustive",
        n_min=1,
        n_max=5,
        family="sink_free",
        checks=("conjecture", "thm1", "thm3_contrapositive"),
    )
    return run_scan(config)


def test_criterion_01_existence():
    with criterion(1, "Chvátal–Lovász output is a quasi-kernel") as notes:
        count = 0
        for n in range(5):
            for _, d in iter_digraphs(n):
                assert verify_quasi_kernel(d, quasi_kernel_cl(d))[0], sorted(d.arcs)
                count += 1
        notes["exhaustive"] = count
        for i in range(100_000):
            rng = instance_rng(2024, i)
            d = random_digraph(rng.randint(1, 12), rng.choice((0.05, 0.15, 0.3, 0.5)), rng)
            assert verify_quasi_kernel(d, quasi_kernel_cl(d))[0], sorted(d.arcs)
        notes["random"] = 100_000
        assert count == 1 + 1 + 4 + 64 + 4096


def test_criterion_02_conjecture_exhaustive(exhaustive_sink_free):
    with criterion(2, "every sink-free digraph with n <= 5 has a quasi-kernel of size <= n/2") as notes:
        agg = exhaustive_sink_free.aggregate
        counts = agg["checks"]["conjecture"]
        notes.update(instances=agg["instances"], max_ratio=agg["max_min_qk_ratio"], s=agg["wall_time_s"])
        assert agg["by_n"] == {"2": 1, "3": 27, "4": 2401, "5": 759375}
        assert counts == {"pass": 761804, "fail": 0, "skip": 0}
        assert not exhaustive_sink_free.counterexamples


def test_criterion_03_sharpness_exact():
    with criterion(3, "D_k minimum equals 2k^2+1 = (n+3)/2 - sqrt(n)") as notes:
        for k in (1, 2, 3, 4):
            d = construct_d_k(k)
            size, q = split_min_qk_exact(d, d_k_partition(k))
            assert d.n == (2 * k + 1) ** 2
            assert size == 2 * k * k + 1 == split_bound(d.n)
            assert verify_quasi_kernel(d, q)[0]
            notes[f"k{k}"] = size
        general = minimum_quasi_kernel_exact(construct_d_k(1))[0]
        assert general == 3
        notes["general_D1"] = general


def test_criterion_04_split_bound():
    with criterion(4, "one-way split quasi-kernel within (n+3)/2 - sqrt(n)") as notes:
        worst = -1.0
        for i in range(1000):
            rng = instance_rng(404, i)
            n = rng.randint(3, 60)
            ny = rng.randint(2, n)
            d, x, y = random_split(n - ny, ny, rng.choice((0.05, 0.2, 0.5, 0.9)), rng)
            q = split_small_qk(d, OneWaySplitPartition(x, y))
            assert verify_quasi_kernel(d, q)[0]
            assert len(q) <= split_bound(d.n) + EPS, (sorted(d.arcs), sorted(q))
            worst = max(worst, len(q) - split_bound(d.n))
        notes.update(instances=1000, max_excess=round(worst, 3))


def test_criterion_05_anti_claw_free(exhaustive_sink_free):
    with criterion(5, "anti-claw-free digraphs get small quasi-kernels, never witnesses") as notes:
        for i in range(1000):
            rng = instance_rng(505, i)
            n = rng.randint(3, 50)
            d = random_sink_free_semicomplete(n, rng, tournament=i % 2 == 0)
            out = small_qk_anti_claw_free(d)
            assert out.witness is None and small(d, out.quasi_kernel)
        agg = exhaustive_sink_free.aggregate
        free = agg["tallies"]["thm1.anti_claw_free"]
        assert agg["checks"]["thm1"]["fail"] == 0
        notes.update(random=1000, exhaustive_anti_claw_free=free)
        assert free > 0


def test_criterion_06_k41_free():
    with criterion(6, "in-degree <= 3 gives small quasi-kernels; general inputs give small QK or witness") as notes:
        for i in range(1000):
            rng = instance_rng(606, i)
            d = random_indeg_le_3(rng.randint(2, 40), rng.choice((0.05, 0.2, 0.5)), rng)
            out = small_qk_k41_free(d)
            assert out.witness is None and small(d, out.quasi_kernel)
        witnesses = 0
        for i in range(1000):
            rng = instance_rng(6060, i)
            d = random_sink_free(rng.randint(2, 16), rng.choice((0.05, 0.1, 0.2, 0.4)), rng)
            out = small_qk_k41_free(d)
            if out.witness is not None:
                assert verify_witness(d, out.witness)
                witnesses += 1
            else:
                assert small(d, out.quasi_kernel)
        notes.update(indeg3=1000, general=1000, witnesses=witnesses)


def test_criterion_07_theorem3_contrapositive(exhaustive_sink_free):
    with criterion(7, "predicate false => small quasi-kernel, sink-free n <= 5") as notes:
        counts = exhaustive_sink_free.aggregate["checks"]["thm3_contrapositive"]
        notes.update(checked=counts["pass"], predicate_true=counts["skip"])
        assert counts["fail"] == 0 and counts["pass"] > 0


def test_criterion_08_good_from_kernel():
    with criterion(8, "kernels are good and shrink to small quasi-kernels") as notes:
        found = tried = 0
        while found < 500:
            rng = instance_rng(808, tried)
            tried += 1
            d = random_sink_free(rng.randint(2, 10), rng.choice((0.1, 0.25, 0.4)), rng)
            k = kernel_exact(d)
            if k is None:
                continue
            found += 1
            assert is_good_quasi_kernel(d, k)
            assert small(d, small_qk_good(d, k))
        notes.update(with_kernel=found, sampled=tried)


def test_criterion_09_partitioned():
    with criterion(9, "DAG/DAG partition gives quasi-kernel within (n+|S|-|N-(S)|)/2") as notes:
        for i in range(500):
            rng = instance_rng(909, i)
            n = rng.randint(1, 20)
            d, v1, v2 = random_dag_partitioned(n, rng.choice((0.05, 0.15, 0.3, 0.5)), rng)
            s = sinks(d)
            closed = s | in_neighborhood(d, s)
            q = small_qk_partitioned(d, v1 - closed, v2 - closed)
            assert verify_quasi_kernel(d, q)[0]
            bound = (d.n + len(s) - len(in_neighborhood(d, s))) / 2
            assert bound == partition_bound(d) and len(q) <= bound
        notes["instances"] = 500


def test_criterion_10_dstar_golden():
    with criterion(10, "D* reproduces the six maximal independent sets, no kernel, {3,6} good") as notes:
        d = construct_dstar()
        mis = oracles.maximal_independent_sets(d.n, list(d.arcs))
        want = [one_based(1, 4), one_based(2, 4), one_based(3, 4), one_based(1, 5), one_based(1, 6), one_based(3, 6)]
        assert sorted(sorted(s) for s in mis) == sorted(sorted(s) for s in want)
        assert kernel_exact(d) is None
        assert is_good_quasi_kernel(d, one_based(3, 6))
        for s, w in zip(want, (2, 3, 1, 6, 2, 1)):
            assert w - 1 in second_in_neighborhood(d, s)
        notes.update(maximal_independent_sets=len(mis))


def _good_qk_exhaustive(t: Digraph):
    for r in range(1, t.n + 1):
        for s in combinations(range(t.n), r):
            if is_good_quasi_kernel(t, s):
                return frozenset(s)
    return None


def test_criterion_11_composition():
    with criterion(11, "good quasi-kernels lift through composition; C3 with arcless parts has none") as notes:
        done = tried = 0
        while done < 200:
            rng = instance_rng(1111, tried)
            tried += 1
            t = random_sink_free(rng.randint(2, 6), rng.choice((0.2, 0.4, 0.6)), rng)
            q_t = _good_qk_exhaustive(t)
            if q_t is None:
                continue
            parts = tuple(random_digraph(rng.randint(1, 4), rng.random(), rng) for _ in range(t.n))
            spec = CompositionSpec(t, parts)
            lifted = lift_good_qk_composition(spec, q_t)
            assert is_good_quasi_kernel(compose(spec), lifted)
            done += 1
        c3 = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
        families = 0
        for sizes in product(range(1, 8), repeat=3):
            if sum(sizes) > 9:
                continue
            h = compose(CompositionSpec(c3, tuple(Digraph.empty(k) for k in sizes)))
            assert _good_qk_exhaustive(h) is None, sizes
            families += 1
        notes.update(compositions=done, sampled=tried, c3_families=families)


def test_criterion_12_oracle_agreement():
    with criterion(12, "split oracle = general oracle; DAG kernel = exhaustive kernel") as notes:
        for i in range(200):
            rng = instance_rng(1212, i)
            n = rng.randint(2, 14)
            ny = rng.randint(2, n)
            d, x, y = random_split(n - ny, ny, rng.choice((0.1, 0.3, 0.6)), rng)
            assert split_min_qk_exact(d, OneWaySplitPartition(x, y))[0] == minimum_quasi_kernel_exact(d)[0]
        for i in range(200):
            rng = instance_rng(1213, i)
            n = rng.randint(1, 10)
            rank = list(range(n))
            rng.shuffle(rank)
            p = rng.choice((0.1, 0.3, 0.6))
            arcs = [(u, v) for u in range(n) for v in range(n) if rank[u] < rank[v] and rng.random() < p]
            d = Digraph.from_arcs(n, arcs)
            assert kernel_dag(d) == kernel_exact(d)
        notes.update(split=200, dags=200)


def test_criterion_13_jacob_meyniel():
    with criterion(13, "refined quasi-kernel is valid and avoids N-(Q~)") as notes:
        for i in range(500):
            rng = instance_rng(1313, i)
            d = random_digraph(rng.randint(1, 30), rng.choice((0.03, 0.08, 0.15, 0.3)), rng)
            q = quasi_kernel_cl(d)
            out = jacob_meyniel_refine(d, q)
            _, tilde = jacob_meyniel_masks(d, sum(1 << v for v in q))
            assert verify_quasi_kernel(d, out)[0]
            assert not out & in_neighborhood(d, members(tilde))
        notes["pairs"] = 500


def test_criterion_14_determinism(tmp_path, capsys):
    with criterion(14, "qk scan reports are byte-identical for 1 and 4 workers") as notes:
        texts = []
        for workers in (1, 4):
            path = tmp_path / f"report{workers}.json"
            code = cli_main([
                "scan", "--mode", "sampled", "--n", "3..9", "--samples", "300", "--family", "sink_free",
                "--checks", "conjecture,thm1,thm2,jm,oracle_cross", "--seed", "1414",
                "--workers", str(workers), "--record-instances", "--report", str(path),
            ])
            assert code == 0
            lines = path.read_text().splitlines(keepends=True)
            texts.append("".join(line for line in lines if '"wall_time_s"' not in line).encode())
        capsys.readouterr()
        assert texts[0] == texts[1]
        report = json.loads((tmp_path / "report4.json").read_text())
        notes.update(bytes=len(texts[0]), instances=report["aggregate"]["instances"])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
