"""Exhaustive check of the small quasi-kernel conjecture on sink-free digraphs.

    python3 scripts/exhaustive_scan.py --n-max 5 --workers 4 --out results/exhaustive.json
"""
import argparse
import sys
from pathlib import Path

from quasikernels.scan import ScanConfig, run_scan


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--checks", default="conjecture,thm1,thm3_contrapositive")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    config = ScanConfig(
        mode="exhaustive",
        n_min=1,
        n_max=args.n_max,
        family="sink_free",
        checks=tuple(args.checks.split(",")),
        workers=args.workers,
    )
    report = run_scan(config)
    agg = report.aggregate
    print(f"instances: {agg['instances']}  by n: {agg['by_n']}")
    for name, counts in agg["checks"].items():
        print(f"  {name:<22} pass={counts['pass']} fail={counts['fail']} skip={counts['skip']}")
    print(f"max min-qk / floor(n/2): {agg['max_min_qk_ratio']}  time: {agg['wall_time_s']}s")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(report.to_json())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
