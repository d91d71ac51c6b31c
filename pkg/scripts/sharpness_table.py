"""Print the extremal split family table: exact minimum quasi-kernel vs (n+3)/2 - sqrt(n).

    python3 scripts/sharpness_table.py --k-max 4
"""
import argparse

from quasikernels.scan import reproduce_sharpness_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=4)
    args = ap.parse_args()
    print(f"{'k':>3} {'n':>5} {'min qk':>7} {'bound':>8}  equal")
    for row in reproduce_sharpness_table(args.k_max):
        print(f"{row['k']:>3} {row['n']:>5} {row['min_qk']:>7} {row['bound']:>8.3f}  {row['equal']}")


if __name__ == "__main__":
    main()
