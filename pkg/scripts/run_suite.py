"""Run the acceptance battery and write report.json, timing.json and CSV tables."""

import argparse
import sys

from opnorm.suite import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results")
    ap.add_argument("--no-determinism", action="store_true")
    args = ap.parse_args()
    report, results = run_suite(args.seed, SuiteConfig(), args.out, not args.no_determinism)
    for r in results:
        print(r.line())
    print(f"wrote {args.out}/report.json")
    return 0 if report["all_pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
