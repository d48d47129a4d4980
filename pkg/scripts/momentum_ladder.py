"""Certified witness ratios for the momentum functional at one point, against the 2n target and the <= 1 ceiling."""

import argparse

import numpy as np

from opnorm import distrib as ds
from opnorm.suite import SuiteConfig, bump_family, example_params
from opnorm.testfn import Bump


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="4,8,16,32")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ns = [int(v) for v in args.ns.split(",")]
    params = example_params(SuiteConfig())
    family = [Bump((s * w + 0.03,), w, 1.0) for w in (0.05, 0.1, 0.2, 0.4, 0.8, 1.2) for s in (-0.5, 0.0, 0.5, 1.0)]
    family += bump_family(np.random.default_rng(args.seed), 12, -0.5, 0.5)
    g = ds.momentum_growth(ns, 0.0, family, params)
    print(f"{'n':>4} {'numerator_lb':>14} {'denominator_ub':>15} {'ratio':>9} {'2n':>5}")
    for r in g.reports:
        print(f"{r.n:4d} {r.numerator_lb:14.6g} {r.denominator_ub:15.6g} {r.certified_ratio:9.4f} {2 * r.n:5d}")
    print("doubling factors:", ", ".join(f"{f:.3f}" for f in g.doubling_factors))
    print("every certified ratio stays <= 1:", all(r.certified_ratio <= 1 + 1e-12 for r in g.reports))


if __name__ == "__main__":
    main()
