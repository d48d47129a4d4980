"""How often the positive/negative-part pair bound breaks, split by whether both extended parts stay >= 0."""

import argparse

import numpy as np

from opnorm import extension as ex
from opnorm.errors import PrecheckFailed
from opnorm.suite import random_space


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    counts = {True: [0, 0], False: [0, 0]}  # parts_nonnegative -> [instances, pair violations]
    skipped, worst = 0, (0.0, None)
    done = 0
    while done < args.instances:
        d = int(rng.integers(1, 4))
        space = random_space(rng, d, ("ell1", "ell2", "ellinf"))
        M1, M2 = rng.uniform(0.5, 2.0, 2)
        n = int(rng.integers(1, 6))
        pts = np.vstack([np.zeros(d), rng.normal(size=(n, d))])
        signs = rng.choice([-1.0, 1.0], n)
        mags = rng.uniform(0, 1, n) * np.where(signs > 0, M1, M2) * space.norm(pts[1:])
        F = ex.PartialFunctional(pts, np.concatenate([[0.0], signs * mags]))
        try:
            r = ex.extend_posneg(F, M1, M2, rng.normal(size=(int(rng.integers(1, 6)), d)), space)
        except PrecheckFailed:
            skipped += 1
            continue
        done += 1
        c = counts[bool(r.parts_nonnegative)]
        c[0] += 1
        c[1] += r.pair_margin < -1e-12
        if r.pair_margin < worst[0]:
            worst = (r.pair_margin, space.norm_kind)
    print(f"accepted {done}, skipped by precheck {skipped}")
    for flag in (True, False):
        n, bad = counts[flag]
        print(f"parts nonnegative={flag!s:5}  instances={n:5d}  pair violations={bad:4d}")
    print(f"most negative pair margin {worst[0]:.4g} ({worst[1]})")


if __name__ == "__main__":
    main()
