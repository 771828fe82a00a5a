"""Measure the constants frozen in transform.C_SCRIPT and vectors.C_LEN.

Exhaustive over A_6 x (supported targets) at t=6, random pairs at t=10 and 14.
Prints the worst commutator excess over ceil(log2 t) and the worst
output_length / (t * m) ratio of the vector maps.
"""

import argparse
import math

import numpy as np

from alphaprod.perm import alternating_group
from alphaprod.transform import convert, target_kind
from alphaprod.vectors import build_alpha_to_beta
from alphaprod.verify import random_convert_target, random_nonidentity_even


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    group = [g for g in alternating_group(6) if not g.is_identity()]
    targets = [b for b in group if target_kind(b) != "unsupported"]
    excess = max(convert(a, b).comm_count - 3 for a in group for b in targets)
    ratio = max(build_alpha_to_beta(a, b, 6).output_length / 36 for a in group[::7] for b in group)
    print(f"t=6 exhaustive: comm excess {excess}, length ratio {ratio:.3f}")

    for t in (10, 14):
        ex = rt = 0.0
        for _ in range(args.pairs):
            a = random_nonidentity_even(t, rng)
            ex = max(ex, convert(a, random_convert_target(t, rng)).comm_count - math.ceil(math.log2(t)))
            b = random_nonidentity_even(t, rng)
            rt = max(rt, build_alpha_to_beta(a, b, t).output_length / t ** 2)
        print(f"t={t} random ({args.pairs} pairs): comm excess {ex:.0f}, length ratio {rt:.3f}")


if __name__ == "__main__":
    main()
