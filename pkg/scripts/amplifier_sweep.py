"""Decision error of the threshold amplifier as m grows.

    python scripts/amplifier_sweep.py --t 6 --gap 0.3 --trials 1000
"""

import argparse

import numpy as np

from alphaprod import leakage as lk
from alphaprod.perm import parse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=6)
    ap.add_argument("--alpha", default="(1 2)(3 4)")
    ap.add_argument("--gap", type=float, default=0.3)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--ms", default="10,30,100,300,1000")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    alpha = parse(args.alpha, args.t)
    c_prime = lk.planted_distinguisher(alpha, 0.3 + args.gap, 0.3)
    ss = np.random.SeedSequence(args.seed)
    calib, *runs = ss.spawn(1 + len(args.ms.split(",")))
    eps = lk.calibrate_eps(c_prime, alpha, 200_000, np.random.default_rng(calib))
    print(f"# t={args.t} alpha={args.alpha} gap={args.gap} eps_alpha={eps:.4f} seed={args.seed}")
    print(f"{'m':>6} {'low':>9} {'high':>9} {'error':>7}")
    for m, s in zip(map(int, args.ms.split(",")), runs):
        p = lk.AmplifierParams(k=args.k, m=m, eps_alpha=eps, t=args.t)
        err = lk.amplifier_error_rate(alpha, c_prime, p, args.trials, np.random.default_rng(s))
        print(f"{m:>6} {p.low:>9.2f} {p.high:>9.2f} {err:>7.4f}")
    print(f"# sample count for error 2^-t^3: {lk.theoretical_sample_count(args.t, args.k, eps)}")


if __name__ == "__main__":
    main()
