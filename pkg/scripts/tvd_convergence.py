"""Monte Carlo statistical distance against n, next to the exact value.

Writes a CSV report (one row per leakage and n) and prints a table.

    python scripts/tvd_convergence.py --t 4 --leaks coord:1,fold,firstbits:4 --report tvd.csv
"""

import argparse

from alphaprod import leakage as lk
from alphaprod.errors import BudgetExceeded
from alphaprod.perm import format_cycles, parse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=4)
    ap.add_argument("--alpha", default="(1 2)(3 4)")
    ap.add_argument("--leaks", default="coord:1,fold,image:1,firstbits:4,const:0")
    ap.add_argument("--ns", default="1000,10000,100000")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--report")
    args = ap.parse_args()

    alpha = parse(args.alpha, args.t)
    rows = []
    print(f"{'leakage':<14} {'exact':>8} {'n':>8} {'estimate':>9} {'radius':>8}")
    for desc in args.leaks.split(","):
        leak = lk.make_leakage(desc, args.t, alpha)
        try:
            exact = f"{float(lk.tvd_exact(leak, alpha)):.4f}"
        except BudgetExceeded:
            exact = "-"
        for n in map(int, args.ns.split(",")):
            est = lk.tvd_monte_carlo(leak, alpha, n=n, rng=args.seed, workers=args.workers)
            print(f"{leak.name:<14} {exact:>8} {n:>8} {est.estimate:>9.4f} {est.radius:>8.4f}")
            rows.append({
                "leakage": leak.name, "alpha": format_cycles(alpha), "t": args.t, "n": n,
                "estimate": est.estimate, "radius": est.radius, "delta": est.delta,
                "seconds": round(est.seconds, 3), "seed": args.seed, "workers": args.workers,
            })
    if args.report:
        lk.write_report(rows, args.report)
        print(f"# wrote {args.report}")


if __name__ == "__main__":
    main()
