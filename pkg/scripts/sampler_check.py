"""Monte Carlo check of both pathwise samplers at one n.

    python3 scripts/sampler_check.py --n 10000 --samples 1000000
"""
import argparse

from modpoisson.cli import RunConfig, cmd_sample


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**4)
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    for scheme in ("iid", "exact"):
        cfg = RunConfig("sample", n=args.n, x_grid=[0.5, 1.5, 2.0], samples=args.samples,
                        seed=args.seed, scheme=scheme, workers=args.workers)
        rep = cmd_sample(cfg)
        print(f"scheme={scheme}: TV(empirical, exact) = {rep.tv_pathwise:.4g}")
        for r in rep.rows:
            z = abs(r.pathwise_pgf - r.exact_pgf) / (r.pathwise_halfwidth / 3)
            print(f"  x={r.x}: exact {r.exact_pgf:.6f}  empirical {r.pathwise_pgf:.6f}"
                  f"  +/- {r.pathwise_halfwidth:.2e}  ({z:.1f} sigma)")


if __name__ == "__main__":
    main()
