"""Exact mod-Poisson ratios of the penalised model across decades of n.

Prints |ratio - Phi_omega(x)| for Omega'' and Omega' and the fitted
arithmetic deviation, one row per n.

    python3 scripts/ratio_trend.py --max-exp 7 --out ratio_trend.csv
"""
import argparse
import csv
import sys

import numpy as np

from modpoisson.arithmetic import omega_sieve, sathe_selberg_fit
from modpoisson.limiting import phi_omega
from modpoisson.model import dist_omega_dprime, dist_omega_prime, ratio
from modpoisson.primes import params, sieve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exp", type=int, default=6)
    ap.add_argument("--x", type=float, nargs="+", default=[0.5, 1.5, 2.0])
    ap.add_argument("--out")
    args = ap.parse_args()

    xs = np.array(args.x)
    ref = phi_omega(xs)
    big = sieve(10**args.max_exp)
    header = ["n", "k_n", "x", "dprime_dev", "prime_dev", "arith_fitted_dev", "fitted_c"]
    rows = []
    for e in range(3, args.max_exp + 1):
        n = 10**e
        t = big.restrict(n)
        p = params(n, t)
        dp = np.abs(ratio(dist_omega_dprime(p, t), p.gamma_n, xs) - ref)
        pr = np.abs(ratio(dist_omega_prime(p, t), p.gamma_n, xs) - ref)
        fit = sathe_selberg_fit(n, xs, omega_sieve(n, big))
        for i, x in enumerate(xs):
            rows.append([n, p.k_n, x, dp[i], pr[i], fit.deviation[i], fit.c])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(header)
    w.writerows(rows)


if __name__ == "__main__":
    main()
