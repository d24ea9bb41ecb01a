"""Kolmogorov distance of normalised Omega'' and of omega(U_n) to N(0, 1) by decade.

    python3 scripts/erdos_kac_trend.py --max-exp 7
"""
import argparse

from modpoisson.arithmetic import dist_omega_uniform, erdos_kac_stat, omega_sieve
from modpoisson.model import dist_omega_dprime
from modpoisson.primes import params, sieve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exp", type=int, default=7)
    args = ap.parse_args()
    big = sieve(10**args.max_exp)
    print(f"{'n':>10}{'gamma_n':>10}{'KS dprime':>12}{'KS omega':>12}")
    for e in range(3, args.max_exp + 1):
        n = 10**e
        t = big.restrict(n)
        p = params(n, t)
        a = erdos_kac_stat(dist_omega_dprime(p, t), p.gamma_n)
        b = erdos_kac_stat(dist_omega_uniform(n, omega_sieve(n, big)), p.gamma_n)
        print(f"{n:>10}{p.gamma_n:>10.4f}{a:>12.4f}{b:>12.4f}")


if __name__ == "__main__":
    main()
