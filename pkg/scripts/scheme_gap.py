"""Exact total variation between the pathwise constructions and the penalised law.

Enumerates every tiny instance and compares the i.i.d.-index construction
(with both index-law conventions) and the corrected scheme against the law
defined by the PGF identity.

    python3 scripts/scheme_gap.py
"""
import itertools

from modpoisson.dist import total_variation
from modpoisson.model import brute_force_omega_dprime, dist_dprime_identity, index_law
from modpoisson.primes import ModelParams, PrimeTable

PRIMES = ((2, 3), (2, 3, 5), (2, 3, 5, 7))


def main():
    print(f"{'primes':<14}{'k':>3}{'v':>6}{'iid/lemma':>12}{'iid/paper':>12}{'exact':>12}")
    for pr, k, v in itertools.product(PRIMES, (1, 2, 3, 4), (0.3, 0.7, 1.0)):
        table = PrimeTable.from_primes(pr)
        p = ModelParams(n=pr[-1], gamma_n=1.7, k_n=k, v_n=v, pi_n=len(pr))
        target = dist_dprime_identity(p, table)
        gaps = []
        for conv in ("lemma", "paper"):
            law = index_law(p, table, conv)
            gaps.append(total_variation(brute_force_omega_dprime(table, k, 1.7, v, law), target))
        gaps.append(total_variation(brute_force_omega_dprime(table, k, 1.7, v, scheme="exact"), target))
        print(f"{str(pr):<14}{k:>3}{v:>6}" + "".join(f"{g:>12.3g}" for g in gaps))


if __name__ == "__main__":
    main()
