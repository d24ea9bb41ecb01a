"""Exact and simulated penalised models for the mod-Poisson fluctuations of omega(U_n)."""
from .dist import DiscreteDist, bernoulli_sum, penalise, pgf, size_bias, tilt, total_variation
from .primes import ModelParams, PrimeTable, params, sieve

__all__ = [
    "DiscreteDist",
    "ModelParams",
    "PrimeTable",
    "bernoulli_sum",
    "params",
    "penalise",
    "pgf",
    "sieve",
    "size_bias",
    "tilt",
    "total_variation",
]
