"""Command-line entry point: ``modpoisson {ratios,sample,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import verify
from .arithmetic import dist_omega_uniform, fit_exponential_factor, omega_sieve
from .dist import DiscreteDist, pgf, total_variation
from .limiting import phi_omega, phi_Omega
from .model import (
    RngStream,
    dist_hybrid,
    dist_omega_dprime,
    dist_omega_indep,
    dist_omega_prime,
    dist_Q,
    index_law,
    ratio,
    sample_conditioned,
    sample_omega_dprime,
)
from .primes import params, sieve
from .reports import RatioTable, SampleReport, SampleRow

MAX_N = 10**8
MAX_SAMPLES = 10**9
SHARD_SIZE = 1 << 16
DEFAULT_X = (0.0, 0.5, 1.0, 1.5, 2.0)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 10**4
    x_grid: list[float] = field(default_factory=lambda: list(DEFAULT_X))
    samples: int = 10**5
    seed: int = 20240101
    convention: str = "lemma"
    scheme: str = "iid"
    eps: float = 1e-14
    output_path: str | None = None
    format: str = "csv"
    workers: int = 1
    tolerance_scale: float = 1.0
    force: bool = False

    def validate(self) -> None:
        if any(x < 0 or not math.isfinite(x) for x in self.x_grid):
            raise UsageError("x values must be finite and >= 0")
        if self.samples < 0:
            raise UsageError("--samples must be >= 0")
        if not 0 < self.eps < 1:
            raise UsageError("--eps must lie in (0, 1)")
        if not self.force and self.n > MAX_N:
            raise UsageError(f"n > {MAX_N} needs --force")
        if not self.force and self.samples > MAX_SAMPLES:
            raise UsageError(f"samples > {MAX_SAMPLES} needs --force")
        if self.command == "sample":
            if not self.x_grid:
                raise UsageError("sample needs at least one --x")
            if self.samples < 1000:
                raise UsageError("sample needs --samples >= 1000")


def cmd_ratios(cfg: RunConfig) -> RatioTable:
    """Exact mod-Poisson ratios of every model over the x grid."""
    n = cfg.n
    table = sieve(n)
    p = params(n, table)
    xs = np.asarray(cfg.x_grid, dtype=float)
    ref_omega = phi_omega(xs)
    ref_Omega = phi_Omega(xs)
    out = RatioTable(config=asdict(cfg))
    g = p.gamma_n

    def add_all(name, vals, ref):
        for x, r, f in zip(xs, vals, ref):
            out.add(n, x, name, r, f)

    add_all("indep", ratio(dist_omega_indep(p, table), g, xs), ref_Omega)
    hyb = dist_hybrid(table.count, p.k_n, table)
    add_all("hybrid", ratio(hyb, hyb.mean(), xs), ref_omega)
    add_all("prime", ratio(dist_omega_prime(p, table), g, xs), ref_omega)
    add_all("dprime", ratio(dist_omega_dprime(p, table), g, xs), ref_omega)
    add_all("Q", ratio(dist_Q(phi_omega, g, cfg.eps), g, xs), ref_omega)
    arith = ratio(dist_omega_uniform(n, omega_sieve(n, table)), g, xs)
    add_all("arithmetic", arith, ref_omega)
    c = fit_exponential_factor(xs, arith, ref_omega)
    add_all("arithmetic_fitted", arith * np.exp(-c * (xs - 1.0)), ref_omega)
    return out


def _shard_counts(args) -> tuple[np.ndarray, np.ndarray]:
    n, seed, stream_id, size, convention, scheme = args
    table = sieve(n)
    p = params(n, table)
    law = index_law(p, table, convention)
    path = sample_omega_dprime(p, table, law, RngStream(seed, stream_id), size, scheme)
    cond = sample_conditioned(p, table, law, RngStream(seed, stream_id), size, scheme)
    return np.bincount(path), np.bincount(cond)


def _merge(counts: list[np.ndarray]) -> np.ndarray:
    acc = np.zeros(max(c.size for c in counts), dtype=np.int64)
    for c in counts:
        acc[: c.size] += c
    return acc


def _pgf_with_halfwidth(counts: np.ndarray, x: float) -> tuple[float, float]:
    """Empirical E[x^X] and the 3-sigma half-width of its Monte Carlo error."""
    N = counts.sum()
    k = np.arange(counts.size)
    vals = np.power(x, k, dtype=float) if x != 0 else (k == 0).astype(float)
    mean = float(np.dot(counts, vals) / N)
    second = float(np.dot(counts, vals * vals) / N)
    sd = math.sqrt(max(0.0, second - mean * mean) * N / max(1, N - 1))
    return mean, 3.0 * sd / math.sqrt(N)


def cmd_sample(cfg: RunConfig) -> SampleReport:
    """Sample the pathwise and conditioned constructions on coupled streams.

    Draws are split into fixed shards (stream id = shard index) so the output
    does not depend on the number of workers.
    """
    n = cfg.n
    table = sieve(n)
    p = params(n, table)
    exact = dist_omega_dprime(p, table)
    shards = []
    left, sid = cfg.samples, 0
    while left > 0:
        size = min(SHARD_SIZE, left)
        shards.append((n, cfg.seed, sid, size, cfg.convention, cfg.scheme))
        left -= size
        sid += 1
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_shard_counts, shards))
    else:
        results = [_shard_counts(s) for s in shards]
    path = _merge([r[0] for r in results])
    cond = _merge([r[1] for r in results])
    rows = []
    for x in cfg.x_grid:
        pm, ph = _pgf_with_halfwidth(path, x)
        cm, ch = _pgf_with_halfwidth(cond, x)
        rows.append(SampleRow(float(x), pgf(exact, x), pm, ph, cm, ch))
    dp = DiscreteDist(path / path.sum())
    dc = DiscreteDist(cond / cond.sum())
    return SampleReport(rows, total_variation(dp, exact), total_variation(dc, exact),
                        total_variation(dp, dc), int(cfg.samples), config=asdict(cfg))


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    checks = verify.run_all(cfg.convention, cfg.tolerance_scale)
    v = verify.verdict(checks)
    v["config"] = asdict(cfg)
    return (0 if v["passed"] else 1), v


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modpoisson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("ratios", "exact mod-Poisson ratios of every model"),
                        ("sample", "Monte Carlo check of the pathwise samplers"),
                        ("verify", "run the oracle suite")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--n", type=int, default=10**4)
        sp.add_argument("--x", type=float, action="append", dest="x_grid")
        sp.add_argument("--samples", type=int, default=10**5)
        sp.add_argument("--seed", type=int, default=20240101)
        sp.add_argument("--convention", choices=("lemma", "paper"), default="lemma")
        sp.add_argument("--scheme", choices=("iid", "exact"), default="iid")
        sp.add_argument("--eps", type=float, default=1e-14)
        sp.add_argument("--out", dest="output_path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply every verify tolerance (0 forces failures)")
        sp.add_argument("--force", action="store_true")
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    if d["x_grid"] is None:
        d["x_grid"] = list(DEFAULT_X)
    cfg = RunConfig(**d)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"modpoisson: error: {exc}", file=sys.stderr)
        return 2
    if cfg.command == "verify":
        code, v = cmd_verify(cfg)
        _write(json.dumps(v, indent=2, sort_keys=True) + "\n", cfg.output_path)
        return code
    if cfg.command == "ratios":
        rep = cmd_ratios(cfg)
    else:
        rep = cmd_sample(cfg)
    _write(rep.to_json() if cfg.format == "json" else rep.to_csv(), cfg.output_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
