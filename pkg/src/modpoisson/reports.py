"""Report tables and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any

RATIO_COLUMNS = ("n", "x", "model_name", "ratio", "reference_phi", "deviation", "mc_halfwidth")


def fmt(v: Any) -> Any:
    """Floats with 17 significant digits (round-trip exact); None as empty."""
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return v


@dataclass(frozen=True)
class RatioRow:
    n: int
    x: float
    model_name: str
    ratio: float
    reference_phi: float
    deviation: float
    mc_halfwidth: float | None = None


@dataclass
class RatioTable:
    rows: list[RatioRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add(self, n: int, x: float, model: str, ratio: float, reference: float,
            mc_halfwidth: float | None = None) -> None:
        self.rows.append(RatioRow(int(n), float(x), model, float(ratio), float(reference),
                                  abs(float(ratio) - float(reference)),
                                  None if mc_halfwidth is None else float(mc_halfwidth)))

    def select(self, model: str) -> list[RatioRow]:
        return [r for r in self.rows if r.model_name == model]

    def to_csv(self) -> str:
        return rows_to_csv(RATIO_COLUMNS, [asdict(r) for r in self.rows], self.config)

    def to_json(self) -> str:
        return dumps_json({"config": self.config, "rows": [asdict(r) for r in self.rows]})


@dataclass(frozen=True)
class SampleRow:
    x: float
    exact_pgf: float
    pathwise_pgf: float
    pathwise_halfwidth: float
    conditioned_pgf: float
    conditioned_halfwidth: float


@dataclass
class SampleReport:
    """Empirical PGFs of the pathwise and conditioned samplers against the exact law."""

    rows: list[SampleRow]
    tv_pathwise: float
    tv_conditioned: float
    tv_between: float
    samples: int
    config: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"samples": self.samples, "tv_pathwise": self.tv_pathwise,
                "tv_conditioned": self.tv_conditioned, "tv_between": self.tv_between}

    def to_csv(self) -> str:
        cols = tuple(f.name for f in fields(SampleRow))
        cfg = dict(self.config, **self.summary())
        return rows_to_csv(cols, [asdict(r) for r in self.rows], cfg)

    def to_json(self) -> str:
        return dumps_json({"config": self.config, "summary": self.summary(),
                           "rows": [asdict(r) for r in self.rows]})


def rows_to_csv(columns, rows: list[dict], config: dict) -> str:
    buf = io.StringIO()
    buf.write("# config " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
