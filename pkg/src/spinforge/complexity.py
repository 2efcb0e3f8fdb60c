"""
Gate-cost model for exp(-i theta H) over the Pauli terms of a penalty.

Each non-identity term of weight w costs a CNOT ladder of 2 (w - 1) gates
around one rotation.  Depth is estimated by greedy first-fit layering of the
terms (canonical order) into layers of disjoint support; a layer lasts as
long as its slowest term, 2 (w - 1) + 1.
"""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .pauli import PauliSum
from .penalty import LINEAR, QUARTIC, PenaltyConfig, penalty
from .spin_models import SpinRegister, total_spin_operators

log = logging.getLogger(__name__)

SCALING_COLUMNS = ("n", "kind", "terms", "cnots", "depth")
FIT_MIN_N = 8


def gate_cost(H: PauliSum) -> tuple[int, int]:
    """(cnot_count, depth) under the CNOT-ladder / first-fit model."""
    layer_masks = np.zeros(0, dtype=np.uint64)
    layer_spans: list[int] = []
    cnots = 0
    for P in H.terms:
        w = P.weight
        if w == 0:
            continue
        cnots += 2 * (w - 1)
        span = 2 * (w - 1) + 1
        support = np.uint64(P.x | P.z)
        free = np.flatnonzero((layer_masks & support) == 0)
        if free.size:
            k = int(free[0])
            layer_masks[k] |= support
            layer_spans[k] = max(layer_spans[k], span)
        else:
            layer_masks = np.append(layer_masks, support)
            layer_spans.append(span)
    return cnots, int(sum(layer_spans))


def power_law_fit(points) -> tuple[float, float]:
    """Least-squares fit of y = a x^b in log-log space."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ConfigurationError("power-law fit needs at least two (x, y) points")
    if np.any(pts <= 0):
        raise ConfigurationError("power-law fit needs positive data")
    b, log_a = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(np.exp(log_a)), float(b)


@dataclass
class ScalingRow:
    n: int
    kind: str
    terms: int
    cnots: int
    depth: int


@dataclass
class ScalingRecord:
    rows: list[ScalingRow] = field(default_factory=list)
    fits: dict[str, tuple[float, float]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def series(self, kind: str, metric: str) -> list[tuple[int, int]]:
        return [(r.n, getattr(r, metric)) for r in self.rows if r.kind == kind]

    def exponent(self, kind: str, metric: str) -> float:
        return self.fits[f"{kind}_{metric}"][1]

    def write_csv(self, fh, header_lines=()) -> None:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCALING_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, r.kind, r.terms, r.cnots, r.depth])

    def fit_summary(self) -> list[dict]:
        return [{"series": k, "a": a, "b": b} for k, (a, b) in self.fits.items()]

    def write_json(self, fh) -> None:
        json.dump({"fits": self.fit_summary(), "metadata": self.metadata}, fh, indent=2)
        fh.write("\n")


def _one(args) -> ScalingRow:
    n, kind, s_star, C_S = args
    reg = SpinRegister.spin_half_chain(n)
    cfg = PenaltyConfig(s_star, C_S=C_S, kind=kind)
    H = penalty(reg, cfg, total_spin_operators(reg))
    cnots, depth = gate_cost(H)
    return ScalingRow(n, kind, len(H), cnots, depth)


def scaling_sweep(n_list, s_star=0, C_S: float = 7.5, dt: float = 0.015, m0: float = 0.8,
                  kinds=(LINEAR, QUARTIC), workers: int = 1) -> ScalingRecord:
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("n_list must be strictly increasing")
    jobs = [(n, kind, s_star, C_S) for kind in kinds for n in n_list]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, jobs))
    else:
        rows = [_one(j) for j in jobs]

    s = m0 / np.sqrt(1 - m0 ** 2)
    rec = ScalingRecord(rows, metadata={
        "s_star": str(s_star), "C_S": C_S, "dt": dt, "m0": m0,
        # the cost model charges one rotation per term, so this angle never enters
        "rotation_prefactor": C_S * s * dt,
        "fit_min_n": FIT_MIN_N,
    })
    for kind in kinds:
        for metric in ("terms", "cnots", "depth"):
            pts = [(n, y) for n, y in rec.series(kind, metric) if n >= FIT_MIN_N and y > 0]
            if len(pts) >= 2:
                rec.fits[f"{kind}_{metric}"] = power_law_fit(pts)
    return rec
