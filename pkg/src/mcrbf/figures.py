"""Parameter sets and data recipes for the six reference figures.

Each recipe returns a :class:`Table` of plottable columns; sizes default to
desk scale (seconds to a minute) and can be overridden.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .dof import dof_multicell, dof_region, dof_single, dof_single_opt
from .mc import McConfig, ks_statistic, simulate_sinr_samples, simulate_sumrate
from .model import SystemModel, build_system, db_to_linear
from .rate import scaling_law, sumrate_closed_multicell, sumrate_quadrature
from .sinr import SinrDistribution, sinr_cdf

__all__ = [
    "Table",
    "fig1_systems",
    "fig2_single",
    "fig2_two_cell",
    "fig3_single",
    "fig3_two_cell",
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "format_number",
]


def format_number(x: Any) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{float(x):.12g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else f"{float(x):.12g}"
    return str(x)


def _json_number(x: Any) -> Any:
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(f"{float(x):.12g}")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(f"{float(x):.12g}")
    if isinstance(x, (list, tuple)):
        return [_json_number(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_number(v) for k, v in x.items()}
    return x


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# mcrbf {self.name} schema_version=1\n")
        for k, v in self.meta.items():
            buf.write(f"# {k}={format_number(v) if not isinstance(v, (list, dict)) else json.dumps(_json_number(v))}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(format_number(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "name": self.name,
            "meta": _json_number(self.meta),
            "columns": self.columns,
            "rows": [_json_number(r) for r in self.rows],
        }
        return json.dumps(doc, indent=2)


def fig1_systems() -> list[SystemModel]:
    """The two interference scenarios whose cell-1 SINR CDF is compared."""
    s1 = build_system({
        "nt": 4,
        "cells": [{"M": 4, "snr_db": 30}, {"M": 2}, {"M": 4}],
        "inr_db": [[None, None, None], [-3, None, None], [3, None, None]],
    })
    s2 = build_system({
        "nt": 6,
        "cells": [{"M": 6, "snr_db": 20}, {"M": 2}, {"M": 3}, {"M": 4}],
        "inr_db": [[None] * 4, [-3, None, None, None], [2, None, None, None], [3, None, None, None]],
    })
    return [s1, s2]


def fig2_single() -> SystemModel:
    return build_system({"nt": 3, "cells": [{"M": 3, "snr_db": 20}]})


def fig2_two_cell() -> SystemModel:
    return build_system({
        "nt": 3,
        "cells": [{"M": 3, "snr_db": 20}, {"M": 3, "snr_db": 20}],
        "inr_db": [[None, 10], [6, None]],
    })


def fig3_single() -> SystemModel:
    return build_system({"nt": 3, "cells": [{"M": 3, "snr_db": 5}]})


def fig3_two_cell() -> SystemModel:
    # only mu_{2,1} is specified; the reverse coupling mirrors it (unused for cell 1)
    return build_system({
        "nt": 3,
        "cells": [{"M": 3, "snr_db": 5}, {"M": 3, "snr_db": 5}],
        "inr_db": [[None, -5], [-5, None]],
    })


def fig1(samples: int = 100_000, points: int = 201, seed: int = 1, workers: int = 1,
         users_per_trial: int = 100) -> Table:
    """Analytical vs empirical SINR CDF of cell 1 for both scenarios."""
    table = Table("fig1", ["system", "s", "F_analytic", "F_empirical"])
    trials = max(1, math.ceil(samples / users_per_trial))
    for idx, system in enumerate(fig1_systems(), start=1):
        users = (users_per_trial,) + (1,) * (system.num_cells - 1)
        cfg = McConfig(system, users, trials, seed + idx, workers)
        x = simulate_sinr_samples(cfg, 0, 0)
        dist = SinrDistribution(system, 0)
        ks = ks_statistic(x, lambda s: sinr_cdf(dist, s))
        table.meta[f"ks_system{idx}"] = ks
        table.meta[f"samples_system{idx}"] = int(x.size)
        xs = np.sort(x)
        grid = np.linspace(0.0, float(np.quantile(xs, 0.999)), points)
        emp = np.searchsorted(xs, grid, side="right") / xs.size
        ana = np.asarray(sinr_cdf(dist, grid))
        for s, fa, fe in zip(grid, ana, emp):
            table.rows.append([idx, float(s), float(fa), float(fe)])
    return table


def fig2(k_closed_single: int = 30, k_closed_two: int = 10,
         k_mc: Sequence[int] = (1, 2, 5, 10, 20, 30, 100, 300, 1000),
         trials: int = 2000, seed: int = 2, workers: int = 1) -> Table:
    """Sum rate vs K for the single-cell and two-cell scenarios (cell 1)."""
    table = Table("fig2", ["scenario", "K", "R_closed", "R_quad", "R_mc", "R_mc_se"])
    for name, system, cap in (("single", fig2_single(), k_closed_single),
                              ("two_cell", fig2_two_cell(), k_closed_two)):
        ks = sorted(set(range(1, cap + 1)) | set(int(k) for k in k_mc))
        for K in ks:
            closed = sumrate_closed_multicell(system, 0, K).value if K <= cap else math.nan
            quad = sumrate_quadrature(system, 0, K).value
            mc = se = math.nan
            if K in k_mc:
                users = (K,) * system.num_cells
                r = simulate_sumrate(McConfig(system, users, trials, seed + K, workers))[0]
                mc, se = r.value, r.error_estimate
            table.rows.append([name, K, closed, quad, mc, se])
    return table


def fig3(k_values: Sequence[int] = (10, 100, 1000, 10_000), trials: int = 300,
         seed: int = 3, workers: int = 1) -> Table:
    """Simulated sum rate against the asymptote ``M log2(eta ln K)``."""
    table = Table("fig3", ["scenario", "K", "R_mc", "R_mc_se", "R_quad", "R_scaling"])
    for name, system in (("single", fig3_single()), ("two_cell", fig3_two_cell())):
        eta = system.snr_per_beam(0)
        M = system.beams[0]
        for K in k_values:
            users = (K,) + (1,) * (system.num_cells - 1)
            r = simulate_sumrate(McConfig(system, users, trials, seed + K, workers))[0]
            quad = sumrate_quadrature(system, 0, K).value
            law = scaling_law(K, M, eta) if eta * math.log(K) > 1 else math.nan
            table.rows.append([name, K, r.value, r.error_estimate, quad, law])
    return table


def fig4(rho_db: Sequence[float] = (5, 10, 15, 20, 25, 30), alpha: float = 1.0,
         num_antennas: int = 4, beams: Sequence[int] = (2, 4), trials: int = 500,
         seed: int = 4, workers: int = 1) -> Table:
    """Simulated sum rate vs SNR with ``K = floor(rho**alpha)`` users."""
    cols = ["rho_db", "K"]
    for M in beams:
        cols += [f"R_mc_M{M}", f"R_mc_se_M{M}", f"slope_line_M{M}"]
    table = Table("fig4", cols)
    table.meta["alpha"] = alpha
    table.meta["nt"] = num_antennas
    for M in beams:
        table.meta[f"dof_M{M}"] = dof_single(alpha, M)
    for i, rdb in enumerate(rho_db):
        rho = db_to_linear(rdb)
        K = max(1, math.floor(rho ** alpha * (1 + 1e-12)))
        row: list[Any] = [rdb, K]
        for M in beams:
            system = SystemModel(num_antennas, (M,), rho, 1.0)
            r = simulate_sumrate(McConfig(system, (K,), trials, seed + 100 * i + M, workers))[0]
            d = float(dof_single(alpha, M))
            row += [r.value, r.error_estimate, d * math.log2(rho)]
        table.rows.append(row)
    return table


def fig5(num_antennas: int = 4, alpha_max: int = 5, steps_per_unit: int = 20) -> Table:
    """Maximum single-cell DoF and optimal beam count against alpha."""
    table = Table("fig5", ["alpha", "d_star", "M_star"])
    table.meta["nt"] = num_antennas
    for i in range(alpha_max * steps_per_unit + 1):
        a = Fraction(i, steps_per_unit)
        d, m = dof_single_opt(a, num_antennas)
        table.rows.append([a, d, m])
    return table


def fig6(alpha_pairs: Sequence[tuple[Any, Any]] = ((Fraction(1, 2), Fraction(1, 2)), (1, 1),
                                                   (3, 1), (3, 3), (7, 7)),
         num_antennas: int = 4) -> dict[str, Any]:
    """Two-cell DoF regions plus the selfish all-``N_T`` operating point."""
    regions = []
    for a1, a2 in alpha_pairs:
        region = dof_region([a1, a2], num_antennas)
        selfish = dof_multicell([a1, a2], [num_antennas, num_antennas])
        doc = json.loads(region.to_json())
        doc["label"] = f"alpha=({format_number(region.alpha[0])},{format_number(region.alpha[1])})"
        doc["selfish_point"] = _json_number(list(selfish))
        regions.append(doc)
    return {"schema_version": 1, "name": "fig6", "nt": num_antennas, "regions": regions}
