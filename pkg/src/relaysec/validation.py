"""Property suites behind ``relaysec validate``.

Each suite returns :class:`PropertyResult` records with the measured value
and the threshold it was held to, so a report shows the slack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import closedform as cf
from .cellular import (cell_edge_constants, direct_outage_bounds, direct_outage_quadrature,
                       direct_outage_single_eve, row_seed)
from .constants import CELL_CLOSED_FORM_TOL, IDENTITY_TOL, MC_SIGMA_MULTIPLIER
from .geometry import Distances, PowerPair
from .montecarlo import (McConfig, mc_cellular_direct, mc_df_outage, mc_direct_outage,
                         mc_rf_outage)


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"[{flag}] {self.suite}/{self.name}: measured={self.measured:.6g} "
                f"threshold={self.threshold:.6g} {self.detail}").rstrip()


def random_geometries(n: int, seed: int, d_range=(0.1, 10.0), alpha_range=(2.0, 4.0)):
    """Independent log-uniform link distances and uniform path-loss exponents."""
    rng = np.random.default_rng(seed)
    lo, hi = np.log(d_range[0]), np.log(d_range[1])
    d = np.exp(rng.uniform(lo, hi, size=(4, n)))
    alpha = rng.uniform(*alpha_range, size=n)
    return Distances(*d), alpha


def identity_suite(n: int = 10_000, seed: int = 0) -> list[PropertyResult]:
    dist, alpha = random_geometries(n, seed)
    res = np.abs(cf.df_rf_identity_residual(dist, alpha))
    worst = float(res.max())
    return [PropertyResult("identity", "max_relative_residual", worst < IDENTITY_TOL, worst,
                           IDENTITY_TOL, f"n={n}")]


def ordering_suite(n: int = 10_000, seed: int = 0) -> list[PropertyResult]:
    dist, alpha = random_geometries(n, seed)
    p_df = cf.df_outage_optimal(dist, alpha)
    p_rf = cf.rf_outage(dist, alpha)
    violations = int(np.count_nonzero(~(p_df > p_rf)))
    margin = float((p_df - p_rf).min())
    return [PropertyResult("ordering", "df_exceeds_rf_violations", violations == 0, violations, 0,
                           f"n={n} min_gap={margin:.3g}")]


def optimality_suite(n: int = 1000, grid: int = 1000, seed: int = 0) -> list[PropertyResult]:
    dist, alpha = random_geometries(n, seed)
    ratios = np.logspace(-8, 8, grid)
    expanded = Distances(*(np.asarray(d)[:, None] for d in dist.links))
    grid_min = cf.df_outage_general(expanded, alpha[:, None], ratios[None, :]).min(axis=1)
    optimum = cf.df_outage_optimal(dist, alpha)
    beat = float((optimum - grid_min).max())
    return [PropertyResult("optimality", "grid_beats_analytic_by", beat <= 1e-9, beat, 1e-9,
                           f"n={n} grid={grid}")]


def constants_suite() -> list[PropertyResult]:
    out = []
    for alpha in (2, 3, 4):
        err = abs(direct_outage_single_eve(1.0, alpha) - cell_edge_constants(alpha))
        err_q = abs(direct_outage_quadrature(1.0, alpha) - cell_edge_constants(alpha))
        worst = max(err, err_q)
        out.append(PropertyResult("constants", f"cell_edge_alpha{alpha}", worst <= CELL_CLOSED_FORM_TOL,
                                  worst, CELL_CLOSED_FORM_TOL))
    return out


def oracle_configurations(n: int, seed: int) -> list[dict]:
    """``n`` configurations cycling DF, RF, direct and cellular-direct."""
    rng = np.random.default_rng(seed)
    kinds = ("df", "rf", "direct", "cellular")
    out = []
    for i in range(n):
        kind = kinds[i % 4]
        alpha = float(rng.uniform(2.0, 4.0))
        d = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=4))
        conf = {"kind": kind, "alpha": alpha}
        if kind in ("df", "rf"):
            conf["dist"] = Distances(*d)
            conf["ratio"] = float(np.exp(rng.uniform(np.log(0.25), np.log(4.0))))
        elif kind == "direct":
            conf["d_sd"], conf["d_se"] = float(d[0]), float(d[1])
        else:
            conf["x"] = float(rng.uniform(0.1, 1.0))
        out.append(conf)
    return out


def oracle_check(conf: dict, cfg: McConfig) -> tuple[float, object]:
    """Analytic value and Monte Carlo estimate for one oracle configuration."""
    kind, alpha = conf["kind"], conf["alpha"]
    if kind == "df":
        exact = cf.df_outage_general(conf["dist"], alpha, conf["ratio"])
        est = mc_df_outage(conf["dist"], alpha, PowerPair(1.0, conf["ratio"]), cfg)
    elif kind == "rf":
        exact = cf.rf_outage(conf["dist"], alpha)
        est = mc_rf_outage(conf["dist"], alpha, cfg)
    elif kind == "direct":
        exact = cf.direct_outage(conf["d_sd"], conf["d_se"], alpha)
        est = mc_direct_outage(conf["d_sd"], conf["d_se"], alpha, cfg)
    else:
        exact = direct_outage_single_eve(conf["x"], alpha)
        est = mc_cellular_direct(conf["x"], alpha, 1, 1.0, cfg)
    return exact, est


def oracle_suite(cfg: McConfig, n_configs: int = 100) -> list[PropertyResult]:
    hits = 0
    worst = 0.0
    for i, conf in enumerate(oracle_configurations(n_configs, cfg.seed)):
        exact, est = oracle_check(conf, replace(cfg, seed=row_seed(cfg.seed, i)))
        z = est.z_score(exact)
        worst = max(worst, z)
        hits += z <= MC_SIGMA_MULTIPLIER
    need = math.ceil(0.95 * n_configs)
    return [PropertyResult("oracle", "configs_within_3sigma", hits >= need, hits, need,
                           f"of {n_configs}, trials={cfg.trials} worst_z={worst:.3g}")]


def bounds_suite(cfg: McConfig, xs=(0.25, 0.5, 1.0), alphas=(2.0, 4.0),
                 ns=(1, 2, 4, 8)) -> list[PropertyResult]:
    out = []
    index = 0
    for x in xs:
        for alpha in alphas:
            for n in ns:
                lower, upper = direct_outage_bounds(x, alpha, n)
                est = mc_cellular_direct(x, alpha, n, 1.0, replace(cfg, seed=row_seed(cfg.seed, index)))
                index += 1
                slack = MC_SIGMA_MULTIPLIER * est.std_error
                if n == 1:
                    ok = est.agrees_with(lower)
                    measured = est.z_score(lower)
                    thr = MC_SIGMA_MULTIPLIER
                else:
                    ok = lower - slack <= est.p_hat <= upper + slack
                    measured = est.p_hat
                    thr = upper + slack
                out.append(PropertyResult("bounds", f"x{x:g}_a{alpha:g}_N{n}", ok, measured, thr,
                                          f"[{lower:.6g}, {upper:.6g}]"))
    return out


def run_suite(name: str, cfg: McConfig, n_geometries: int = 10_000,
              n_configs: int = 100) -> list[PropertyResult]:
    suites = {
        "identity": lambda: identity_suite(n_geometries, cfg.seed),
        "ordering": lambda: ordering_suite(n_geometries, cfg.seed),
        "optimality": lambda: optimality_suite(min(n_geometries, 1000), 1000, cfg.seed),
        "constants": constants_suite,
        "oracle": lambda: oracle_suite(cfg, n_configs),
        "bounds": lambda: bounds_suite(cfg),
    }
    if name == "all":
        return [r for key in suites for r in suites[key]()]
    return suites[name]()


SUITES = ("identity", "ordering", "optimality", "constants", "oracle", "bounds", "all")
