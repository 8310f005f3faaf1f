"""Relay placement search: coarse grid, then Nelder-Mead refinement.

The outage surfaces are smooth away from the nodes but not convex in the
relay position, so a global grid picks the basin and the simplex polishes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import closedform as cf
from .cellular import CellScenario, direct_outage_single_eve, relay_outage_batch
from .constants import NODE_EXCLUSION_RADIUS
from .errors import DomainError
from .geometry import Point2D, Strategy, check_alpha, distances_from_points


@dataclass(frozen=True)
class SearchRegion:
    """Axis-aligned search box. Leave ``y_min``/``y_max`` as None for a 1-D interval."""

    x_min: float
    x_max: float
    y_min: float | None = None
    y_max: float | None = None

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise DomainError("search region is degenerate along x")
        if (self.y_min is None) != (self.y_max is None):
            raise DomainError("give both y bounds or neither")
        if self.y_min is not None and not self.y_min < self.y_max:
            raise DomainError("search region is degenerate along y")

    @property
    def is_2d(self) -> bool:
        return self.y_min is not None

    def contains(self, p: Point2D) -> bool:
        return (self.x_min <= p.x <= self.x_max
                and (not self.is_2d or self.y_min <= p.y <= self.y_max))

    @property
    def bounds(self) -> list[tuple[float, float]]:
        b = [(self.x_min, self.x_max)]
        if self.is_2d:
            b.append((self.y_min, self.y_max))
        return b


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points_per_axis: int = 64
    refine_iterations: int = 4000
    x_tolerance: float = 1e-6
    f_tolerance: float = 1e-12

    def __post_init__(self):
        if self.grid_points_per_axis < 8:
            raise DomainError("grid_points_per_axis must be >= 8")
        if self.refine_iterations < 0:
            raise DomainError("refine_iterations must be >= 0")
        if not (self.x_tolerance > 0 and self.f_tolerance > 0):
            raise DomainError("tolerances must be positive")


@dataclass
class OptimizationResult:
    """Outcome of a placement search.

    For four-node searches ``argmin`` is the relay :class:`Point2D`. For
    cellular searches it is the normalized relay distance ``d_br / R``.
    """

    argmin: Point2D | float
    f_min: float
    power_ratio: float | None
    evaluations: int
    converged: bool
    grid_best: float
    grid_argmin: Point2D | float
    skipped_nodes: list = field(default_factory=list)


def _refine(fun, x0, steps, bounds, cfg: OptimizerConfig):
    """Bounded Nelder-Mead from ``x0`` with an initial simplex one grid cell wide."""
    if cfg.refine_iterations == 0:
        return None
    x0 = np.asarray(x0, dtype=float)
    simplex = [x0]
    for k, h in enumerate(steps):
        v = x0.copy()
        lo, hi = bounds[k]
        v[k] = x0[k] + h if x0[k] + h <= hi else x0[k] - h
        v[k] = min(max(v[k], lo), hi)
        simplex.append(v)
    return minimize(fun, x0, method="Nelder-Mead", bounds=bounds,
                    options={"xatol": cfg.x_tolerance, "fatol": cfg.f_tolerance,
                             "maxiter": cfg.refine_iterations, "maxfev": 4 * cfg.refine_iterations,
                             "initial_simplex": np.array(simplex)})


def _as_point(p) -> Point2D:
    return p if isinstance(p, Point2D) else Point2D(float(p[0]), float(p[1]))


def default_region(source: Point2D, destination: Point2D) -> SearchRegion:
    """Square box centred on the S-D midpoint with half-width ``d_sd``."""
    half = source.distance_to(destination)
    mx, my = (source.x + destination.x) / 2, (source.y + destination.y) / 2
    return SearchRegion(mx - half, mx + half, my - half, my + half)


def fournode_objective(source, destination, eavesdropper, alpha, strategy):
    """Vectorized relay-position objective; ``inf`` where the relay sits on a node."""
    strategy = Strategy(strategy)
    if strategy is Strategy.DIRECT:
        raise DomainError("direct transmission has no relay to place")
    s, d, e = (_as_point(p).as_array() for p in (source, destination, eavesdropper))
    nodes = np.stack([s, d, e])
    func = cf.df_outage_optimal if strategy is Strategy.DF else cf.rf_outage

    def objective(relays):
        relays = np.asarray(relays, dtype=float)
        flat = relays.reshape(-1, 2)
        gap = np.linalg.norm(flat[:, None, :] - nodes[None, :, :], axis=-1).min(axis=1)
        ok = gap > NODE_EXCLUSION_RADIUS
        out = np.full(flat.shape[0], np.inf)
        if ok.any():
            out[ok] = func(distances_from_points(s, flat[ok], d, e), alpha)
        return out.reshape(relays.shape[:-1])

    return objective


def optimize_relay_fournode(source, destination, eavesdropper, alpha: float,
                            strategy: Strategy | str, region: SearchRegion | None = None,
                            cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Best relay position for the four-node system.

    DF uses the outage already minimized over the power ratio, and the
    returned ``power_ratio`` is the optimal ratio at the found position.
    Grid nodes on top of S, D or E are skipped and listed in
    ``skipped_nodes``.
    """
    alpha = check_alpha(alpha)
    strategy = Strategy(strategy)
    source, destination, eavesdropper = (_as_point(p) for p in (source, destination, eavesdropper))
    if source.distance_to(destination) == 0:
        raise DomainError("source and destination coincide")
    region = region or default_region(source, destination)
    if not region.is_2d:
        raise DomainError("four-node search needs a 2-D region")
    mid = Point2D((source.x + destination.x) / 2, (source.y + destination.y) / 2)
    if not region.contains(mid):
        raise DomainError("search region must contain the source-destination midpoint")

    objective = fournode_objective(source, destination, eavesdropper, alpha, strategy)
    n = cfg.grid_points_per_axis
    xs = np.linspace(region.x_min, region.x_max, n)
    ys = np.linspace(region.y_min, region.y_max, n)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    values = objective(grid)
    skipped = [Point2D(*grid[i, j]) for i, j in zip(*np.nonzero(~np.isfinite(values)))]
    # First minimum in C order: lowest x index, then lowest y index.
    i, j = np.unravel_index(np.argmin(values), values.shape)
    grid_best = float(values[i, j])
    best_x, best_f = grid[i, j].copy(), grid_best
    evaluations, converged = values.size, cfg.refine_iterations == 0

    res = _refine(lambda p: float(objective(p)), best_x, [xs[1] - xs[0], ys[1] - ys[0]],
                  region.bounds, cfg)
    if res is not None:
        evaluations += res.nfev
        converged = bool(res.success)
        if res.fun <= best_f:
            best_x, best_f = np.asarray(res.x, dtype=float), float(res.fun)

    argmin = Point2D(float(best_x[0]), float(best_x[1]))
    ratio = None
    if strategy is Strategy.DF:
        dist = distances_from_points(source.as_array(), best_x, destination.as_array(),
                                     eavesdropper.as_array())
        ratio = float(cf.df_optimal_power_ratio(dist, alpha))
    return OptimizationResult(argmin=argmin, f_min=best_f, power_ratio=ratio,
                              evaluations=evaluations, converged=converged,
                              grid_best=grid_best, grid_argmin=Point2D(*grid[i, j]),
                              skipped_nodes=skipped)


def sweep_eavesdropper_distance(source, destination, eav_path, alpha_list,
                                strategies=(Strategy.DIRECT, Strategy.DF, Strategy.RF),
                                region: SearchRegion | None = None,
                                cfg: OptimizerConfig = OptimizerConfig()) -> list[dict]:
    """Minimal outage per eavesdropper position, path-loss exponent and strategy.

    ``eav_distance`` is measured from the S-D midpoint. Direct rows carry NaN
    relay coordinates.
    """
    if not len(eav_path):
        raise DomainError("eavesdropper path is empty")
    source, destination = _as_point(source), _as_point(destination)
    mid = Point2D((source.x + destination.x) / 2, (source.y + destination.y) / 2)
    rows = []
    for e in map(_as_point, eav_path):
        for alpha in alpha_list:
            for strategy in map(Strategy, strategies):
                row = {"eav_x": e.x, "eav_y": e.y, "eav_distance": e.distance_to(mid),
                       "alpha": float(alpha), "strategy": strategy.value}
                if strategy is Strategy.DIRECT:
                    row.update(optimal_relay_x=math.nan, optimal_relay_y=math.nan,
                               outage=cf.direct_outage(source.distance_to(destination),
                                                       source.distance_to(e), alpha))
                else:
                    res = optimize_relay_fournode(source, destination, e, alpha, strategy,
                                                  region, cfg)
                    row.update(optimal_relay_x=res.argmin.x, optimal_relay_y=res.argmin.y,
                               outage=res.f_min)
                rows.append(row)
    return rows


def optimize_cellular_relay(scenario: CellScenario, strategy: Strategy | str,
                            cfg: OptimizerConfig = OptimizerConfig(),
                            ratio_floor: float = 1e-9) -> OptimizationResult:
    """Best bisector relay distance (and DF power ratio) for the point-A user.

    The objective is the single-eavesdropper quadrature outage. RF searches
    ``d_br / R`` in [0, 1]. DF also searches one global power ratio in
    ``(0, cap]``, since it cannot adapt to the unknown eavesdropper position.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.DIRECT:
        raise DomainError("direct transmission has no relay to place")
    alpha, offset = scenario.alpha, scenario.point_a_offset
    cap = scenario.power_ratio_cap
    n = cfg.grid_points_per_axis
    xs = np.linspace(0.0, 1.0, n)

    if strategy is Strategy.RF:
        values = relay_outage_batch(xs, 1.0, alpha, strategy, offset)
        i = int(np.argmin(values))
        start, steps, bounds = [xs[i]], [xs[1] - xs[0]], [(0.0, 1.0)]
        grid_arg = float(xs[i])

        def fun(p):
            return float(relay_outage_batch(p[0], 1.0, alpha, strategy, offset)[0])
    else:
        rs = np.linspace(cap / n, cap, n)
        values = relay_outage_batch(xs[:, None], rs[None, :], alpha, strategy, offset)
        i, j = np.unravel_index(np.argmin(values), values.shape)
        start, steps = [xs[i], rs[j]], [xs[1] - xs[0], rs[1] - rs[0]]
        bounds = [(0.0, 1.0), (ratio_floor, cap)]
        grid_arg = float(xs[i])

        def fun(p):
            return float(relay_outage_batch(p[0], p[1], alpha, strategy, offset)[0])

    grid_best = float(values.min())
    best_x, best_f = np.array(start, dtype=float), grid_best
    evaluations, converged = values.size, cfg.refine_iterations == 0
    res = _refine(fun, start, steps, bounds, cfg)
    if res is not None:
        evaluations += res.nfev
        converged = bool(res.success)
        if res.fun <= best_f:
            best_x, best_f = np.asarray(res.x, dtype=float), float(res.fun)

    return OptimizationResult(
        argmin=float(best_x[0]), f_min=best_f,
        power_ratio=float(best_x[1]) if strategy is Strategy.DF else None,
        evaluations=evaluations, converged=converged, grid_best=grid_best,
        grid_argmin=grid_arg)


def point_a_direct_baseline(scenario: CellScenario) -> float:
    """Direct-transmission outage of a cell-edge user (no relay)."""
    return direct_outage_single_eve(1.0, scenario.alpha)
