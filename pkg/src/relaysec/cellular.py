"""Single-cell downlink with eavesdroppers uniformly distributed in the cell.

Distances are normalized by the cell radius; outage depends only on
distance ratios, so every analytic routine works on the unit disk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .constants import CELL_QUADRATURE_TOL
from .errors import ConstraintViolationError, DomainError, UnsupportedValueError
from .geometry import Strategy, check_alpha, path_loss
from .montecarlo import McConfig, mc_cellular_direct


@dataclass(frozen=True)
class CellScenario:
    """Sectorized cell with one relay per sector on the sector bisector.

    ``power_ratio`` is the relay-to-BS power ratio used by DF; it must not
    exceed ``power_ratio_cap``.
    """

    radius_R: float = 1.0
    sectors_M: int = 6
    eavesdroppers_N: int = 1
    alpha: float = 4.0
    relay_bisector_distance: float = 0.0
    power_ratio_cap: float = 1.0
    power_ratio: float = 1.0

    def __post_init__(self):
        check_alpha(self.alpha)
        if not self.radius_R > 0:
            raise DomainError("cell radius must be positive")
        if int(self.sectors_M) < 1:
            raise DomainError("need at least one sector")
        if int(self.eavesdroppers_N) < 1:
            raise DomainError("need at least one eavesdropper")
        if not 0.0 <= self.relay_bisector_distance <= self.radius_R:
            raise DomainError(
                f"relay distance {self.relay_bisector_distance} outside [0, {self.radius_R}]")
        if not (self.power_ratio_cap > 0 and self.power_ratio > 0):
            raise DomainError("power ratio and cap must be positive")

    @property
    def point_a_offset(self) -> float:
        """Angle between the relay bisector and the sector edge."""
        return math.pi / self.sectors_M

    @property
    def normalized_relay_distance(self) -> float:
        return self.relay_bisector_distance / self.radius_R

    def with_relay(self, d_br: float, power_ratio: float | None = None) -> CellScenario:
        kw = {"relay_bisector_distance": d_br}
        if power_ratio is not None:
            kw["power_ratio"] = power_ratio
        return replace(self, **kw)


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 < x <= 1.0:
        raise DomainError(f"normalized distance must lie in (0, 1], got {x}")
    return x


def direct_outage_quadrature(x: float, alpha: float) -> float:
    """Integral of ``x^a / (x^a + t^a)`` against the radial density ``2t`` on [0, 1]."""
    x, alpha = _check_x(x), check_alpha(alpha)
    xa = x**alpha

    def f(t):
        return 2.0 * t * xa / (xa + t**alpha)

    pts = [x] if x < 1.0 else None
    val, _ = integrate.quad(f, 0.0, 1.0, points=pts, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def _closed_form(x: float, alpha: float) -> float:
    x2 = x * x
    if alpha == 2.0:
        return x2 * math.log1p(1.0 / x2)
    if alpha == 3.0:
        s3 = math.sqrt(3.0)
        return 2.0 * x2 * (math.log((x2 - x + 1.0) / (x + 1.0) ** 2) / 6.0
                           + (math.atan((2.0 - x) / (s3 * x)) + math.pi / 6.0) / s3)
    if alpha == 4.0:
        return x2 * math.atan(1.0 / x2)
    raise UnsupportedValueError(f"no closed form for alpha = {alpha}")


def direct_outage_single_eve(x: float, alpha: float) -> float:
    """Direct BS-to-MU outage against one eavesdropper uniform in the cell.

    Exact for alpha in {2, 3, 4}; adaptive quadrature otherwise.
    """
    x, alpha = _check_x(x), check_alpha(alpha)
    if alpha in (2.0, 3.0, 4.0):
        return _closed_form(x, alpha)
    return direct_outage_quadrature(x, alpha)


def direct_outage_series(x: float, alpha: float, terms: int = 20000) -> float:
    """Alternating power-series form of the single-eavesdropper outage.

    Diagnostic only. The terms scale like ``x**(-k*alpha)``, so the series
    diverges for ``x < 1``. At ``x = 1`` it converges conditionally and the
    mean of the last two partial sums is returned; for ``x > 1`` (outside the
    cell) it converges absolutely.
    """
    alpha = check_alpha(alpha)
    if x < 1.0:
        raise DomainError("series diverges for x < 1; use direct_outage_single_eve")
    k = np.arange(terms + 1, dtype=float)
    terms_ = (-1.0) ** k * x ** (-k * alpha) / (1.0 + k * alpha / 2.0)
    partial = np.cumsum(terms_)
    return float(0.5 * (partial[-1] + partial[-2]))


def direct_outage_bounds(x: float, alpha: float, n_eves: int) -> tuple[float, float]:
    """Lower and upper bounds on the outage with ``n_eves`` non-cooperative eavesdroppers."""
    if int(n_eves) < 1:
        raise DomainError(f"need at least one eavesdropper, got {n_eves}")
    p1 = direct_outage_single_eve(x, alpha)
    upper = 1.0 - (1.0 - p1) ** int(n_eves)
    return p1, max(p1, upper)


_EDGE_CONSTANTS = {
    2.0: math.log(2.0),
    3.0: 2.0 * math.pi / (3.0 * math.sqrt(3.0)) - 2.0 / 3.0 * math.log(2.0),
    4.0: math.pi / 4.0,
}


def cell_edge_constants(alpha: float) -> float:
    """Exact single-eavesdropper outage of a cell-edge user (alpha in {2, 3, 4})."""
    try:
        return _EDGE_CONSTANTS[float(alpha)]
    except KeyError:
        raise UnsupportedValueError(
            f"cell-edge constant only tabulated for alpha in 2, 3, 4 (got {alpha}); "
            "use direct_outage_single_eve") from None


def _conditional_outage(strategy, alpha, ex, ey, d_br, sr, rd, ratio):
    se = path_loss(np.hypot(ex, ey), alpha)
    re = path_loss(np.hypot(ex - d_br, ey), alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        if strategy is Strategy.RF:
            # Written as a product of per-hop secure probabilities so that
            # d_sr = 0 or d_rd = 0 reduce to the single-hop limit.
            q1 = np.where(sr + se > 0, se / (sr + se), 0.0)
            q2 = np.where(rd + re > 0, re / (rd + re), 0.0)
            return 1.0 - q1 * q2
        den = ((rd + re) * (sr + se) + sr * rd
               + ratio * sr * (sr + se) + rd * (rd + re) / ratio)
        return 1.0 - np.where(den > 0, se * re / den, 0.0)


def relay_outage_batch(d_br, power_ratio, alpha: float, strategy: Strategy | str,
                       mu_angle_offset: float, mu_distance: float = 1.0,
                       tol: float = CELL_QUADRATURE_TOL) -> np.ndarray:
    """Eavesdropper-averaged relay outage for many relay placements at once.

    ``d_br`` (normalized relay distance along the bisector) and
    ``power_ratio`` broadcast together. The eavesdropper is uniform on the
    unit disk and the expectation is an adaptive 2-D Gauss-Kronrod cubature
    over (radius, angle) with the radial density ``2t``. The relay position
    is passed as a breakpoint so the integrand's cusp there sits on a
    subregion corner. Placements sharing a relay distance are integrated as
    one vector-valued integral.
    """
    strategy = Strategy(strategy)
    alpha = check_alpha(alpha)
    d_br, ratio = np.broadcast_arrays(np.atleast_1d(np.asarray(d_br, dtype=float)),
                                      np.atleast_1d(np.asarray(power_ratio, dtype=float)))
    if np.any(d_br < 0) or np.any(d_br > 1):
        raise DomainError("normalized relay distance must lie in [0, 1]")
    mu_x = mu_distance * math.cos(mu_angle_offset)
    mu_y = mu_distance * math.sin(mu_angle_offset)
    flat_d, flat_ratio = d_br.ravel(), ratio.ravel()
    out = np.empty(flat_d.shape)
    for dist in np.unique(flat_d):
        idx = np.flatnonzero(flat_d == dist)
        sr = path_loss(dist, alpha)
        rd = path_loss(math.hypot(mu_x - dist, mu_y), alpha)
        ratios = flat_ratio[idx]

        def f(pts, sr=sr, rd=rd, dist=dist, ratios=ratios):
            t, phi = pts[:, 0:1], pts[:, 1:2]
            cond = _conditional_outage(strategy, alpha, t * np.cos(phi), t * np.sin(phi),
                                       dist, sr, rd, ratios)
            return cond * (t / math.pi)

        breaks = [np.array([dist, 0.0])] if 0.0 < dist < 1.0 else None
        res = integrate.cubature(f, [0.0, -math.pi], [1.0, math.pi], rule="gk21",
                                 atol=tol * 1e-2, rtol=0.0, points=breaks,
                                 max_subdivisions=20000)
        if res.status != "converged":
            raise RuntimeError(f"relay-outage cubature did not converge at d_br={dist}")
        out[idx] = res.estimate
    return out.reshape(d_br.shape)


def relay_outage_at_A(scenario: CellScenario, strategy: Strategy | str,
                      power_ratio: float | None = None, mu_angle_offset: float | None = None,
                      mu_distance: float = 1.0) -> float:
    """Single-eavesdropper outage of the point-A user served by the sector relay.

    DF uses one fixed power ratio for every eavesdropper position, since
    eavesdropper CSI is unavailable in the cell. RF ignores the ratio.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.DIRECT:
        raise DomainError("use direct_outage_single_eve for direct transmission")
    ratio = scenario.power_ratio if power_ratio is None else float(power_ratio)
    if strategy is Strategy.DF:
        if not ratio > 0:
            raise DomainError("power ratio must be positive")
        if ratio > scenario.power_ratio_cap:
            raise ConstraintViolationError(
                f"power ratio {ratio} exceeds cap {scenario.power_ratio_cap}")
    else:
        ratio = 1.0
    if not 0.0 < mu_distance <= 1.0:
        raise DomainError(f"mu_distance must lie in (0, 1], got {mu_distance}")
    offset = scenario.point_a_offset if mu_angle_offset is None else float(mu_angle_offset)
    val = relay_outage_batch(scenario.normalized_relay_distance, ratio, scenario.alpha,
                             strategy, offset, mu_distance)
    return float(val[0])


def row_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the ``index``-th Monte Carlo row of a sweep."""
    state = np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def sweep_direct_outage(x_grid, alpha_list, n_list, cfg: McConfig = McConfig()) -> list[dict]:
    """Direct outage against N eavesdroppers over a grid of user distances.

    N = 1 rows are analytic; N > 1 rows are Monte Carlo estimates, each with
    its own substream seed derived from ``cfg.seed`` and the row index.
    """
    if not (len(x_grid) and len(alpha_list) and len(n_list)):
        raise DomainError("sweep grids must be non-empty")
    rows = []
    index = 0
    for alpha in alpha_list:
        for n in n_list:
            for x in x_grid:
                lower, upper = direct_outage_bounds(x, alpha, n)
                row = {"x": float(x), "alpha": float(alpha), "n_eves": int(n)}
                if int(n) == 1:
                    row.update(value=lower, method="analytic", std_error=0.0)
                else:
                    est = mc_cellular_direct(x, alpha, n, 1.0,
                                             replace(cfg, seed=row_seed(cfg.seed, index)))
                    row.update(value=est.p_hat, method="mc", std_error=est.std_error)
                row.update(lower_bound=lower, upper_bound=upper)
                rows.append(row)
                index += 1
    return rows
