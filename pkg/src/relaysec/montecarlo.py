"""Brute-force Monte Carlo oracle for every outage probability in the package.

Trials are split into fixed chunks of ``chunk_size``. Chunk ``k`` draws from
its own Philox substream keyed only by ``(seed, k)``, and per-chunk outage
counts are integers, so the estimate is bit-identical for any worker count.

A trial whose destination and eavesdropper rates tie is counted as an
outage (a probability-zero event under continuous fading).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from .constants import MC_SIGMA_MULTIPLIER, Z95
from .errors import DomainError
from .geometry import Distances, PowerPair, Strategy, check_alpha, path_loss, require_positive

if TYPE_CHECKING:
    from .cellular import CellScenario

DEFAULT_TRIALS = 1_000_000
DEFAULT_CHUNK = 10_000


@dataclass(frozen=True)
class McConfig:
    """Trial budget and seeding.

    ``chunk_size`` is clamped to ``trials``. ``workers`` only changes the
    wall-clock time, never the result.
    """

    trials: int = DEFAULT_TRIALS
    seed: int = 0
    chunk_size: int = DEFAULT_CHUNK
    workers: int = 1

    def __post_init__(self):
        if int(self.trials) < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if int(self.chunk_size) < 1:
            raise DomainError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.workers) < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "chunk_size", min(int(self.chunk_size), self.trials))
        object.__setattr__(self, "workers", int(self.workers))

    def chunks(self) -> list[tuple[int, int]]:
        """``(chunk_index, n_trials)`` pairs covering all trials."""
        full, rest = divmod(self.trials, self.chunk_size)
        out = [(k, self.chunk_size) for k in range(full)]
        if rest:
            out.append((full, rest))
        return out

    def substream(self, chunk_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(chunk_index,))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    trials: int
    std_error: float
    ci95_low: float
    ci95_high: float
    outages: int

    @classmethod
    def from_counts(cls, outages: int, trials: int) -> McEstimate:
        p = outages / trials
        se = math.sqrt(p * (1.0 - p) / trials)
        return cls(p_hat=p, trials=trials, std_error=se,
                   ci95_low=max(0.0, p - Z95 * se), ci95_high=min(1.0, p + Z95 * se),
                   outages=int(outages))

    def z_score(self, value: float) -> float:
        """Distance to ``value`` in standard errors (inf if the estimate is exact and differs)."""
        diff = abs(self.p_hat - value)
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.std_error

    def agrees_with(self, value: float, k: float = MC_SIGMA_MULTIPLIER) -> bool:
        return self.z_score(value) <= k


@dataclass(frozen=True)
class FadingDraw:
    """Squared Rayleigh channel magnitudes ``|h|^2``, unit-mean exponential."""

    g_sr: np.ndarray
    g_rd: np.ndarray
    g_se: np.ndarray
    g_re: np.ndarray


def unit_exponential(rng: np.random.Generator, size) -> np.ndarray:
    """Inverse-CDF sampling, ``-log(u)`` with ``u`` in (0, 1]."""
    return -np.log1p(-rng.random(size))


def draw_fading(rng: np.random.Generator, n: int) -> FadingDraw:
    g = unit_exponential(rng, (4, n))
    return FadingDraw(g[0], g[1], g[2], g[3])


def _snr(gain, p, d_powered):
    # d_powered == 0 (co-located nodes) gives an infinite SNR.
    with np.errstate(divide="ignore", invalid="ignore"):
        return p * gain / d_powered


def df_outage_indicator(draw: FadingDraw, dist: Distances, alpha: float,
                        power: PowerPair) -> np.ndarray:
    """Per-trial DF outage: the weaker hop does not beat the eavesdropper's combined SNR."""
    sr, rd, se, re = (path_loss(d, alpha) for d in dist.links)
    legit = np.minimum(_snr(draw.g_sr, power.p_s, sr), _snr(draw.g_rd, power.p_r, rd))
    eve = _snr(draw.g_se, power.p_s, se) + _snr(draw.g_re, power.p_r, re)
    return ~(legit > eve)


def rf_outage_indicator(draw: FadingDraw, dist: Distances, alpha: float) -> np.ndarray:
    """Per-trial RF outage: either hop loses its own race against the eavesdropper."""
    sr, rd, se, re = (path_loss(d, alpha) for d in dist.links)
    hop1 = _snr(draw.g_sr, 1.0, sr) > _snr(draw.g_se, 1.0, se)
    hop2 = _snr(draw.g_rd, 1.0, rd) > _snr(draw.g_re, 1.0, re)
    return ~(hop1 & hop2)


def direct_outage_indicator(g_sd, g_se, d_sd, d_se, alpha: float) -> np.ndarray:
    return ~(_snr(g_sd, 1.0, path_loss(d_sd, alpha)) > _snr(g_se, 1.0, path_loss(d_se, alpha)))


def run_chunked(count_chunk: Callable[[np.random.Generator, int], int],
                cfg: McConfig) -> McEstimate:
    """Evaluate ``count_chunk(rng, n)`` on every chunk and pool the outage counts."""
    chunks = cfg.chunks()

    def job(chunk):
        k, n = chunk
        return int(count_chunk(cfg.substream(k), n))

    if cfg.workers == 1 or len(chunks) == 1:
        counts = [job(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            counts = list(pool.map(job, chunks))
    return McEstimate.from_counts(sum(counts), cfg.trials)


def mc_df_outage(dist: Distances, alpha: float, power: PowerPair,
                 cfg: McConfig = McConfig()) -> McEstimate:
    alpha = check_alpha(alpha)
    require_positive(dist)

    def count(rng, n):
        return np.count_nonzero(df_outage_indicator(draw_fading(rng, n), dist, alpha, power))

    return run_chunked(count, cfg)


def mc_rf_outage(dist: Distances, alpha: float, cfg: McConfig = McConfig()) -> McEstimate:
    alpha = check_alpha(alpha)
    require_positive(dist)

    def count(rng, n):
        return np.count_nonzero(rf_outage_indicator(draw_fading(rng, n), dist, alpha))

    return run_chunked(count, cfg)


def mc_direct_outage(d_sd: float, d_se: float, alpha: float,
                     cfg: McConfig = McConfig()) -> McEstimate:
    alpha = check_alpha(alpha)
    require_positive(Distances(1.0, 1.0, d_se, 1.0, d_sd), names=("d_sd", "d_se"))

    def count(rng, n):
        g = unit_exponential(rng, (2, n))
        return np.count_nonzero(direct_outage_indicator(g[0], g[1], d_sd, d_se, alpha))

    return run_chunked(count, cfg)


def uniform_disk_radii(rng: np.random.Generator, size, radius: float = 1.0) -> np.ndarray:
    """Radii of points uniform on a disk (density ``2t/R^2`` on ``[0, R]``)."""
    return radius * np.sqrt(rng.random(size))


def mc_cellular_direct(x: float, alpha: float, n_eves: int, cell_radius: float = 1.0,
                       cfg: McConfig = McConfig()) -> McEstimate:
    """BS-to-MU outage at normalized distance ``x`` against ``n_eves``
    non-cooperative eavesdroppers uniform on the cell disk.

    The strongest single eavesdropper decides the outage.
    """
    alpha = check_alpha(alpha)
    if not 0.0 < x <= 1.0:
        raise DomainError(f"normalized distance must lie in (0, 1], got {x}")
    if int(n_eves) < 1:
        raise DomainError(f"need at least one eavesdropper, got {n_eves}")
    if not cell_radius > 0:
        raise DomainError("cell radius must be positive")
    n_eves = int(n_eves)
    d_sd = x * cell_radius

    def count(rng, n):
        g_sd = unit_exponential(rng, n)
        g_se = unit_exponential(rng, (n_eves, n))
        d_se = uniform_disk_radii(rng, (n_eves, n), cell_radius)
        eve = _snr(g_se, 1.0, path_loss(d_se, alpha)).max(axis=0)
        return np.count_nonzero(~(_snr(g_sd, 1.0, path_loss(d_sd, alpha)) > eve))

    return run_chunked(count, cfg)


def mc_cellular_relay(scenario: CellScenario, strategy: Strategy | str,
                      mu_angle_offset: float | None = None, cfg: McConfig = McConfig(),
                      mu_distance: float = 1.0) -> McEstimate:
    """Outage of a mobile user served through the sector relay.

    The BS sits at the origin and the relay at ``(d_br, 0)`` on its sector
    bisector. The MU is at normalized radius ``mu_distance`` and angle
    ``mu_angle_offset`` (point A: cell edge, offset ``pi/M``). Each trial
    draws ``N`` eavesdropper positions uniformly on the disk plus fading on
    every link. Under DF each eavesdropper combines both hops with the
    scenario's fixed power ratio; under RF each hop must beat every
    eavesdropper on that hop.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.DIRECT:
        raise DomainError("use mc_cellular_direct for direct transmission")
    alpha = check_alpha(scenario.alpha)
    radius = scenario.radius_R
    d_br = scenario.relay_bisector_distance
    if not 0.0 <= d_br <= radius:
        raise DomainError(f"relay distance {d_br} outside [0, {radius}]")
    if not 0.0 < mu_distance <= 1.0:
        raise DomainError(f"mu_distance must lie in (0, 1], got {mu_distance}")
    offset = scenario.point_a_offset if mu_angle_offset is None else float(mu_angle_offset)
    n_eves = scenario.eavesdroppers_N
    rho = scenario.power_ratio
    mu = mu_distance * radius * np.array([math.cos(offset), math.sin(offset)])
    sr = path_loss(d_br, alpha)
    rd = path_loss(math.hypot(mu[0] - d_br, mu[1]), alpha)

    def count(rng, n):
        g_sr = unit_exponential(rng, n)
        g_rd = unit_exponential(rng, n)
        g_se = unit_exponential(rng, (n_eves, n))
        g_re = unit_exponential(rng, (n_eves, n))
        t = uniform_disk_radii(rng, (n_eves, n), radius)
        phi = 2.0 * math.pi * rng.random((n_eves, n))
        ex, ey = t * np.cos(phi), t * np.sin(phi)
        se = path_loss(t, alpha)
        re = path_loss(np.hypot(ex - d_br, ey), alpha)
        if strategy is Strategy.RF:
            hop1 = _snr(g_sr, 1.0, sr) > _snr(g_se, 1.0, se).max(axis=0)
            hop2 = _snr(g_rd, 1.0, rd) > _snr(g_re, 1.0, re).max(axis=0)
            secure = hop1 & hop2
        else:
            legit = np.minimum(_snr(g_sr, 1.0, sr), _snr(g_rd, rho, rd))
            eve = (_snr(g_se, 1.0, se) + _snr(g_re, rho, re)).max(axis=0)
            secure = legit > eve
        return np.count_nonzero(~secure)

    return run_chunked(count, cfg)
