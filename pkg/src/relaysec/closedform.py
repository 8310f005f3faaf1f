"""Closed-form secrecy outage of the four-node relay system under Rayleigh fading.

Every function accepts scalar or array-valued :class:`Distances` and
broadcasts. Outage is the probability that no secure connection exists,
i.e. that the destination's rate does not exceed the eavesdropper's.

The ``*_secure`` variants return the complementary secure-connection
probability directly. They avoid the ``1 - p`` cancellation when outage is
very close to one, which matters for the DF/RF identity check.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateLinkError, DomainError
from .geometry import Distances, check_alpha, path_loss, require_positive


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check_ratio(ratio):
    r = np.asarray(ratio, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise DomainError(f"power ratio must be positive and finite, got {ratio}")
    return r


def _powered(dist: Distances, alpha: float):
    alpha = check_alpha(alpha)
    require_positive(dist)
    return tuple(np.asarray(path_loss(d, alpha), dtype=float) for d in dist.links)


def df_secure_general(dist: Distances, alpha: float, ratio) -> float | np.ndarray:
    sr, rd, se, re = _powered(dist, alpha)
    r = _check_ratio(ratio)
    den = ((rd + re) * (sr + se) + sr * rd
           + r * sr * (sr + se) + rd * (rd + re) / r)
    return _scalar(se * re / den)


def df_outage_general(dist: Distances, alpha: float, ratio) -> float | np.ndarray:
    """DF outage for a given relay-to-source power ratio ``p_r / p_s``."""
    return _scalar(1.0 - np.asarray(df_secure_general(dist, alpha, ratio)))


def df_optimal_power_ratio(dist: Distances, alpha: float) -> float | np.ndarray:
    """Power ratio ``p_r / p_s`` minimizing DF outage (AM-GM balance point)."""
    sr, rd, se, re = _powered(dist, alpha)
    return _scalar(np.sqrt(rd * (rd + re) / (sr * (sr + se))))


def df_secure_optimal(dist: Distances, alpha: float) -> float | np.ndarray:
    sr, rd, se, re = _powered(dist, alpha)
    root = np.sqrt((sr + se) * (rd + re)) + np.sqrt(sr * rd)
    return _scalar(se * re / root**2)


def df_outage_optimal(dist: Distances, alpha: float) -> float | np.ndarray:
    """DF outage with the power ratio set to :func:`df_optimal_power_ratio`."""
    return _scalar(1.0 - np.asarray(df_secure_optimal(dist, alpha)))


def rf_secure(dist: Distances, alpha: float) -> float | np.ndarray:
    sr, rd, se, re = _powered(dist, alpha)
    return _scalar(se * re / ((sr + se) * (rd + re)))


def rf_outage(dist: Distances, alpha: float) -> float | np.ndarray:
    """RF outage: both hops must individually beat the eavesdropper.

    Transmit powers cancel hop by hop, so none are taken.
    """
    return _scalar(1.0 - np.asarray(rf_secure(dist, alpha)))


def direct_outage(d_sd, d_se, alpha: float) -> float | np.ndarray:
    alpha = check_alpha(alpha)
    d_sd = np.asarray(d_sd, dtype=float)
    d_se = np.asarray(d_se, dtype=float)
    if np.any(d_sd <= 0) or np.any(d_se <= 0):
        raise DegenerateLinkError("degenerate link: direct-transmission distance = 0")
    sd, se = path_loss(d_sd, alpha), path_loss(d_se, alpha)
    return _scalar(sd / (sd + se))


def df_rf_identity_terms(dist: Distances, alpha: float):
    """The three terms of ``1/sqrt(1-P_DF) = 1/sqrt(1-P_RF) + sqrt(sr rd / (se re))``."""
    sr, rd, se, re = _powered(dist, alpha)
    lhs = 1.0 / np.sqrt(np.asarray(df_secure_optimal(dist, alpha)))
    rf_term = 1.0 / np.sqrt(np.asarray(rf_secure(dist, alpha)))
    gap = np.sqrt(sr * rd / (se * re))
    return _scalar(lhs), _scalar(rf_term), _scalar(gap)


def df_rf_identity_residual(dist: Distances, alpha: float) -> float | np.ndarray:
    """Relative residual of the exact DF/RF relation, ``(lhs - rhs) / lhs``.

    The terms grow like ``(d_sr d_rd / (d_se d_re))**(alpha/2)`` so an
    absolute residual is dominated by float64 rounding for far-apart
    nodes; the relative form stays at machine precision.
    """
    lhs, rf_term, gap = (np.asarray(t) for t in df_rf_identity_terms(dist, alpha))
    return _scalar((lhs - (rf_term + gap)) / lhs)


class AsymptoticOutages(NamedTuple):
    df: float
    rf: float
    direct: float


def asymptotic_outages(d_sr, d_rd, d_sd, d_se, alpha: float) -> AsymptoticOutages:
    """Far-eavesdropper approximations with ``d_re`` replaced by ``d_se``."""
    alpha = check_alpha(alpha)
    if not d_se > 0:
        raise DomainError("d_se must be positive")
    sr, rd, sd, se = (path_loss(d, alpha) for d in (d_sr, d_rd, d_sd, d_se))
    df = (math.sqrt(sr / se) + math.sqrt(rd / se)) ** 2
    return AsymptoticOutages(df=df, rf=(sr + rd) / se, direct=sd / se)
