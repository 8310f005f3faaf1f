"""Node layouts, link distances and the path-loss channel parameterization.

All distances are unitless. In the cellular scenario the cell radius is the
normalizing length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .errors import DegenerateLinkError, DomainError


class Strategy(str, Enum):
    DF = "df"
    RF = "rf"
    DIRECT = "direct"


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: Point2D) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def parse(cls, text: str) -> Point2D:
        """Parse ``"x,y"``."""
        try:
            x, y = (float(v) for v in text.split(","))
        except ValueError as exc:
            raise DomainError(f"expected 'x,y', got {text!r}") from exc
        return cls(x, y)


@dataclass(frozen=True)
class FourNodeLayout:
    source: Point2D
    relay: Point2D
    destination: Point2D
    eavesdropper: Point2D

    def coincidences(self) -> list[tuple[str, str]]:
        """Pairs of nodes that sit on top of each other.

        Coincident nodes are legal here; closed forms and the Monte Carlo
        oracle reject the resulting zero-length links at the point of use.
        """
        names = ("source", "relay", "destination", "eavesdropper")
        pts = [getattr(self, n) for n in names]
        out = []
        for i in range(4):
            for j in range(i + 1, 4):
                if pts[i].distance_to(pts[j]) == 0.0:
                    out.append((names[i], names[j]))
        return out


@dataclass(frozen=True)
class Distances:
    """Link distances of the four-node system plus the direct S-D distance.

    Fields may be floats or equally shaped numpy arrays (vectorized grids).
    """

    d_sr: float | np.ndarray
    d_rd: float | np.ndarray
    d_se: float | np.ndarray
    d_re: float | np.ndarray
    d_sd: float | np.ndarray = float("nan")

    def __post_init__(self):
        for f in fields(self):
            v = np.asarray(getattr(self, f.name), dtype=float)
            if f.name == "d_sd" and np.all(np.isnan(v)):
                continue
            if not np.all(np.isfinite(v)) or np.any(v < 0):
                raise DomainError(f"{f.name} must be finite and nonnegative")

    @property
    def links(self) -> tuple:
        """The four relay-system links in fixed (sr, rd, se, re) order."""
        return self.d_sr, self.d_rd, self.d_se, self.d_re

    def swapped_hops(self) -> Distances:
        """Relabel source and destination roles: (sr, se) <-> (rd, re)."""
        return Distances(self.d_rd, self.d_sr, self.d_re, self.d_se, self.d_sd)


@dataclass(frozen=True)
class PowerPair:
    p_s: float
    p_r: float

    def __post_init__(self):
        for name in ("p_s", "p_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")

    @property
    def ratio(self) -> float:
        return self.p_r / self.p_s


def check_alpha(alpha):
    """Validate a path-loss exponent (scalar or array) and return it as float(s)."""
    arr = np.asarray(alpha, dtype=float)
    if not (np.all(np.isfinite(arr)) and np.all(arr >= 1.0)):
        raise DomainError(f"path-loss exponent must be >= 1, got {alpha}")
    return float(arr) if arr.ndim == 0 else arr


def path_loss(d, alpha: float):
    """``d**alpha`` computed as ``exp(alpha*log d)``; zero maps to zero."""
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(alpha * np.log(d))
    return out if out.ndim else float(out)


def require_positive(dist: Distances, names=("d_sr", "d_rd", "d_se", "d_re")) -> None:
    for name in names:
        if np.any(np.asarray(getattr(dist, name)) <= 0):
            raise DegenerateLinkError(f"degenerate link: {name} = 0")


def distances_from_layout(layout: FourNodeLayout) -> Distances:
    s, r, d, e = layout.source, layout.relay, layout.destination, layout.eavesdropper
    return Distances(
        d_sr=s.distance_to(r),
        d_rd=r.distance_to(d),
        d_se=s.distance_to(e),
        d_re=r.distance_to(e),
        d_sd=s.distance_to(d),
    )


def distances_from_points(source, relay, destination, eavesdropper) -> Distances:
    """Vectorized variant of :func:`distances_from_layout`.

    Each argument is an array of shape ``(..., 2)``; typically only the relay
    varies over a grid while the other nodes broadcast.
    """
    s, r, d, e = (np.asarray(p, dtype=float) for p in (source, relay, destination, eavesdropper))

    def norm(a, b):
        diff = a - b
        return np.hypot(diff[..., 0], diff[..., 1])

    d_sr, d_rd, d_se, d_re, d_sd = np.broadcast_arrays(
        norm(s, r), norm(r, d), norm(s, e), norm(r, e), norm(s, d))
    return Distances(d_sr, d_rd, d_se, d_re, d_sd)


def gain_means(dist: Distances, alpha: float, power: PowerPair) -> tuple:
    """Mean received SNRs of the sr, rd, se and re links (unit noise).

    Under Rayleigh fading each received SNR is exponential with mean
    ``p / d**alpha``.
    """
    alpha = check_alpha(alpha)
    require_positive(dist)
    sr, rd, se, re = (path_loss(d, alpha) for d in dist.links)
    return power.p_s / sr, power.p_r / rd, power.p_s / se, power.p_r / re
