"""Neighborhoods of a finite singular set used to excise or isolate curvature."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lines import fs_distance

SHAPES = ("fs_ball", "polydisk")


@dataclass(frozen=True)
class TubeSpec:
    """Union of radius-``radius`` neighborhoods of ``centers``.

    ``fs_ball`` uses the Fubini-Study distance.  ``polydisk`` uses the affine chart
    ``x_chart = 1``: a point is inside when every affine coordinate is within
    ``radius`` of the center's.
    """

    centers: tuple
    radius: float
    shape: str = "fs_ball"
    chart: int | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("tube radius must be positive")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown tube shape {self.shape!r}")
        if self.shape == "polydisk":
            if self.chart is None:
                raise ValueError("polydisk tube needs a chart index")
            for c in self._center_array():
                if abs(c[self.chart]) == 0:
                    raise ValueError("polydisk center lies outside its chart")

    def _center_array(self) -> np.ndarray:
        return np.array([[complex(x) for x in c] for c in self.centers], dtype=complex)

    def with_radius(self, radius: float) -> "TubeSpec":
        return TubeSpec(self.centers, radius, self.shape, self.chart)

    def validate_on(self, F) -> None:
        """Centers must lie on ``{F = 0}`` exactly (when coordinates are exact)."""
        for c in self.centers:
            v = F.evaluate(list(c))
            if (v != 0) if F.exact else abs(complex(v)) > 1e-12:
                raise ValueError(f"tube center {c} is not on the hypersurface")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask over the leading axes of ``points`` (shape ``(..., N+1)``)."""
        P = np.asarray(points, dtype=complex)
        C = self._center_array()
        inside = np.zeros(P.shape[:-1], dtype=bool)
        if len(C) == 0:
            return inside
        if self.shape == "fs_ball":
            for c in C:
                inside |= fs_distance(P, c) < self.radius
            return inside
        k = self.chart
        keep = [j for j in range(P.shape[-1]) if j != k]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = P[..., keep] / P[..., k:k + 1]
        for c in C:
            wc = c[keep] / c[k]
            inside |= np.all(np.abs(w - wc) < self.radius, axis=-1)
        return inside


def tube_filter(tube: TubeSpec | None, side: str):
    """Mask function for points that count toward an integral restricted by ``tube``."""
    if side not in ("inside", "outside"):
        raise ValueError("side must be 'inside' or 'outside'")
    if tube is None:
        return None
    if side == "inside":
        return tube.contains
    return lambda P: ~tube.contains(P)


def fs_ball(centers: Sequence, radius: float) -> TubeSpec:
    return TubeSpec(tuple(tuple(c) for c in centers), radius, "fs_ball")


def polydisk(centers: Sequence, radius: float, chart: int) -> TubeSpec:
    return TubeSpec(tuple(tuple(c) for c in centers), radius, "polydisk", chart)
